// command line front end: complexity tables, bler campaigns, transmit psd
// estimates and antenna sweeps
// exit codes: 0 success, 1 configuration error, 2 runtime/io error

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lsalink/config_json.hpp"
#include "lsalink/metrics.hpp"
#include "lsalink/spectrum.hpp"

namespace {

using namespace lsalink;

void print_complexity(const metrics::ComplexityParams& p, const std::vector<std::size_t>& ms) {
    std::printf("operations per received symbol (nfft=%zu used=%zu taps=%zu alpha=%zu)\n",
                p.nfft, p.used, p.cir_taps, p.alpha);
    auto row = [&](std::size_t m, const char* fmt) {
        const double tr = metrics::complexity_traditional_ofdm(m, p);
        const double mf = metrics::complexity_mf_ofdm(m, p);
        const double sc = metrics::complexity_sc(m, p);
        std::printf("  %6zu  ", m);
        std::printf(fmt, tr);
        std::printf(fmt, mf);
        std::printf(fmt, sc);
        std::printf("\n");
    };
    std::printf("exact counts\n       M   traditional       mf-ofdm            sc\n");
    for (std::size_t m : ms) row(m, "%12.0f  ");
    std::printf("rounded to two significant figures\n"
                "       M   traditional       mf-ofdm            sc\n");
    for (std::size_t m : ms) row(m, "%12.1e  ");
}

struct CsvRow {
    harness::LinkConfig link;
    harness::PointResult pr;
};

// companion files with the per-figure column subsets
void write_plot_data(const std::string& csv_path, std::uint64_t seed,
                     const std::vector<CsvRow>& rows) {
    const std::string stem = csv_path.size() > 4 && csv_path.substr(csv_path.size() - 4) == ".csv"
                                 ? csv_path.substr(0, csv_path.size() - 4)
                                 : csv_path;
    auto emit = [&](const char* suffix, const char* col, auto value) {
        std::ofstream os(stem + suffix);
        if (!os) throw std::runtime_error("cannot open plot data file " + stem + suffix);
        os << "waveform,M,K,scheme,esn0_db," << col << "\n";
        os.precision(10);
        for (const auto& r : rows)
            os << harness::waveform_name(r.link.waveform) << ',' << r.link.antennas << ','
               << r.link.users << ',' << modem::scheme_name(r.link.scheme) << ','
               << r.pr.esn0_db << ',' << value(r) << "\n";
    };
    emit("_bler_vs_snr.csv", "bler,bler_lo,bler_hi", [](const CsvRow& r) {
        std::ostringstream s;
        s.precision(10);
        s << r.pr.bler << ',' << r.pr.bler_lo << ',' << r.pr.bler_hi;
        return s.str();
    });
    emit("_se_vs_snr.csv", "se_bps_hz", [](const CsvRow& r) {
        std::ostringstream s;
        s.precision(10);
        s << r.pr.se;
        return s.str();
    });
    emit("_ee_vs_snr.csv", "ee_relative", [](const CsvRow& r) {
        std::ostringstream s;
        s.precision(10);
        s << r.pr.ee;
        return s.str();
    });
    (void)seed;
}

void progress(const harness::LinkConfig& link, const harness::PointResult& pr) {
    std::fprintf(stderr, "%s M=%zu K=%zu %s esn0 %+.2f dB -> bler %.4g (%zu blocks, %zu errors)\n",
                 harness::waveform_name(link.waveform), link.antennas, link.users,
                 modem::scheme_name(link.scheme), pr.esn0_db, pr.bler, pr.blocks,
                 pr.block_errors);
}

int cmd_run(const std::string& config_path, const std::string& output_override,
            int fast_override) {
    harness::GridConfig grid = harness::load_grid(config_path);
    if (!output_override.empty()) grid.output = output_override;
    if (fast_override >= 0) grid.base.fast_path = fast_override != 0;
    const auto campaigns = grid.expand();

    std::ofstream csv(grid.output);
    if (!csv) throw std::runtime_error("cannot open output file " + grid.output);
    csv << harness::csv_header() << "\n";
    std::vector<CsvRow> rows;
    for (const auto& camp : campaigns) {
        const harness::Context cx = harness::make_context(camp.link);
        for (double esn0 : camp.esn0_db) {
            const auto pr = harness::run_point(cx, camp, esn0);
            harness::append_csv_row(csv, camp.link, camp.seed, pr);
            csv.flush();  // completed points survive an interrupted run
            progress(camp.link, pr);
            rows.push_back({camp.link, pr});
        }
    }
    write_plot_data(grid.output, grid.seed, rows);
    std::fprintf(stderr, "wrote %zu points to %s\n", rows.size(), grid.output.c_str());
    return 0;
}

int cmd_psd(const std::string& output, std::size_t nsym, std::size_t seg, std::size_t span,
            double beta, std::uint64_t seed) {
    harness::LinkConfig link;
    link.sc.span = span;
    link.sc.beta = beta;
    const auto po = harness::tx_psd_ofdm(link, nsym / link.ofdm.used + 1, seed, seg);
    const auto ps = harness::tx_psd_sc(link, nsym, seed, seg);
    const auto od = harness::to_dbr(po, harness::ofdm_half_bw(link));
    const auto sd = harness::to_dbr(ps, harness::sc_inner_half_bw(link));

    std::ofstream os(output);
    if (!os) throw std::runtime_error("cannot open output file " + output);
    os << "waveform,freq_hz,psd_dbr\n";
    os.precision(10);
    for (std::size_t i = 0; i < po.freq_hz.size(); ++i)
        os << "ofdm," << po.freq_hz[i] << ',' << od[i] << "\n";
    for (std::size_t i = 0; i < ps.freq_hz.size(); ++i)
        os << "sc," << ps.freq_hz[i] << ',' << sd[i] << "\n";
    std::fprintf(stderr, "wrote %zu psd bins to %s\n", po.freq_hz.size() + ps.freq_hz.size(),
                 output.c_str());
    return 0;
}

int cmd_sweep(harness::CampaignConfig camp, const std::vector<std::size_t>& antennas,
              double esn0, const std::string& output) {
    std::ofstream csv(output);
    if (!csv) throw std::runtime_error("cannot open output file " + output);
    csv << harness::csv_header() << "\n";
    for (std::size_t m : antennas) {
        camp.link.antennas = m;
        camp.link = camp.link.normalized();
        camp.validate();
        const harness::Context cx = harness::make_context(camp.link);
        const auto pr = harness::run_point(cx, camp, esn0);
        harness::append_csv_row(csv, camp.link, camp.seed, pr);
        csv.flush();
        progress(camp.link, pr);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"large-scale antenna uplink simulator: ofdm vs single carrier"};
    app.require_subcommand(1);

    auto* cplx = app.add_subcommand("complexity", "per-symbol operation counts per receiver");
    metrics::ComplexityParams cp;
    std::vector<std::size_t> mlist{2, 8, 32, 128, 512};
    cplx->add_option("--nfft", cp.nfft, "fft size");
    cplx->add_option("--used", cp.used, "occupied subcarriers");
    cplx->add_option("--taps", cp.cir_taps, "channel taps (delay spread + 1)");
    cplx->add_option("--alpha", cp.alpha, "sc oversampling factor");
    cplx->add_option("--antennas", mlist, "antenna counts to tabulate");

    auto* run = app.add_subcommand("run", "bler campaign from a json config");
    std::string config_path, run_output;
    bool force_fast = false, force_full = false;
    run->add_option("config", config_path, "json campaign config")->required();
    run->add_option("-o,--output", run_output, "override the csv path from the config");
    run->add_flag("--fast", force_fast, "force the conditional fast path");
    run->add_flag("--full", force_full, "force full waveform synthesis");

    auto* psd = app.add_subcommand("psd", "transmit spectrum estimates for both waveforms");
    std::string psd_output = "psd.csv";
    std::size_t psd_nsym = 20000, psd_seg = 4096, psd_span = 12;
    double psd_beta = 0.22;
    std::uint64_t psd_seed = 1;
    psd->add_option("-o,--output", psd_output, "csv output path");
    psd->add_option("--symbols", psd_nsym, "modem symbols per stream");
    psd->add_option("--segment", psd_seg, "welch segment length (power of two)");
    psd->add_option("--span", psd_span, "sc pulse span, symbols each side");
    psd->add_option("--beta", psd_beta, "sc pulse roll-off");
    psd->add_option("--seed", psd_seed, "stream seed");

    auto* sweep = app.add_subcommand("sweep-antennas", "bler vs antenna count at fixed snr");
    harness::CampaignConfig scamp;
    std::vector<std::size_t> sweep_ms;
    double sweep_esn0 = 0.0;
    std::string sweep_output = "sweep.csv";
    std::string sweep_wf = "ofdm", sweep_scheme = "qpsk", sweep_route = "matched_filter";
    bool sweep_fast = false;
    sweep->add_option("--waveform", sweep_wf, "ofdm or sc");
    sweep->add_option("--esn0", sweep_esn0, "es/n0 in db")->required();
    sweep->add_option("--antennas", sweep_ms, "antenna counts")->required();
    sweep->add_option("--users", scamp.link.users, "user count");
    sweep->add_option("--scheme", sweep_scheme, "qpsk or qam16");
    sweep->add_option("--route", sweep_route, "ofdm receiver: matched_filter or traditional");
    sweep->add_option("--blocks", scamp.blocks_per_point, "baseline blocks per point");
    sweep->add_option("--min-errors", scamp.min_block_errors, "minimum block errors per point");
    sweep->add_option("--max-blocks", scamp.max_blocks, "hard cap per point");
    sweep->add_option("--batch", scamp.batch, "stop-rule granularity");
    sweep->add_option("--seed", scamp.seed, "master seed");
    sweep->add_flag("--fast", sweep_fast, "use the conditional fast path");
    sweep->add_option("-o,--output", sweep_output, "csv output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // bad flags are configuration errors
    }

    try {
        if (*cplx) {
            print_complexity(cp, mlist);
            return 0;
        }
        if (*run) {
            const int fast = force_fast ? 1 : force_full ? 0 : -1;
            if (force_fast && force_full)
                throw std::invalid_argument("--fast and --full are mutually exclusive");
            return cmd_run(config_path, run_output, fast);
        }
        if (*psd) return cmd_psd(psd_output, psd_nsym, psd_seg, psd_span, psd_beta, psd_seed);
        if (*sweep) {
            scamp.link.waveform = harness::parse_waveform(sweep_wf);
            scamp.link.scheme = harness::parse_scheme(sweep_scheme);
            scamp.link.route = harness::parse_route(sweep_route);
            scamp.link.fast_path = sweep_fast;
            scamp.esn0_db = {sweep_esn0};
            return cmd_sweep(scamp, sweep_ms, sweep_esn0, sweep_output);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
