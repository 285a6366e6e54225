#include <catch2/catch_amalgamated.hpp>

#include "lsalink/modem.hpp"
#include "lsalink/rng.hpp"
#include "lsalink/sc_link.hpp"

using namespace lsalink;
using namespace lsalink::sc;

namespace {

cvec random_qpsk(std::size_t n, Rng& rng) {
    std::vector<std::uint8_t> bits(2 * n);
    for (auto& b : bits) b = rng.bit() ? 1 : 0;
    return modem::modulate_bits(bits, modem::ModScheme::qpsk).symbols;
}

channel::TapDelayProfile single_tap() {
    channel::TapDelayProfile p;
    p.delay_s = {0.0};
    p.power_db = {0.0};
    p.power_lin = {1.0};
    return p;
}

double mean_isi_floor(const ScTemplate& t, std::size_t m_ant, std::size_t draws,
                      std::uint64_t seed, double* mean_gain = nullptr) {
    Rng rng(seed);
    const auto prof = channel::etu_profile();
    double floor_sum = 0.0, gain_sum = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
        const auto real = channel::draw_channel(prof, m_ant, rng);
        const auto f = build_filter(t, real);
        floor_sum += isi_budget(t, f).self_power;
        gain_sum += f.gain.real() / double(m_ant);
    }
    if (mean_gain) *mean_gain = gain_sum / double(draws);
    return floor_sum / double(draws);
}

}  // namespace

TEST_CASE("config defaults and validation", "[sc_link]") {
    ScConfig cfg;
    REQUIRE_NOTHROW(cfg.validate());
    REQUIRE(cfg.symbol_rate == Catch::Approx(4.173913043e6));
    REQUIRE(cfg.sample_rate() == Catch::Approx(8.347826087e6));
    REQUIRE(cfg.symbol_period() == Catch::Approx(2.396e-7).epsilon(1e-3));

    ScConfig bad = cfg;
    bad.beta = 0.0;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.alpha = 0;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.mf_taps = 1;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

    REQUIRE(frame_guard(cfg, channel::etu_profile()) == 34);
}

TEST_CASE("template geometry on the etu profile", "[sc_link]") {
    const auto prof = channel::etu_profile();
    ScConfig cfg;
    const auto t = make_template(prof, cfg);
    const std::size_t snap =
        channel::snapped_index(prof.delay_s.back(), cfg.sample_rate());
    REQUIRE(snap == 42);
    REQUIRE(t.col_length() == 2 * t.chan_cols.origin + snap + 1);
    REQUIRE(t.win_taps == 78);
    REQUIRE(t.win_start + t.win_taps <= t.col_length());

    // window must capture nearly all profile-averaged template energy
    double tot = 0.0, win = 0.0;
    for (std::size_t l = 0; l < prof.taps(); ++l)
        for (std::size_t n = 0; n < t.col_length(); ++n) {
            const double e = prof.power_lin[l] * t.tmpl_cols.cols[l][n] * t.tmpl_cols.cols[l][n];
            tot += e;
            if (n >= t.win_start && n < t.win_start + t.win_taps) win += e;
        }
    REQUIRE(win / tot > 0.999);
}

TEST_CASE("single-tap composite filter is the pulse-pair floor", "[sc_link]") {
    ScConfig cfg;
    const auto t = make_template(single_tap(), cfg);
    REQUIRE(t.win_taps == t.col_length());  // short channel: window is the support
    channel::ChannelRealization real;
    real.profile = single_tap();
    real.gains = {{{1.0, 0.0}}};
    const auto f = build_filter(t, real);
    REQUIRE(f.gain.real() == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(f.gain.imag() == Catch::Approx(0.0).margin(1e-12));
    const auto b = isi_budget(t, f);
    REQUIRE(b.noise_scale == Catch::Approx(1.0).margin(1e-12));
    // residual ISI of the truncated nyquist pair correlated with itself
    REQUIRE(b.self_power == Catch::Approx(0.019702).margin(2e-4));
}

TEST_CASE("single-tap bandlimited filter has no self interference", "[sc_link]") {
    ScConfig cfg;
    cfg.tmpl = TemplateKind::bandlimited;
    const auto t = make_template(single_tap(), cfg);
    channel::ChannelRealization real;
    real.profile = single_tap();
    real.gains = {{{1.0, 0.0}}};
    const auto f = build_filter(t, real);
    // the sampling template only collects the on-grid pulse value
    REQUIRE(f.gain.real() == Catch::Approx(0.72739).margin(5e-4));
    REQUIRE(f.tmpl_energy == Catch::Approx(1.0).margin(1e-12));
    const auto b = isi_budget(t, f);
    REQUIRE(b.self_power < 1e-10);  // nyquist zeros at every symbol lag
    REQUIRE(b.noise_scale == Catch::Approx(1.8900).margin(2e-3));
}

TEST_CASE("budget is invariant to gain scaling and rotation", "[sc_link]") {
    const auto prof = channel::etu_profile();
    ScConfig cfg;
    const auto t = make_template(prof, cfg);
    Rng rng(61);
    auto real = channel::draw_channel(prof, 4, rng);
    const auto f0 = build_filter(t, real);
    const auto b0 = isi_budget(t, f0);
    const std::complex<double> rot = 2.0 * std::exp(std::complex<double>(0.0, 0.7));
    for (auto& row : real.gains)
        for (auto& g : row) g *= rot;
    const auto f1 = build_filter(t, real);
    const auto b1 = isi_budget(t, f1);
    REQUIRE(b1.self_power == Catch::Approx(b0.self_power).epsilon(1e-10));
    REQUIRE(b1.noise_scale == Catch::Approx(b0.noise_scale / 4.0).epsilon(1e-10));
}

TEST_CASE("composite isi floor saturates with antennas", "[sc_link]") {
    const auto prof = channel::etu_profile();
    ScConfig cfg;
    const auto t = make_template(prof, cfg);
    double g10 = 0.0, g160 = 0.0;
    const double f10 = mean_isi_floor(t, 10, 200, 62, &g10);
    const double f160 = mean_isi_floor(t, 160, 200, 63, &g160);
    // floor ~ 0.0197 + 0.70/M: a 16x antenna increase buys well under 16x
    REQUIRE(f10 == Catch::Approx(0.090).margin(0.010));
    REQUIRE(f160 == Catch::Approx(0.024).margin(0.003));
    REQUIRE(f10 / f160 > 3.1);
    REQUIRE(f10 / f160 < 4.5);
    REQUIRE(g10 == Catch::Approx(1.0).margin(0.05));
    REQUIRE(g160 == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("bandlimited isi scales inversely with antennas", "[sc_link]") {
    const auto prof = channel::etu_profile();
    ScConfig cfg;
    cfg.tmpl = TemplateKind::bandlimited;
    const auto t = make_template(prof, cfg);
    const double f10 = mean_isi_floor(t, 10, 200, 64);
    const double f160 = mean_isi_floor(t, 160, 200, 65);
    REQUIRE(10.0 * f10 == Catch::Approx(0.66).margin(0.10));
    REQUIRE(160.0 * f160 == Catch::Approx(0.66).margin(0.10));
    REQUIRE(f10 / f160 > 13.0);
    REQUIRE(f10 / f160 < 20.0);
}

TEST_CASE("two-tap template energy matches the analytic expectation", "[sc_link]") {
    ScConfig cfg;
    channel::TapDelayProfile p2;
    const double ts = cfg.symbol_period();
    p2.delay_s = {0.0, 2.0 * ts};
    p2.power_db = {-3.010299957, -3.010299957};
    p2.power_lin = {0.5, 0.5};
    const auto t = make_template(p2, cfg);
    double expect = 0.0;
    for (std::size_t l = 0; l < 2; ++l)
        for (std::size_t n = t.win_start; n < t.win_start + t.win_taps; ++n)
            expect += p2.power_lin[l] * t.tmpl_cols.cols[l][n] * t.tmpl_cols.cols[l][n];
    Rng rng(66);
    double mc = 0.0;
    const std::size_t draws = 1500, m_ant = 8;
    for (std::size_t d = 0; d < draws; ++d) {
        const auto real = channel::draw_channel(p2, m_ant, rng);
        mc += build_filter(t, real).tmpl_energy / double(m_ant);
    }
    mc /= double(draws);
    REQUIRE(mc == Catch::Approx(expect).epsilon(0.02));
}

TEST_CASE("filter output is exactly the cross-gain expansion", "[sc_link]") {
    const auto prof = channel::etu_profile();
    ScConfig cfg;
    const auto t = make_template(prof, cfg);
    Rng rng(67);
    const auto real = channel::draw_channel(prof, 4, rng);
    const auto f = build_filter(t, real);
    const std::size_t guard = frame_guard(cfg, prof);
    const std::size_t payload = 60;
    const auto syms = random_qpsk(payload + 2 * guard, rng);
    const auto rx = synthesize(syms, t, f);
    const auto est = run_filter(rx, t, f, syms.size());

    const long reach = long(t.col_length() / cfg.alpha) + 1;
    for (std::size_t i = guard; i < guard + payload; ++i) {
        std::complex<double> pred(0.0, 0.0);
        for (long d = -reach; d <= reach; ++d) {
            const long j = long(i) - d;
            if (j < 0 || j >= long(syms.size())) continue;
            pred += cross_gain(t, f, f, d) * syms[std::size_t(j)];
        }
        pred /= f.gain;
        REQUIRE(std::abs(est[i] - pred) < 1e-10);
    }
}

TEST_CASE("noiseless payload error power matches the budget", "[sc_link]") {
    const auto prof = channel::etu_profile();
    ScConfig cfg;
    const auto t = make_template(prof, cfg);
    Rng rng(68);
    const auto real = channel::draw_channel(prof, 8, rng);
    const auto f = build_filter(t, real);
    const auto b = isi_budget(t, f);
    const std::size_t guard = frame_guard(cfg, prof);
    const std::size_t payload = 900;
    double err = 0.0;
    for (int rep = 0; rep < 4; ++rep) {
        const auto syms = random_qpsk(payload + 2 * guard, rng);
        const auto rx = synthesize(syms, t, f);
        const auto est = run_filter(rx, t, f, syms.size());
        for (std::size_t i = guard; i < guard + payload; ++i)
            err += std::norm(est[i] - syms[i]);
    }
    err /= double(4 * payload);
    REQUIRE(err == Catch::Approx(b.self_power).epsilon(0.15));
}

TEST_CASE("noisy payload error power adds the scaled noise term", "[sc_link]") {
    const auto prof = channel::etu_profile();
    ScConfig cfg;
    const auto t = make_template(prof, cfg);
    Rng rng(69);
    const auto real = channel::draw_channel(prof, 8, rng);
    const auto f = build_filter(t, real);
    const auto b = isi_budget(t, f);
    const double n0 = 0.5;
    const std::size_t guard = frame_guard(cfg, prof);
    const std::size_t payload = 900;
    double err = 0.0;
    for (int rep = 0; rep < 4; ++rep) {
        const auto syms = random_qpsk(payload + 2 * guard, rng);
        auto rx = synthesize(syms, t, f);
        for (auto& stream : rx) modem::add_awgn(stream, n0, rng);
        const auto est = run_filter(rx, t, f, syms.size());
        for (std::size_t i = guard; i < guard + payload; ++i)
            err += std::norm(est[i] - syms[i]);
    }
    err /= double(4 * payload);
    REQUIRE(err == Catch::Approx(b.self_power + n0 * b.noise_scale).epsilon(0.15));
}

TEST_CASE("two-user leakage matches the cross budget", "[sc_link]") {
    const auto prof = channel::etu_profile();
    ScConfig cfg;
    const auto t = make_template(prof, cfg);
    Rng rng(70);
    const auto real_a = channel::draw_channel(prof, 8, rng);
    const auto real_b = channel::draw_channel(prof, 8, rng);
    const auto fa = build_filter(t, real_a);
    const auto fb = build_filter(t, real_b);
    const double cross = iui_power(t, fa, fb);
    REQUIRE(cross > 0.0);

    const std::size_t guard = frame_guard(cfg, prof);
    const std::size_t payload = 900;
    double err = 0.0;
    for (int rep = 0; rep < 4; ++rep) {
        const auto syms_b = random_qpsk(payload + 2 * guard, rng);
        const auto rx = synthesize(syms_b, t, fb);  // only user b transmits
        const auto est = run_filter(rx, t, fa, syms_b.size());
        for (std::size_t i = guard; i < guard + payload; ++i) err += std::norm(est[i]);
    }
    err /= double(4 * payload);
    REQUIRE(err == Catch::Approx(cross).epsilon(0.15));
}

TEST_CASE("pulse-shaped waveform has unit per-symbol energy", "[sc_link]") {
    ScConfig cfg;
    const cvec one = {{1.0, 0.0}};
    const auto wave = sc_tx(one, cfg);
    REQUIRE(wave.size() == 2 * cfg.span * cfg.alpha + 1);
    double e = 0.0;
    for (const auto& v : wave) e += std::norm(v);
    REQUIRE(e == Catch::Approx(1.0).margin(1e-12));

    Rng rng(71);
    const auto syms = random_qpsk(500, rng);
    const auto w = sc_tx(syms, cfg);
    REQUIRE(w.size() == cfg.alpha * 499 + 2 * cfg.span * cfg.alpha + 1);
    double tot = 0.0;
    for (const auto& v : w) tot += std::norm(v);
    REQUIRE(tot == Catch::Approx(500.0).epsilon(0.05));

    REQUIRE_THROWS_AS(sc_tx(cvec{}, cfg), std::invalid_argument);
}

TEST_CASE("filter rejects mismatched inputs", "[sc_link]") {
    const auto prof = channel::etu_profile();
    ScConfig cfg;
    const auto t = make_template(prof, cfg);
    Rng rng(72);
    const auto real = channel::draw_channel(prof, 2, rng);
    const auto f = build_filter(t, real);
    const auto syms = random_qpsk(80, rng);
    const auto rx = synthesize(syms, t, f);
    REQUIRE_THROWS_AS(run_filter({rx[0]}, t, f, syms.size()), std::invalid_argument);
    REQUIRE_THROWS_AS(run_filter(rx, t, f, syms.size() + 50), std::invalid_argument);
    REQUIRE_THROWS_AS(synthesize(cvec{}, t, f), std::invalid_argument);
}
