#pragma once
// transmit spectrum estimates for both waveforms, plus small lookup helpers
// for band means and offset densities

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lsalink/harness.hpp"
#include "lsalink/metrics.hpp"

namespace lsalink::harness {

// welch psd of a stream of random cp-ofdm symbols on the used bins
inline metrics::Psd tx_psd_ofdm(const LinkConfig& link, std::size_t nsym, std::uint64_t seed,
                                std::size_t seg_len = 4096) {
    Rng r(mix_seed(seed, 0x7073646fULL));
    const cvec slots = detail::random_symbols(nsym * link.ofdm.used, link.scheme, r);
    const cvec x = ofdm::ofdm_tx(slots, link.ofdm);
    return metrics::psd_welch(x, link.ofdm.sample_rate, seg_len);
}

// welch psd of a root-raised-cosine shaped symbol train at alpha samples/symbol
inline metrics::Psd tx_psd_sc(const LinkConfig& link, std::size_t nsym, std::uint64_t seed,
                              std::size_t seg_len = 4096) {
    const LinkConfig n = link.normalized();
    Rng r(mix_seed(seed, 0x70736473ULL));
    const cvec syms = detail::random_symbols(nsym, n.scheme, r);
    const cvec x = sc::sc_tx(syms, n.sc);
    return metrics::psd_welch(x, n.sc.sample_rate(), seg_len);
}

// occupied half-bandwidths: ofdm spans the used bins, sc the rolled-off pulse
inline double ofdm_half_bw(const LinkConfig& link) {
    return 0.5 * double(link.ofdm.used) * link.ofdm.sample_rate / double(link.ofdm.nfft);
}
inline double sc_inner_half_bw(const LinkConfig& link) {
    return 0.5 * (1.0 - link.sc.beta) * link.normalized().sc.symbol_rate;
}

// mean density over |f| <= f_half
inline double inband_mean(const metrics::Psd& p, double f_half) {
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < p.freq_hz.size(); ++i)
        if (std::abs(p.freq_hz[i]) <= f_half) {
            acc += p.power[i];
            ++n;
        }
    if (n == 0) throw std::invalid_argument("inband_mean: no bins inside the band");
    return acc / double(n);
}

// density in db relative to the in-band mean
inline std::vector<double> to_dbr(const metrics::Psd& p, double f_half) {
    const double mean = inband_mean(p, f_half);
    std::vector<double> out(p.power.size());
    for (std::size_t i = 0; i < p.power.size(); ++i)
        out[i] = 10.0 * std::log10(std::max(p.power[i], 1e-300) / mean);
    return out;
}

// mean density near an offset, averaged over [f0 - halfwin, f0 + halfwin]
inline double density_near(const metrics::Psd& p, double f0, double halfwin) {
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < p.freq_hz.size(); ++i)
        if (std::abs(p.freq_hz[i] - f0) <= halfwin) {
            acc += p.power[i];
            ++n;
        }
    if (n == 0) throw std::invalid_argument("density_near: window missed every bin");
    return acc / double(n);
}

// linear mean per sub-band, nb equal slices of [-f_half, f_half]; smooths the
// periodogram ripple before judging flatness
inline std::vector<double> band_means(const metrics::Psd& p, double f_half, std::size_t nb) {
    if (nb == 0) throw std::invalid_argument("band_means: need at least one band");
    std::vector<double> acc(nb, 0.0);
    std::vector<std::size_t> cnt(nb, 0);
    const double width = 2.0 * f_half / double(nb);
    for (std::size_t i = 0; i < p.freq_hz.size(); ++i) {
        const double f = p.freq_hz[i];
        if (f < -f_half || f >= f_half) continue;
        const std::size_t b = std::size_t((f + f_half) / width);
        acc[b] += p.power[i];
        ++cnt[b];
    }
    std::vector<double> out(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        if (cnt[b] == 0) throw std::invalid_argument("band_means: empty sub-band");
        out[b] = acc[b] / double(cnt[b]);
    }
    return out;
}

}  // namespace lsalink::harness
