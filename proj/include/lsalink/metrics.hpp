#pragma once
// evaluation helpers: receiver complexity counts, binomial confidence
// intervals, efficiency figures, waterfall crossings, and Welch spectra.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lsalink/fft.hpp"

namespace lsalink::metrics {

struct ComplexityParams {
    std::size_t nfft = 512;
    std::size_t used = 300;
    std::size_t cir_taps = 39;  // sampled impulse-response length
    std::size_t alpha = 2;      // single-carrier oversampling
};

namespace detail {

inline std::size_t log2_size(std::size_t n) {
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft size must be a power of two");
    std::size_t b = 0;
    while ((std::size_t(1) << b) < n) ++b;
    return b;
}

}  // namespace detail

// multiplications per block: one FFT and a per-bin weight on every antenna
inline std::uint64_t complexity_traditional_ofdm(std::size_t m, const ComplexityParams& p = {}) {
    return std::uint64_t(m) * (p.nfft / 2 * detail::log2_size(p.nfft) + p.used);
}

// time-domain filter per antenna, one shared FFT
inline std::uint64_t complexity_mf_ofdm(std::size_t m, const ComplexityParams& p = {}) {
    return std::uint64_t(m) * p.cir_taps + p.nfft / 2 * detail::log2_size(p.nfft);
}

// oversampled time-domain filter per antenna, no FFT
inline std::uint64_t complexity_sc(std::size_t m, const ComplexityParams& p = {}) {
    return std::uint64_t(m) * p.cir_taps * p.alpha;
}

struct BlerEstimate {
    std::size_t blocks = 0;
    std::size_t block_errors = 0;
    double bler = 0.0;
    double lo = 0.0;  // 95% Wilson interval
    double hi = 1.0;
};

inline BlerEstimate bler_estimate(std::size_t errors, std::size_t trials) {
    if (trials == 0) throw std::invalid_argument("bler_estimate: no trials");
    if (errors > trials) throw std::invalid_argument("bler_estimate: errors exceed trials");
    const double z = 1.959963985;  // two-sided 95%
    const double n = double(trials);
    const double p = double(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    BlerEstimate e;
    e.blocks = trials;
    e.block_errors = errors;
    e.bler = p;
    e.lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
    e.hi = errors == trials ? 1.0 : std::min(1.0, center + half);
    return e;
}

// net information rate over the reference bandwidth, bit/s/Hz
inline double spectral_efficiency(double bits_per_symbol, double code_rate, double bler,
                                  double net_symbol_rate, double ref_bandwidth = 4.5e6) {
    if (ref_bandwidth <= 0.0) throw std::invalid_argument("ref_bandwidth must be positive");
    return bits_per_symbol * code_rate * (1.0 - bler) * net_symbol_rate / ref_bandwidth;
}

// rate per unit transmit energy; cp_overhead > 1 charges the prefix power
inline double relative_energy_efficiency(double se, double esn0_linear, double cp_overhead = 1.0) {
    if (esn0_linear <= 0.0 || cp_overhead <= 0.0)
        throw std::invalid_argument("energy efficiency needs positive energy terms");
    return se / (esn0_linear * cp_overhead);
}

// x where the piecewise log-linear curve through (x, y) falls to the target;
// expects y descending in x at the crossing (waterfall shape)
inline double crossing_point(const std::vector<double>& x, const std::vector<double>& y,
                             double target) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("crossing_point: need matching arrays");
    if (target <= 0.0) throw std::invalid_argument("crossing_point: target must be positive");
    const double floor_y = 1e-12;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = std::max(y[i], floor_y);
        const double b = std::max(y[i + 1], floor_y);
        if (a > target && b <= target) {
            const double la = std::log10(a), lb = std::log10(b), lt = std::log10(target);
            const double t = (lt - la) / (lb - la);
            return x[i] + t * (x[i + 1] - x[i]);
        }
    }
    throw std::invalid_argument("crossing_point: curve never crosses target");
}

struct Psd {
    std::vector<double> freq_hz;  // two-sided, ascending, -fs/2 first
    std::vector<double> power;    // per-Hz density
    double df = 0.0;
};

// Welch estimate: periodic Hann window, 50% overlap by default
inline Psd psd_welch(const cvec& x, double fs, std::size_t seg_len = 4096,
                     double overlap = 0.5) {
    if (fs <= 0.0) throw std::invalid_argument("psd_welch: fs must be positive");
    if (seg_len == 0 || (seg_len & (seg_len - 1)) != 0)
        throw std::invalid_argument("psd_welch: segment length must be a power of two");
    if (x.size() < seg_len) throw std::invalid_argument("psd_welch: signal shorter than segment");
    if (overlap < 0.0 || overlap >= 1.0) throw std::invalid_argument("psd_welch: bad overlap");

    std::vector<double> w(seg_len);
    double u = 0.0;
    for (std::size_t n = 0; n < seg_len; ++n) {
        w[n] = 0.5 * (1.0 - std::cos(2.0 * Fft::pi() * double(n) / double(seg_len)));
        u += w[n] * w[n];
    }
    const std::size_t hop = std::max<std::size_t>(1, std::size_t(double(seg_len) * (1.0 - overlap)));

    Fft fft(seg_len);
    Psd out;
    out.df = fs / double(seg_len);
    out.power.assign(seg_len, 0.0);
    cvec buf(seg_len);
    std::size_t segments = 0;
    for (std::size_t start = 0; start + seg_len <= x.size(); start += hop) {
        for (std::size_t n = 0; n < seg_len; ++n) buf[n] = x[start + n] * w[n];
        fft.forward(buf);
        for (std::size_t k = 0; k < seg_len; ++k) out.power[k] += std::norm(buf[k]);
        ++segments;
    }
    const double scale = 1.0 / (double(segments) * fs * u);
    // shift so negative frequencies come first
    std::vector<double> shifted(seg_len);
    out.freq_hz.resize(seg_len);
    const std::size_t half = seg_len / 2;
    for (std::size_t k = 0; k < seg_len; ++k) {
        const std::size_t src = (k + half) % seg_len;
        shifted[k] = out.power[src] * scale;
        out.freq_hz[k] = (double(k) - double(half)) * out.df;
    }
    out.power.swap(shifted);
    return out;
}

// total power in [f_lo, f_hi) from a psd
inline double band_power(const Psd& p, double f_lo, double f_hi) {
    double acc = 0.0;
    for (std::size_t k = 0; k < p.freq_hz.size(); ++k)
        if (p.freq_hz[k] >= f_lo && p.freq_hz[k] < f_hi) acc += p.power[k] * p.df;
    return acc;
}

}  // namespace lsalink::metrics
