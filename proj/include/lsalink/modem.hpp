// Bit-to-symbol mapping (Gray QPSK / 16QAM, unit average energy), max-log LLR
// demapping with per-symbol noise variances, root-raised-cosine pulse synthesis,
// and white-noise injection.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "channel.hpp"
#include "rng.hpp"

namespace lsalink::modem {

using std::complex;
using std::size_t;
using std::vector;

enum class ModScheme { qpsk, qam16 };

inline size_t bits_per_symbol(ModScheme scheme) {
    return scheme == ModScheme::qpsk ? 2 : 4;
}

inline const char* scheme_name(ModScheme scheme) {
    return scheme == ModScheme::qpsk ? "qpsk" : "qam16";
}

struct SymbolBlock {
    ModScheme scheme = ModScheme::qpsk;
    cvec symbols;
};

// Gray mapping with unit average energy: QPSK ((1-2b0)+j(1-2b1))/sqrt(2);
// 16QAM I from (b0,b2), Q from (b1,b3), levels (+-1,+-3)/sqrt(10), magnitude
// bit 0 selecting the inner level.
inline SymbolBlock modulate_bits(const vector<std::uint8_t>& bits, ModScheme scheme) {
    const size_t bps = bits_per_symbol(scheme);
    if (bits.empty() || bits.size() % bps != 0)
        throw std::invalid_argument("modulate_bits: bit count not a multiple of bits/symbol");
    SymbolBlock block;
    block.scheme = scheme;
    block.symbols.reserve(bits.size() / bps);
    if (scheme == ModScheme::qpsk) {
        const double a = 1.0 / std::sqrt(2.0);
        for (size_t i = 0; i < bits.size(); i += 2)
            block.symbols.emplace_back(a * (1.0 - 2.0 * bits[i]), a * (1.0 - 2.0 * bits[i + 1]));
    } else {
        const double a = 1.0 / std::sqrt(10.0);
        for (size_t i = 0; i < bits.size(); i += 4) {
            const double re = (1.0 - 2.0 * bits[i]) * (2.0 - (1.0 - 2.0 * bits[i + 2]));
            const double im = (1.0 - 2.0 * bits[i + 1]) * (2.0 - (1.0 - 2.0 * bits[i + 3]));
            block.symbols.emplace_back(a * re, a * im);
        }
    }
    return block;
}

namespace detail {

// Max-log per-axis metric: (min distance^2 over bit=1 set) - (over bit=0 set),
// so positive LLR favors bit 0.
inline double axis_llr_sign16(double u) {
    const double a = 1.0 / std::sqrt(10.0);
    const double d0 = std::min((u - a) * (u - a), (u - 3 * a) * (u - 3 * a));
    const double d1 = std::min((u + a) * (u + a), (u + 3 * a) * (u + 3 * a));
    return d1 - d0;
}

inline double axis_llr_mag16(double u) {
    const double a = 1.0 / std::sqrt(10.0);
    const double d0 = std::min((u - a) * (u - a), (u + a) * (u + a));
    const double d1 = std::min((u - 3 * a) * (u - 3 * a), (u + 3 * a) * (u + 3 * a));
    return d1 - d0;
}

}  // namespace detail

// LLRs in mapping order per symbol; noise_var holds one effective complex-noise
// variance per received symbol (use a single-element vector for a common value).
inline vector<double> llr_demap(const cvec& symbols, ModScheme scheme,
                                const vector<double>& noise_var) {
    if (noise_var.size() != 1 && noise_var.size() != symbols.size())
        throw std::invalid_argument("llr_demap: noise variance count mismatch");
    for (double v : noise_var)
        if (!(v > 0.0)) throw std::invalid_argument("llr_demap: noise variance must be positive");
    vector<double> llr;
    llr.reserve(symbols.size() * bits_per_symbol(scheme));
    for (size_t i = 0; i < symbols.size(); ++i) {
        const double inv = 1.0 / (noise_var.size() == 1 ? noise_var[0] : noise_var[i]);
        const double u = symbols[i].real(), v = symbols[i].imag();
        if (scheme == ModScheme::qpsk) {
            const double a = 2.0 * std::sqrt(2.0);
            llr.push_back(a * u * inv);
            llr.push_back(a * v * inv);
        } else {
            llr.push_back(detail::axis_llr_sign16(u) * inv);
            llr.push_back(detail::axis_llr_sign16(v) * inv);
            llr.push_back(detail::axis_llr_mag16(u) * inv);
            llr.push_back(detail::axis_llr_mag16(v) * inv);
        }
    }
    return llr;
}

inline vector<std::uint8_t> hard_bits(const vector<double>& llr) {
    vector<std::uint8_t> bits(llr.size());
    for (size_t i = 0; i < llr.size(); ++i) bits[i] = llr[i] < 0.0 ? 1 : 0;
    return bits;
}

// Adds i.i.d. circular complex Gaussian noise, E|w|^2 = n0 per sample.
inline void add_awgn(cvec& samples, double n0, Rng& rng) {
    if (n0 < 0.0) throw std::invalid_argument("add_awgn: negative noise density");
    if (n0 == 0.0) return;
    for (auto& s : samples) s += rng.cgaussian(n0);
}

// Continuous-time root raised cosine, t in symbol periods, unnormalized peak.
inline double rrc_value(double t, double beta) {
    const double pi = Fft::pi();
    if (std::abs(t) < 1e-10) return 1.0 + beta * (4.0 / pi - 1.0);
    if (beta > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * beta)) < 1e-10) {
        const double s = pi / (4.0 * beta);
        return (beta / std::sqrt(2.0)) *
               ((1.0 + 2.0 / pi) * std::sin(s) + (1.0 - 2.0 / pi) * std::cos(s));
    }
    const double num = std::sin(pi * t * (1.0 - beta)) +
                       4.0 * beta * t * std::cos(pi * t * (1.0 + beta));
    const double den = pi * t * (1.0 - std::pow(4.0 * beta * t, 2.0));
    return num / den;
}

// Continuous-time raised cosine (combined tx+rx pulse), peak 1, t in symbols.
inline double rc_value(double t, double beta) {
    const double pi = Fft::pi();
    const double sinc = std::abs(t) < 1e-10 ? 1.0 : std::sin(pi * t) / (pi * t);
    if (beta == 0.0) return sinc;
    if (std::abs(std::abs(t) - 1.0 / (2.0 * beta)) < 1e-10) {
        const double u = 1.0 / (2.0 * beta);
        const double s = std::abs(u) < 1e-10 ? 1.0 : std::sin(pi * u) / (pi * u);
        return (pi / 4.0) * s;
    }
    return sinc * std::cos(pi * beta * t) / (1.0 - std::pow(2.0 * beta * t, 2.0));
}

struct PulseShape {
    double beta = 0.0;
    size_t span = 0;   // half-width in symbol periods
    size_t alpha = 0;  // samples per symbol
    vector<double> taps;  // length 2*span*alpha + 1, unit energy, peak centered
};

inline PulseShape rrc_taps(double beta, size_t span_symbols, size_t alpha) {
    if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("rrc_taps: beta outside [0,1]");
    if (span_symbols == 0 || alpha == 0)
        throw std::invalid_argument("rrc_taps: span and alpha must be positive");
    PulseShape p;
    p.beta = beta;
    p.span = span_symbols;
    p.alpha = alpha;
    const size_t len = 2 * span_symbols * alpha + 1;
    p.taps.resize(len);
    double energy = 0.0;
    for (size_t n = 0; n < len; ++n) {
        const double t = (double(n) - double(span_symbols * alpha)) / double(alpha);
        p.taps[n] = rrc_value(t, beta);
        energy += p.taps[n] * p.taps[n];
    }
    const double scale = 1.0 / std::sqrt(energy);
    for (auto& v : p.taps) v *= scale;
    return p;
}

// Combined pulse sampler for the composite-channel discretization: raised cosine
// scaled so its centered alpha-grid samples have unit energy, truncated to the
// same span as the RRC pair it stands in for.
inline channel::PulseSampler rc_pulse_sampler(double beta, size_t span_symbols,
                                              double symbol_period_s, size_t alpha) {
    double energy = 0.0;
    for (long n = -long(span_symbols * alpha); n <= long(span_symbols * alpha); ++n) {
        const double v = rc_value(double(n) / double(alpha), beta);
        energy += v * v;
    }
    const double scale = 1.0 / std::sqrt(energy);
    channel::PulseSampler ps;
    ps.half_width = double(span_symbols) * symbol_period_s;
    ps.value = [beta, symbol_period_s, scale](double t_seconds) {
        return scale * rc_value(t_seconds / symbol_period_s, beta);
    };
    return ps;
}

}  // namespace lsalink::modem
