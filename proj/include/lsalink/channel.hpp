// WSSUS tapped-delay-line channel model: profile data, per-antenna Rayleigh
// draws, frequency response on arbitrary grids, and the two discretizations
// used by the receivers (grid-snapped CIR, pulse-composite oversampled CIR).
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fft.hpp"
#include "rng.hpp"

namespace lsalink::channel {

using std::complex;
using std::size_t;
using std::vector;

struct TapDelayProfile {
    vector<double> delay_s;    // ascending, first tap at 0
    vector<double> power_db;   // as published
    vector<double> power_lin;  // normalized to unit sum

    size_t taps() const { return delay_s.size(); }

    void validate() const {
        if (delay_s.empty() || delay_s.size() != power_db.size() ||
            delay_s.size() != power_lin.size())
            throw std::invalid_argument("profile: empty or mismatched tap arrays");
        double sum = 0.0;
        for (size_t l = 0; l < taps(); ++l) {
            if (delay_s[l] < 0.0) throw std::invalid_argument("profile: negative delay");
            if (l > 0 && delay_s[l] < delay_s[l - 1])
                throw std::invalid_argument("profile: delays not ascending");
            if (power_lin[l] <= 0.0) throw std::invalid_argument("profile: nonpositive power");
            sum += power_lin[l];
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("profile: tap powers must sum to 1");
    }
};

// Extended Typical Urban, 9 taps, unit-power normalized.
inline TapDelayProfile etu_profile() {
    TapDelayProfile p;
    p.delay_s = {0e-9, 50e-9, 120e-9, 200e-9, 230e-9, 500e-9, 1600e-9, 2300e-9, 5000e-9};
    p.power_db = {-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, -3.0, -5.0, -7.0};
    double sum = 0.0;
    for (double db : p.power_db) sum += std::pow(10.0, db / 10.0);
    for (double db : p.power_db) p.power_lin.push_back(std::pow(10.0, db / 10.0) / sum);
    p.validate();
    return p;
}

struct ChannelRealization {
    TapDelayProfile profile;
    vector<cvec> gains;  // [antenna][tap], i.i.d. CN(0, power_lin[l])

    size_t antennas() const { return gains.size(); }
    size_t taps() const { return profile.taps(); }
};

inline ChannelRealization draw_channel(const TapDelayProfile& profile, size_t antennas,
                                       Rng& rng) {
    profile.validate();
    if (antennas == 0) throw std::invalid_argument("draw_channel: antennas must be positive");
    ChannelRealization real;
    real.profile = profile;
    real.gains.resize(antennas);
    for (auto& row : real.gains) {
        row.resize(profile.taps());
        for (size_t l = 0; l < profile.taps(); ++l)
            row[l] = rng.cgaussian(profile.power_lin[l]);
    }
    return real;
}

// As draw_channel, but antenna m always consumes the same substream of `seed`
// regardless of the total count, so sweeps over M reuse fading draws.
inline ChannelRealization draw_channel_paired(const TapDelayProfile& profile, size_t antennas,
                                              std::uint64_t seed) {
    profile.validate();
    if (antennas == 0) throw std::invalid_argument("draw_channel: antennas must be positive");
    ChannelRealization real;
    real.profile = profile;
    real.gains.resize(antennas);
    for (size_t m = 0; m < antennas; ++m) {
        Rng rng(mix_seed(seed, m));
        real.gains[m].resize(profile.taps());
        for (size_t l = 0; l < profile.taps(); ++l)
            real.gains[m][l] = rng.cgaussian(profile.power_lin[l]);
    }
    return real;
}

// H_m(f) = sum_l c_{m,l} e^{-j 2 pi f tau_l} evaluated on an arbitrary grid.
inline vector<cvec> cfr_on_grid(const ChannelRealization& real, const vector<double>& freqs_hz) {
    vector<cvec> out(real.antennas(), cvec(freqs_hz.size()));
    const double two_pi = 2.0 * Fft::pi();
    for (size_t m = 0; m < real.antennas(); ++m)
        for (size_t k = 0; k < freqs_hz.size(); ++k) {
            complex<double> acc = 0.0;
            for (size_t l = 0; l < real.taps(); ++l) {
                const double ang = -two_pi * freqs_hz[k] * real.profile.delay_s[l];
                acc += real.gains[m][l] * complex<double>(std::cos(ang), std::sin(ang));
            }
            out[m][k] = acc;
        }
    return out;
}

enum class DiscretizeKind { grid_snapped, pulse_composite };

struct DiscreteChannel {
    DiscretizeKind kind = DiscretizeKind::grid_snapped;
    double sample_rate = 0.0;
    size_t origin = 0;  // index whose physical time is t = 0 (composite kind only)
    vector<cvec> taps;  // [antenna][sample index]

    size_t antennas() const { return taps.size(); }
    size_t length() const { return taps.empty() ? 0 : taps.front().size(); }
};

inline size_t snapped_index(double delay_s, double sample_rate) {
    return size_t(std::llround(delay_s * sample_rate));
}

// Nearest-grid snapping; coincident taps add coherently.
inline DiscreteChannel discretize_grid(const ChannelRealization& real, double sample_rate) {
    if (sample_rate <= 0.0) throw std::invalid_argument("discretize: sample_rate must be positive");
    DiscreteChannel d;
    d.kind = DiscretizeKind::grid_snapped;
    d.sample_rate = sample_rate;
    const size_t len = snapped_index(real.profile.delay_s.back(), sample_rate) + 1;
    d.taps.assign(real.antennas(), cvec(len, 0.0));
    for (size_t m = 0; m < real.antennas(); ++m)
        for (size_t l = 0; l < real.taps(); ++l)
            d.taps[m][snapped_index(real.profile.delay_s[l], sample_rate)] += real.gains[m][l];
    return d;
}

// Continuous pulse with finite support |t| <= half_width, peak at t = 0.
struct PulseSampler {
    std::function<double(double)> value;
    double half_width = 0.0;
};

// Per-tap sampled pulse columns on a shared timeline.  Column l holds
// pulse(t_n - tau_l) for n in [0, length), with t_n = (n - origin)/fs.
// Precomputing the columns keeps transcendental evaluation out of trial loops.
struct CompositeColumns {
    double sample_rate = 0.0;
    size_t origin = 0;
    vector<vector<double>> cols;  // [tap][sample index]

    size_t length() const { return cols.empty() ? 0 : cols.front().size(); }
};

inline CompositeColumns composite_columns(const TapDelayProfile& profile, double sample_rate,
                                          const PulseSampler& pulse) {
    if (sample_rate <= 0.0) throw std::invalid_argument("discretize: sample_rate must be positive");
    if (!pulse.value || pulse.half_width <= 0.0)
        throw std::invalid_argument("discretize: composite kind needs a pulse");
    CompositeColumns cc;
    cc.sample_rate = sample_rate;
    cc.origin = size_t(std::ceil(pulse.half_width * sample_rate));
    const size_t len =
        2 * cc.origin + snapped_index(profile.delay_s.back(), sample_rate) + 1;
    cc.cols.assign(profile.taps(), vector<double>(len, 0.0));
    for (size_t l = 0; l < profile.taps(); ++l)
        for (size_t n = 0; n < len; ++n) {
            const double t = (double(n) - double(cc.origin)) / sample_rate - profile.delay_s[l];
            if (std::abs(t) <= pulse.half_width) cc.cols[l][n] = pulse.value(t);
        }
    return cc;
}

inline DiscreteChannel build_composite(const CompositeColumns& cc, const ChannelRealization& real) {
    if (cc.cols.size() != real.taps())
        throw std::invalid_argument("build_composite: column/tap count mismatch");
    DiscreteChannel d;
    d.kind = DiscretizeKind::pulse_composite;
    d.sample_rate = cc.sample_rate;
    d.origin = cc.origin;
    d.taps.assign(real.antennas(), cvec(cc.length(), 0.0));
    for (size_t m = 0; m < real.antennas(); ++m)
        for (size_t l = 0; l < real.taps(); ++l) {
            const complex<double> g = real.gains[m][l];
            const auto& col = cc.cols[l];
            for (size_t n = 0; n < col.size(); ++n) d.taps[m][n] += g * col[n];
        }
    return d;
}

// g_m[n] = sum_l c_{m,l} pulse(t_n - tau_l); full support, origin recorded.
inline DiscreteChannel discretize_composite(const ChannelRealization& real, double sample_rate,
                                            const PulseSampler& pulse) {
    return build_composite(composite_columns(real.profile, sample_rate, pulse), real);
}

inline DiscreteChannel discretize(const ChannelRealization& real, double sample_rate,
                                  DiscretizeKind kind, const PulseSampler* pulse = nullptr) {
    if (kind == DiscretizeKind::grid_snapped) return discretize_grid(real, sample_rate);
    if (!pulse) throw std::invalid_argument("discretize: composite kind needs a pulse");
    return discretize_composite(real, sample_rate, *pulse);
}

// max over tap pairs l != l1 of |(1/M) c[l]^H c[l1]|; the asymptotic-orthogonality
// figure of merit (decays like 1/sqrt(M)).
inline double orthogonality_defect(const ChannelRealization& real) {
    const size_t L = real.taps();
    const double inv_m = 1.0 / double(real.antennas());
    double worst = 0.0;
    for (size_t l = 0; l + 1 < L; ++l)
        for (size_t l1 = l + 1; l1 < L; ++l1) {
            complex<double> acc = 0.0;
            for (size_t m = 0; m < real.antennas(); ++m)
                acc += std::conj(real.gains[m][l]) * real.gains[m][l1];
            worst = std::max(worst, std::abs(acc) * inv_m);
        }
    return worst;
}

}  // namespace lsalink::channel
