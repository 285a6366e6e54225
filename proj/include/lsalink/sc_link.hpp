#pragma once
// single-carrier chain at alpha samples per symbol. The link model works on
// the discrete-time equivalent channel: each tap contributes a Nyquist pulse
// (raised cosine) at its physical delay, the antenna streams carry white
// noise, and the receiver correlates against a truncated per-antenna matched
// filter. Root-raised-cosine shaping is kept separate for spectrum studies.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lsalink/channel.hpp"
#include "lsalink/modem.hpp"

namespace lsalink::sc {

enum class TemplateKind { composite, bandlimited };

struct ScConfig {
    double symbol_rate = 300.0 * 7.68e6 / 552.0;  // match OFDM net symbol rate
    std::size_t alpha = 2;                        // samples per symbol
    double beta = 0.22;                           // pulse roll-off
    std::size_t span = 12;                        // pulse span, symbols each side
    std::size_t mf_taps = 78;                     // truncated matched-filter length
    TemplateKind tmpl = TemplateKind::composite;

    void validate() const {
        if (symbol_rate <= 0.0) throw std::invalid_argument("symbol_rate must be positive");
        if (alpha == 0) throw std::invalid_argument("alpha must be positive");
        if (beta <= 0.0 || beta > 1.0) throw std::invalid_argument("beta must be in (0,1]");
        if (span == 0) throw std::invalid_argument("span must be positive");
        if (mf_taps < alpha) throw std::invalid_argument("mf_taps too short");
    }

    double sample_rate() const { return double(alpha) * symbol_rate; }
    double symbol_period() const { return 1.0 / symbol_rate; }
};

// ideal bandlimited interpolation kernel on the alpha-rate grid
inline channel::PulseSampler sinc_pulse_sampler(double sample_rate, double half_width_s) {
    channel::PulseSampler p;
    p.half_width = half_width_s;
    p.value = [sample_rate](double t) {
        const double x = Fft::pi() * sample_rate * t;
        return std::abs(x) < 1e-12 ? 1.0 : std::sin(x) / x;
    };
    return p;
}

// guard symbols needed so payload symbols see the full interference picture
inline std::size_t frame_guard(const ScConfig& cfg, const channel::TapDelayProfile& prof) {
    const double tau_max = prof.delay_s.back();
    return cfg.span + std::size_t(std::ceil(tau_max * cfg.symbol_rate)) + 1;
}

// fixed per-campaign data: propagation columns, template columns, window
struct ScTemplate {
    ScConfig cfg;
    channel::CompositeColumns chan_cols;  // raised-cosine composite (propagation)
    channel::CompositeColumns tmpl_cols;  // matched-filter pulse basis
    std::size_t win_start = 0;            // truncation window offset into columns
    std::size_t win_taps = 0;             // effective window length (<= cfg.mf_taps)

    std::size_t col_length() const { return chan_cols.length(); }
};

inline ScTemplate make_template(const channel::TapDelayProfile& prof, const ScConfig& cfg) {
    cfg.validate();
    prof.validate();
    ScTemplate t;
    t.cfg = cfg;
    const double ts = cfg.symbol_period();
    const auto rc = modem::rc_pulse_sampler(cfg.beta, cfg.span, ts, cfg.alpha);
    t.chan_cols = channel::composite_columns(prof, cfg.sample_rate(), rc);
    if (cfg.tmpl == TemplateKind::composite) {
        t.tmpl_cols = t.chan_cols;
    } else {
        const auto bl = sinc_pulse_sampler(cfg.sample_rate(), double(cfg.span) * ts);
        t.tmpl_cols = channel::composite_columns(prof, cfg.sample_rate(), bl);
    }
    const std::size_t len = t.col_length();
    t.win_taps = std::min(cfg.mf_taps, len);  // short channels fit entirely
    // place the window where the profile-average template energy is largest
    std::vector<double> e(len, 0.0);
    for (std::size_t l = 0; l < prof.taps(); ++l)
        for (std::size_t n = 0; n < len; ++n)
            e[n] += prof.power_lin[l] * t.tmpl_cols.cols[l][n] * t.tmpl_cols.cols[l][n];
    double acc = 0.0;
    for (std::size_t n = 0; n < t.win_taps; ++n) acc += e[n];
    std::size_t best_start = 0;
    double best = acc;
    for (std::size_t s = 1; s + t.win_taps <= len; ++s) {
        acc += e[s + t.win_taps - 1] - e[s - 1];
        if (acc > best) {
            best = acc;
            best_start = s;
        }
    }
    t.win_start = best_start;
    return t;
}

// per-realization matched filter
struct ScFilter {
    std::vector<cvec> g_chan;   // per antenna, full propagation response
    std::vector<cvec> g_trunc;  // per antenna, template window
    double tmpl_energy = 0.0;   // sum_m sum_n |g_trunc|^2
    std::complex<double> gain;  // template-vs-channel self product rho(0)
};

inline ScFilter build_filter(const ScTemplate& t, const channel::ChannelRealization& real) {
    const std::size_t m_ant = real.gains.size();
    const std::size_t len = t.col_length();
    const std::size_t w = t.win_start;
    ScFilter f;
    f.g_chan = channel::build_composite(t.chan_cols, real).taps;
    const bool same = t.cfg.tmpl == TemplateKind::composite;
    std::vector<cvec> g_tmpl;
    if (!same) g_tmpl = channel::build_composite(t.tmpl_cols, real).taps;
    f.g_trunc.resize(m_ant);
    std::complex<double> rho0(0.0, 0.0);
    for (std::size_t m = 0; m < m_ant; ++m) {
        const cvec& src = same ? f.g_chan[m] : g_tmpl[m];
        f.g_trunc[m].assign(src.begin() + w, src.begin() + w + t.win_taps);
        for (std::size_t n = 0; n < t.win_taps; ++n) {
            f.tmpl_energy += std::norm(f.g_trunc[m][n]);
            rho0 += std::conj(f.g_trunc[m][n]) * f.g_chan[m][w + n];
        }
        (void)len;
    }
    f.gain = rho0;
    return f;
}

// per-antenna receive streams for a symbol train (noise added by the caller):
// r_m[alpha*k + n] += s_k * g_chan_m[n]
inline std::vector<cvec> synthesize(const cvec& syms, const ScTemplate& t, const ScFilter& f) {
    if (syms.empty()) throw std::invalid_argument("empty symbol train");
    const std::size_t len = t.col_length();
    const std::size_t out_len = t.cfg.alpha * (syms.size() - 1) + len;
    std::vector<cvec> rx(f.g_chan.size());
    for (std::size_t m = 0; m < f.g_chan.size(); ++m) {
        rx[m].assign(out_len, std::complex<double>(0.0, 0.0));
        const auto& g = f.g_chan[m];
        for (std::size_t k = 0; k < syms.size(); ++k) {
            const std::complex<double> s = syms[k];
            std::complex<double>* dst = rx[m].data() + t.cfg.alpha * k;
            for (std::size_t n = 0; n < len; ++n) dst[n] += s * g[n];
        }
    }
    return rx;
}

// matched-filter estimates for nsym symbols; output i reads the stream window
// starting at alpha*i + win_start, normalized by the self gain
inline cvec run_filter(const std::vector<cvec>& rx, const ScTemplate& t, const ScFilter& f,
                       std::size_t nsym) {
    if (rx.size() != f.g_trunc.size()) throw std::invalid_argument("rx/filter antenna mismatch");
    const std::size_t w = t.win_start;
    const std::size_t taps = t.win_taps;
    cvec out(nsym, {0.0, 0.0});
    for (std::size_t m = 0; m < rx.size(); ++m) {
        const auto& r = rx[m];
        const auto& g = f.g_trunc[m];
        for (std::size_t i = 0; i < nsym; ++i) {
            const std::size_t base = t.cfg.alpha * i + w;
            if (base + taps > r.size()) throw std::invalid_argument("stream too short for filter");
            std::complex<double> acc(0.0, 0.0);
            for (std::size_t n = 0; n < taps; ++n) acc += std::conj(g[n]) * r[base + n];
            out[i] += acc;
        }
    }
    for (auto& v : out) v /= f.gain;
    return out;
}

// rho(d) = sum_m sum_n conj(g_trunc_m[n]) g_chan_m[win + n + alpha*d]:
// response of the mf user's estimator to the src user's symbol d places back
inline std::complex<double> cross_gain(const ScTemplate& t, const ScFilter& mf,
                                       const ScFilter& src, long d) {
    const long len = long(t.col_length());
    const long w = long(t.win_start);
    const long taps = long(t.win_taps);
    const long off = w + long(t.cfg.alpha) * d;
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t m = 0; m < mf.g_trunc.size(); ++m) {
        const auto& g = mf.g_trunc[m];
        const auto& c = src.g_chan[m];
        const long lo = std::max(0L, -off);
        const long hi = std::min(taps, len - off);
        for (long n = lo; n < hi; ++n) acc += std::conj(g[std::size_t(n)]) * c[std::size_t(n + off)];
    }
    return acc;
}

namespace detail {

inline long lag_reach(const ScTemplate& t) {
    return long((t.col_length() + t.win_taps) / t.cfg.alpha) + 1;
}

}  // namespace detail

// exact second-moment interference terms for unit-energy i.i.d. symbols
struct InterferenceBudget {
    double self_power = 0.0;   // residual ISI power after normalization
    double noise_scale = 0.0;  // multiply by N0 for the effective noise variance
};

inline InterferenceBudget isi_budget(const ScTemplate& t, const ScFilter& f) {
    InterferenceBudget b;
    const double g2 = std::norm(f.gain);
    b.noise_scale = f.tmpl_energy / g2;
    const long reach = detail::lag_reach(t);
    for (long d = -reach; d <= reach; ++d) {
        if (d == 0) continue;
        b.self_power += std::norm(cross_gain(t, f, f, d));
    }
    b.self_power /= g2;
    return b;
}

// total cross-user leakage power into the mf user's estimates (all lags)
inline double iui_power(const ScTemplate& t, const ScFilter& mf, const ScFilter& src) {
    const long reach = detail::lag_reach(t);
    double p = 0.0;
    for (long d = -reach; d <= reach; ++d) p += std::norm(cross_gain(t, mf, src, d));
    return p / std::norm(mf.gain);
}

// pulse-shaped waveform for spectrum studies: upsample by alpha, apply
// unit-energy root-raised-cosine taps
inline cvec sc_tx(const cvec& syms, const ScConfig& cfg) {
    cfg.validate();
    if (syms.empty()) throw std::invalid_argument("empty symbol train");
    const auto p = modem::rrc_taps(cfg.beta, cfg.span, cfg.alpha);
    const std::size_t up_len = cfg.alpha * (syms.size() - 1) + 1;
    cvec out(up_len + p.taps.size() - 1, {0.0, 0.0});
    for (std::size_t k = 0; k < syms.size(); ++k) {
        const std::complex<double> s = syms[k];
        for (std::size_t n = 0; n < p.taps.size(); ++n)
            out[cfg.alpha * k + n] += s * p.taps[n];
    }
    return out;
}

}  // namespace lsalink::sc
