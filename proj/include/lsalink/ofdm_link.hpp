#pragma once
// OFDM uplink chain: subcarrier mapping, CP handling, and the two receiver
// routes (per-antenna FFT combining vs time-domain matched filtering with a
// single shared FFT). Both produce identical combined estimates.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lsalink/channel.hpp"
#include "lsalink/fft.hpp"

namespace lsalink::ofdm {

struct OfdmConfig {
    std::size_t nfft = 512;
    std::size_t used = 300;  // occupied subcarriers, DC excluded
    std::size_t cp = 40;     // cyclic prefix samples
    double sample_rate = 7.68e6;

    void validate() const {
        if (nfft == 0 || (nfft & (nfft - 1)) != 0)
            throw std::invalid_argument("nfft must be a power of two");
        if (used == 0 || used % 2 != 0 || used >= nfft)
            throw std::invalid_argument("used bins must be even and < nfft");
        if (cp >= nfft) throw std::invalid_argument("cp must be < nfft");
    }

    double subcarrier_spacing() const { return sample_rate / double(nfft); }
    std::size_t symbol_samples() const { return nfft + cp; }

    // FFT bin for data slot i, increasing frequency: -used/2..-1 then +1..+used/2
    std::size_t bin_index(std::size_t i) const {
        const std::size_t half = used / 2;
        return i < half ? nfft - half + i : i - half + 1;
    }

    std::vector<std::size_t> bin_indices() const {
        std::vector<std::size_t> idx(used);
        for (std::size_t i = 0; i < used; ++i) idx[i] = bin_index(i);
        return idx;
    }

    // signed subcarrier frequencies in Hz matching bin_indices order
    std::vector<double> bin_frequencies() const {
        std::vector<double> f(used);
        const double df = subcarrier_spacing();
        const std::size_t half = used / 2;
        for (std::size_t i = 0; i < used; ++i) {
            const double k = i < half ? double(i) - double(half) : double(i - half + 1);
            f[i] = k * df;
        }
        return f;
    }
};

// number of OFDM symbols needed for n_data constellation points
inline std::size_t symbols_per_frame(const OfdmConfig& cfg, std::size_t n_data) {
    return (n_data + cfg.used - 1) / cfg.used;
}

// tx: map slot symbols (multiple OFDM symbols, row-major) to time samples with CP.
// IFFT carries a 1/sqrt(nfft) scale so unit-energy constellations give
// time-domain power used/nfft.
inline cvec ofdm_tx(const cvec& slots, const OfdmConfig& cfg) {
    cfg.validate();
    if (slots.empty() || slots.size() % cfg.used != 0)
        throw std::invalid_argument("slot count must be a multiple of used bins");
    const std::size_t nsym = slots.size() / cfg.used;
    const double scale = std::sqrt(double(cfg.nfft));
    Fft fft(cfg.nfft);
    cvec out;
    out.reserve(nsym * cfg.symbol_samples());
    cvec spec(cfg.nfft);
    for (std::size_t s = 0; s < nsym; ++s) {
        std::fill(spec.begin(), spec.end(), std::complex<double>(0.0, 0.0));
        for (std::size_t i = 0; i < cfg.used; ++i)
            spec[cfg.bin_index(i)] = slots[s * cfg.used + i];
        cvec t = spec;
        fft.inverse(t);
        for (auto& v : t) v *= scale;  // net 1/sqrt(nfft) relative to unscaled IDFT
        for (std::size_t n = cfg.nfft - cfg.cp; n < cfg.nfft; ++n) out.push_back(t[n]);
        out.insert(out.end(), t.begin(), t.end());
    }
    return out;
}

// per-antenna channel frequency response on the used bins
inline std::vector<cvec> bin_response(const channel::DiscreteChannel& dc,
                                      const OfdmConfig& cfg) {
    if (dc.kind != channel::DiscretizeKind::grid_snapped)
        throw std::invalid_argument("bin_response expects a grid-snapped channel");
    Fft fft(cfg.nfft);
    std::vector<cvec> h(dc.taps.size());
    cvec full(cfg.nfft);
    for (std::size_t m = 0; m < dc.taps.size(); ++m) {
        std::fill(full.begin(), full.end(), std::complex<double>(0.0, 0.0));
        if (dc.taps[m].size() > cfg.nfft)
            throw std::invalid_argument("channel impulse response exceeds nfft");
        std::copy(dc.taps[m].begin(), dc.taps[m].end(), full.begin());
        fft.forward(full);
        h[m].resize(cfg.used);
        for (std::size_t i = 0; i < cfg.used; ++i) h[m][i] = full[cfg.bin_index(i)];
    }
    return h;
}

// apply a grid-snapped channel to a CP-framed stream, one output per antenna.
// linear convolution; CP length >= channel memory keeps symbols ISI-free.
inline std::vector<cvec> apply_channel(const cvec& tx, const channel::DiscreteChannel& dc) {
    std::vector<cvec> out(dc.taps.size());
    for (std::size_t m = 0; m < dc.taps.size(); ++m) {
        const auto& g = dc.taps[m];
        out[m].assign(tx.size(), std::complex<double>(0.0, 0.0));
        for (std::size_t t = 0; t < g.size(); ++t) {
            if (g[t] == std::complex<double>(0.0, 0.0)) continue;
            for (std::size_t n = t; n < tx.size(); ++n) out[m][n] += g[t] * tx[n - t];
        }
    }
    return out;
}

struct OfdmRxResult {
    cvec est;                       // combined symbol estimates, slot order
    std::vector<double> noise_var;  // per-slot effective noise variance
    std::vector<double> a;          // per-bin combining gain sum_m |H_m[k]|^2
};

namespace detail {

inline OfdmRxResult combine_bins(const std::vector<cvec>& y_bins,
                                 const std::vector<cvec>& h, const OfdmConfig& cfg,
                                 double n0) {
    const std::size_t nsym = y_bins.size();
    OfdmRxResult res;
    res.a.assign(cfg.used, 0.0);
    for (const auto& hm : h)
        for (std::size_t i = 0; i < cfg.used; ++i) res.a[i] += std::norm(hm[i]);
    res.est.resize(nsym * cfg.used);
    res.noise_var.resize(nsym * cfg.used);
    for (std::size_t s = 0; s < nsym; ++s)
        for (std::size_t i = 0; i < cfg.used; ++i) {
            res.est[s * cfg.used + i] = y_bins[s][i] / res.a[i];
            res.noise_var[s * cfg.used + i] = n0 / res.a[i];
        }
    return res;
}

}  // namespace detail

// traditional route: FFT each antenna stream, combine bins with conj(H)
inline OfdmRxResult rx_traditional(const std::vector<cvec>& rx,
                                   const std::vector<cvec>& h, const OfdmConfig& cfg,
                                   double n0) {
    cfg.validate();
    if (rx.empty() || rx.size() != h.size())
        throw std::invalid_argument("rx/h antenna count mismatch");
    const std::size_t step = cfg.symbol_samples();
    if (rx[0].size() % step != 0)
        throw std::invalid_argument("rx length must be a whole number of OFDM symbols");
    const std::size_t nsym = rx[0].size() / step;
    const double scale = 1.0 / std::sqrt(double(cfg.nfft));
    Fft fft(cfg.nfft);
    std::vector<cvec> y(nsym, cvec(cfg.used, {0.0, 0.0}));
    cvec buf(cfg.nfft);
    for (std::size_t m = 0; m < rx.size(); ++m) {
        for (std::size_t s = 0; s < nsym; ++s) {
            const std::size_t base = s * step + cfg.cp;  // strip CP
            std::copy(rx[m].begin() + base, rx[m].begin() + base + cfg.nfft, buf.begin());
            fft.forward(buf);
            for (std::size_t i = 0; i < cfg.used; ++i)
                y[s][i] += std::conj(h[m][i]) * buf[cfg.bin_index(i)] * scale;
        }
    }
    return detail::combine_bins(y, h, cfg, n0);
}

// matched-filter route: per-antenna circular correlation against the snapped
// impulse response, antenna-summed, then a single FFT per OFDM symbol.
inline OfdmRxResult rx_matched_filter(const std::vector<cvec>& rx,
                                      const channel::DiscreteChannel& dc,
                                      const OfdmConfig& cfg, double n0) {
    cfg.validate();
    if (rx.empty() || rx.size() != dc.taps.size())
        throw std::invalid_argument("rx/channel antenna count mismatch");
    const std::size_t step = cfg.symbol_samples();
    if (rx[0].size() % step != 0)
        throw std::invalid_argument("rx length must be a whole number of OFDM symbols");
    const std::size_t nsym = rx[0].size() / step;
    const auto h = bin_response(dc, cfg);
    const double scale = 1.0 / std::sqrt(double(cfg.nfft));
    Fft fft(cfg.nfft);
    std::vector<cvec> y(nsym, cvec(cfg.used, {0.0, 0.0}));
    cvec acc(cfg.nfft), buf(cfg.nfft);
    for (std::size_t s = 0; s < nsym; ++s) {
        std::fill(acc.begin(), acc.end(), std::complex<double>(0.0, 0.0));
        for (std::size_t m = 0; m < rx.size(); ++m) {
            const std::size_t base = s * step + cfg.cp;
            const auto& g = dc.taps[m];
            // y[n] = sum_t conj(g[t]) r[(n+t) mod nfft]
            for (std::size_t n = 0; n < cfg.nfft; ++n) {
                std::complex<double> v(0.0, 0.0);
                for (std::size_t t = 0; t < g.size(); ++t) {
                    std::size_t idx = n + t;
                    if (idx >= cfg.nfft) idx -= cfg.nfft;
                    v += std::conj(g[t]) * rx[m][base + idx];
                }
                acc[n] += v;
            }
        }
        std::copy(acc.begin(), acc.end(), buf.begin());
        fft.forward(buf);
        for (std::size_t i = 0; i < cfg.used; ++i) y[s][i] = buf[cfg.bin_index(i)] * scale;
    }
    return detail::combine_bins(y, h, cfg, n0);
}

}  // namespace lsalink::ofdm
