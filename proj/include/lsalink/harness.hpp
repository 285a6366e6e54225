#pragma once
// monte-carlo campaign driver: frame assembly, full-synthesis and conditional
// fast-model trial paths for both waveforms, deterministic early stopping,
// csv emission.  The fast paths reproduce the full chain exactly in the
// noiseless limit (see the harness tests) and draw statistically equivalent
// noise, so campaigns can trade per-sample synthesis for per-bin models.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsalink/channel.hpp"
#include "lsalink/fft.hpp"
#include "lsalink/metrics.hpp"
#include "lsalink/modem.hpp"
#include "lsalink/ofdm_link.hpp"
#include "lsalink/rng.hpp"
#include "lsalink/sc_link.hpp"
#include "lsalink/turbo.hpp"

namespace lsalink::harness {

enum class Waveform { ofdm, sc };
enum class OfdmRoute { traditional, matched_filter };

inline const char* waveform_name(Waveform w) { return w == Waveform::ofdm ? "ofdm" : "sc"; }

inline Waveform parse_waveform(const std::string& s) {
    if (s == "ofdm") return Waveform::ofdm;
    if (s == "sc") return Waveform::sc;
    throw std::invalid_argument("unknown waveform: " + s);
}

inline const char* route_name(OfdmRoute r) {
    return r == OfdmRoute::traditional ? "traditional" : "matched_filter";
}

inline OfdmRoute parse_route(const std::string& s) {
    if (s == "traditional") return OfdmRoute::traditional;
    if (s == "matched_filter") return OfdmRoute::matched_filter;
    throw std::invalid_argument("unknown route: " + s);
}

inline modem::ModScheme parse_scheme(const std::string& s) {
    if (s == "qpsk") return modem::ModScheme::qpsk;
    if (s == "qam16" || s == "16qam") return modem::ModScheme::qam16;
    throw std::invalid_argument("unknown scheme: " + s);
}

struct LinkConfig {
    Waveform waveform = Waveform::ofdm;
    OfdmRoute route = OfdmRoute::matched_filter;  // ofdm receiver variant
    modem::ModScheme scheme = modem::ModScheme::qpsk;
    std::size_t antennas = 100;
    std::size_t users = 1;
    std::size_t payload_bits = 614;  // transported bits per block
    std::size_t filler_bits = 2;     // zero padding up to the code block
    turbo::TurboConfig code;
    ofdm::OfdmConfig ofdm;
    sc::ScConfig sc;
    channel::TapDelayProfile profile = channel::etu_profile();
    bool allow_short_cp = false;  // permit cp below the snapped delay spread
    bool fast_path = false;       // conditional per-bin model instead of sample synthesis

    std::size_t info_bits() const { return payload_bits + filler_bits; }
    double nominal_code_rate() const { return 1.0 / 3.0; }

    // symbol rates are matched: both waveforms carry used/(nfft+cp) of fs
    double net_symbol_rate() const {
        return double(ofdm.used) * ofdm.sample_rate / double(ofdm.nfft + ofdm.cp);
    }
    double cp_overhead() const {
        return waveform == Waveform::ofdm ? double(ofdm.nfft + ofdm.cp) / double(ofdm.nfft)
                                          : 1.0;
    }

    // fills the dependent fields; campaigns always run on the normalized copy
    LinkConfig normalized() const {
        LinkConfig c = *this;
        c.code.block_length = info_bits();
        c.sc.symbol_rate = net_symbol_rate();
        return c;
    }

    void validate() const {
        ofdm.validate();
        sc.validate();
        code.validate();
        profile.validate();
        if (antennas == 0) throw std::invalid_argument("need at least one antenna");
        if (users == 0) throw std::invalid_argument("need at least one user");
        if (payload_bits == 0) throw std::invalid_argument("empty payload");
        if (code.block_length != info_bits())
            throw std::invalid_argument("code block length out of sync; call normalized()");
        if (code.coded_length() % modem::bits_per_symbol(scheme) != 0)
            throw std::invalid_argument("coded length not a whole number of symbols");
        const std::size_t spread =
            channel::snapped_index(profile.delay_s.back(), ofdm.sample_rate);
        if (ofdm.cp < spread && !allow_short_cp)
            throw std::invalid_argument(
                "cyclic prefix shorter than the snapped delay spread; "
                "set allow_short_cp to run anyway");
    }
};

struct CampaignConfig {
    LinkConfig link;
    std::vector<double> esn0_db;
    std::size_t blocks_per_point = 500;  // baseline user-blocks per snr point
    std::size_t min_block_errors = 200;  // keep going until this many errors
    std::size_t max_blocks = 4000;       // hard cap per point
    std::size_t batch = 64;              // stop-rule granularity, in frames
    std::uint64_t seed = 1;

    void validate() const {
        link.normalized().validate();
        if (esn0_db.empty()) throw std::invalid_argument("no snr points");
        if (blocks_per_point == 0 || batch == 0) throw std::invalid_argument("empty campaign");
        if (max_blocks < blocks_per_point)
            throw std::invalid_argument("max_blocks below blocks_per_point");
    }
};

struct PointResult {
    double esn0_db = 0.0;
    std::size_t blocks = 0;        // user-blocks simulated
    std::size_t block_errors = 0;  // user-blocks decoded wrong
    double bler = 0.0, bler_lo = 0.0, bler_hi = 1.0;
    double se = 0.0;  // bit/s/Hz at this operating point
    double ee = 0.0;  // se per unit transmit energy, relative units
};

// everything derived from a link config that trials reuse
struct Context {
    LinkConfig link;  // normalized + validated
    std::size_t payload_syms = 0;
    // ofdm framing
    std::size_t ofdm_syms = 0, slots = 0;
    // sc framing and frequency-circle tables
    sc::ScTemplate tmpl;
    std::size_t guard = 0, train = 0;
    std::size_t nc = 0;  // circle length for the fast path
    long reach = 0;
    std::vector<cvec> p_full;  // per-tap propagation column spectra
    std::vector<cvec> p_win;   // per-tap windowed template spectra
};

namespace detail {

constexpr std::uint64_t tag_channel = 0x6368616e;
constexpr std::uint64_t tag_bits = 0x62697473;
constexpr std::uint64_t tag_noise = 0x6e6f6973;

inline std::uint64_t chain(std::uint64_t s, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(s, a), b);
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace detail

// fading is keyed by (seed, user, trial) only: waveform, snr point, scheme and
// antenna count all see the same physical realization
inline std::uint64_t channel_seed(std::uint64_t seed, std::size_t user, std::size_t trial) {
    return mix_seed(detail::chain(seed, detail::tag_channel, user), trial);
}

inline std::uint64_t bits_seed(std::uint64_t seed, std::size_t user, std::size_t trial) {
    return mix_seed(detail::chain(seed, detail::tag_bits, user), trial);
}

inline std::uint64_t noise_seed(std::uint64_t seed, Waveform w, double esn0_db,
                                std::size_t trial) {
    const std::uint64_t wf = w == Waveform::ofdm ? 1 : 2;
    return mix_seed(detail::chain(mix_seed(seed, detail::tag_noise), wf,
                                  std::bit_cast<std::uint64_t>(esn0_db)),
                    trial);
}

inline Context make_context(const LinkConfig& raw) {
    Context cx;
    cx.link = raw.normalized();
    cx.link.validate();
    const std::size_t bps = modem::bits_per_symbol(cx.link.scheme);
    cx.payload_syms = cx.link.code.coded_length() / bps;
    if (cx.link.waveform == Waveform::ofdm) {
        cx.ofdm_syms = ofdm::symbols_per_frame(cx.link.ofdm, cx.payload_syms);
        cx.slots = cx.ofdm_syms * cx.link.ofdm.used;
        return cx;
    }
    cx.tmpl = sc::make_template(cx.link.profile, cx.link.sc);
    cx.guard = sc::frame_guard(cx.link.sc, cx.link.profile);
    cx.train = cx.payload_syms + 2 * cx.guard;
    cx.reach = sc::detail::lag_reach(cx.tmpl);
    const std::size_t alpha = cx.link.sc.alpha;
    const std::size_t len = cx.tmpl.col_length();
    cx.nc = detail::next_pow2(alpha * (cx.train - 1) + len);
    // spectra of the real-valued tap columns on the circle; template columns
    // keep their absolute window offset so correlations line up sample-exact
    Fft fft(cx.nc);
    const std::size_t taps = cx.link.profile.taps();
    cx.p_full.resize(taps);
    cx.p_win.resize(taps);
    for (std::size_t l = 0; l < taps; ++l) {
        cvec a(cx.nc, {0.0, 0.0}), b(cx.nc, {0.0, 0.0});
        for (std::size_t n = 0; n < len; ++n) a[n] = cx.tmpl.chan_cols.cols[l][n];
        for (std::size_t n = 0; n < cx.tmpl.win_taps; ++n) {
            const std::size_t j = cx.tmpl.win_start + n;
            b[j] = cx.tmpl.tmpl_cols.cols[l][j];
        }
        fft.forward(a);
        fft.forward(b);
        cx.p_full[l] = std::move(a);
        cx.p_win[l] = std::move(b);
    }
    return cx;
}

struct TrialOutput {
    std::vector<char> error;                          // per user
    std::vector<std::vector<std::uint8_t>> payload;   // transmitted payload bits
    std::vector<cvec> est;                            // payload symbol estimates
    std::vector<std::vector<double>> nv;              // per-symbol llr variances
};

namespace detail {

struct UserFrame {
    std::vector<std::uint8_t> payload;
    cvec all;  // ofdm: slot grid incl. filler; sc: guard + payload + guard
};

inline cvec random_symbols(std::size_t n, modem::ModScheme scheme, Rng& rng) {
    if (n == 0) return {};
    std::vector<std::uint8_t> bits(n * modem::bits_per_symbol(scheme));
    for (auto& b : bits) b = std::uint8_t(rng.uniform_u32(2));
    return modem::modulate_bits(bits, scheme).symbols;
}

inline UserFrame make_frame(const Context& cx, Rng& bits_rng) {
    UserFrame f;
    f.payload.resize(cx.link.payload_bits);
    for (auto& b : f.payload) b = std::uint8_t(bits_rng.uniform_u32(2));
    std::vector<std::uint8_t> info = f.payload;
    info.resize(cx.link.info_bits(), 0);  // zero filler closes the code block
    const auto coded = turbo::turbo_encode(info, cx.link.code);
    cvec data = modem::modulate_bits(coded, cx.link.scheme).symbols;
    if (cx.link.waveform == Waveform::ofdm) {
        f.all = std::move(data);
        cvec filler = random_symbols(cx.slots - cx.payload_syms, cx.link.scheme, bits_rng);
        f.all.insert(f.all.end(), filler.begin(), filler.end());
    } else {
        cvec head = random_symbols(cx.guard, cx.link.scheme, bits_rng);
        cvec tail = random_symbols(cx.guard, cx.link.scheme, bits_rng);
        f.all = std::move(head);
        f.all.insert(f.all.end(), data.begin(), data.end());
        f.all.insert(f.all.end(), tail.begin(), tail.end());
    }
    return f;
}

// in-place cholesky of a hermitian psd u-by-u matrix in row-major storage;
// zero-variance directions collapse to zero columns instead of dividing
inline void chol_inplace(std::vector<std::complex<double>>& a, std::size_t u) {
    for (std::size_t i = 0; i < u; ++i) {
        double d = a[i * u + i].real();
        for (std::size_t k = 0; k < i; ++k) d -= std::norm(a[i * u + k]);
        d = d > 0.0 ? std::sqrt(d) : 0.0;
        a[i * u + i] = d;
        const double inv = d > 0.0 ? 1.0 / d : 0.0;
        for (std::size_t j = i + 1; j < u; ++j) {
            std::complex<double> s = a[j * u + i];
            for (std::size_t k = 0; k < i; ++k) s -= a[j * u + k] * std::conj(a[i * u + k]);
            a[j * u + i] = s * inv;
        }
        for (std::size_t j = 0; j < i; ++j) a[j * u + i] = 0.0;  // keep lower triangle
    }
}

// per-bin combining gains and cross-user couplings from the used-bin spectra
struct OfdmCoupling {
    std::vector<std::vector<double>> a;                          // [u][bin]
    std::vector<std::vector<std::vector<std::complex<double>>>> b;  // [u][v][bin]
};

inline OfdmCoupling ofdm_coupling(const std::vector<std::vector<cvec>>& h,
                                  std::size_t used) {
    const std::size_t nu = h.size();
    OfdmCoupling c;
    c.a.assign(nu, std::vector<double>(used, 0.0));
    c.b.assign(nu, std::vector<std::vector<std::complex<double>>>(
                       nu, std::vector<std::complex<double>>(used, {0.0, 0.0})));
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t v = 0; v < nu; ++v)
            for (std::size_t m = 0; m < h[u].size(); ++m)
                for (std::size_t i = 0; i < used; ++i) {
                    const auto p = std::conj(h[u][m][i]) * h[v][m][i];
                    c.b[u][v][i] += p;
                    if (u == v) c.a[u][i] += p.real();
                }
    return c;
}

inline std::vector<double> ofdm_noise_var(const OfdmCoupling& c, std::size_t u, double n0,
                                          std::size_t nsym, std::size_t used,
                                          std::size_t payload) {
    std::vector<double> nv(payload);
    for (std::size_t j = 0; j < payload; ++j) {
        const std::size_t i = j % used;
        double iui = 0.0;
        for (std::size_t v = 0; v < c.a.size(); ++v)
            if (v != u) iui += std::norm(c.b[u][v][i]);
        nv[j] = (n0 * c.a[u][i] + iui) / (c.a[u][i] * c.a[u][i]);
    }
    (void)nsym;
    return nv;
}

inline void ofdm_full_trial(const Context& cx, const std::vector<channel::ChannelRealization>& real,
                            const std::vector<UserFrame>& frames, double n0, Rng& nrng,
                            TrialOutput& out) {
    const auto& cfg = cx.link.ofdm;
    const std::size_t nu = cx.link.users;
    std::vector<channel::DiscreteChannel> dc(nu);
    std::vector<std::vector<cvec>> h(nu);
    for (std::size_t u = 0; u < nu; ++u) {
        dc[u] = channel::discretize_grid(real[u], cfg.sample_rate);
        h[u] = ofdm::bin_response(dc[u], cfg);
    }
    std::vector<cvec> rx;
    for (std::size_t u = 0; u < nu; ++u) {
        const cvec tx = ofdm::ofdm_tx(frames[u].all, cfg);
        auto streams = ofdm::apply_channel(tx, dc[u]);
        if (u == 0) {
            rx = std::move(streams);
        } else {
            for (std::size_t m = 0; m < rx.size(); ++m)
                for (std::size_t n = 0; n < rx[m].size(); ++n) rx[m][n] += streams[m][n];
        }
    }
    for (auto& stream : rx)
        for (auto& s : stream) s += nrng.cgaussian(n0);

    const auto coupling = nu > 1 ? ofdm_coupling(h, cfg.used) : OfdmCoupling{};
    for (std::size_t u = 0; u < nu; ++u) {
        ofdm::OfdmRxResult res =
            cx.link.route == OfdmRoute::traditional
                ? ofdm::rx_traditional(rx, h[u], cfg, n0)
                : ofdm::rx_matched_filter(rx, dc[u], cfg, n0);
        out.est[u].assign(res.est.begin(), res.est.begin() + cx.payload_syms);
        if (nu == 1) {
            out.nv[u].assign(res.noise_var.begin(), res.noise_var.begin() + cx.payload_syms);
        } else {
            out.nv[u] = ofdm_noise_var(coupling, u, n0, cx.ofdm_syms, cfg.used,
                                       cx.payload_syms);
        }
    }
}

inline void ofdm_fast_trial(const Context& cx, const std::vector<channel::ChannelRealization>& real,
                            const std::vector<UserFrame>& frames, double n0, Rng& nrng,
                            TrialOutput& out) {
    const auto& cfg = cx.link.ofdm;
    const std::size_t nu = cx.link.users;
    const std::size_t used = cfg.used;
    std::vector<std::vector<cvec>> h(nu);
    for (std::size_t u = 0; u < nu; ++u)
        h[u] = ofdm::bin_response(channel::discretize_grid(real[u], cfg.sample_rate), cfg);
    const auto coupling = ofdm_coupling(h, used);

    // noise across users is correlated through the shared antennas: per bin,
    // cov = n0 * B with B = H^H H, so color unit draws by its cholesky factor
    std::vector<std::vector<std::complex<double>>> lfac(used);
    for (std::size_t i = 0; i < used; ++i) {
        std::vector<std::complex<double>> b(nu * nu);
        for (std::size_t u = 0; u < nu; ++u)
            for (std::size_t v = 0; v < nu; ++v)
                b[u * nu + v] = u == v ? coupling.a[u][i] : coupling.b[u][v][i];
        chol_inplace(b, nu);
        lfac[i] = std::move(b);
    }

    for (std::size_t u = 0; u < nu; ++u) out.est[u].resize(cx.payload_syms);
    const double root_n0 = std::sqrt(n0);
    std::vector<std::complex<double>> xi(nu), eta(nu);
    for (std::size_t s = 0; s < cx.ofdm_syms; ++s)
        for (std::size_t i = 0; i < used; ++i) {
            for (std::size_t v = 0; v < nu; ++v) xi[v] = nrng.cgaussian(1.0);
            const auto& l = lfac[i];
            const std::size_t j = s * used + i;
            for (std::size_t u = 0; u < nu; ++u) {
                eta[u] = {0.0, 0.0};
                for (std::size_t v = 0; v <= u; ++v) eta[u] += l[u * nu + v] * xi[v];
                if (j >= cx.payload_syms) continue;
                std::complex<double> cross(0.0, 0.0);
                for (std::size_t v = 0; v < nu; ++v)
                    if (v != u) cross += coupling.b[u][v][i] * frames[v].all[j];
                out.est[u][j] =
                    frames[u].all[j] + (cross + root_n0 * eta[u]) / coupling.a[u][i];
            }
        }
    for (std::size_t u = 0; u < nu; ++u)
        out.nv[u] = ofdm_noise_var(coupling, u, n0, cx.ofdm_syms, used, cx.payload_syms);
}

inline void sc_full_trial(const Context& cx, const std::vector<channel::ChannelRealization>& real,
                          const std::vector<UserFrame>& frames, double n0, Rng& nrng,
                          TrialOutput& out) {
    const std::size_t nu = cx.link.users;
    std::vector<sc::ScFilter> filt(nu);
    for (std::size_t u = 0; u < nu; ++u) filt[u] = sc::build_filter(cx.tmpl, real[u]);
    std::vector<cvec> rx;
    for (std::size_t u = 0; u < nu; ++u) {
        auto streams = sc::synthesize(frames[u].all, cx.tmpl, filt[u]);
        if (u == 0) {
            rx = std::move(streams);
        } else {
            for (std::size_t m = 0; m < rx.size(); ++m)
                for (std::size_t n = 0; n < rx[m].size(); ++n) rx[m][n] += streams[m][n];
        }
    }
    for (auto& stream : rx)
        for (auto& s : stream) s += nrng.cgaussian(n0);

    for (std::size_t u = 0; u < nu; ++u) {
        const cvec y = sc::run_filter(rx, cx.tmpl, filt[u], cx.train);
        out.est[u].assign(y.begin() + cx.guard, y.begin() + cx.guard + cx.payload_syms);
        const auto budget = sc::isi_budget(cx.tmpl, filt[u]);
        double iui = 0.0;
        for (std::size_t v = 0; v < nu; ++v)
            if (v != u) iui += sc::iui_power(cx.tmpl, filt[u], filt[v]);
        out.nv[u].assign(cx.payload_syms,
                         n0 * budget.noise_scale + budget.self_power + iui);
    }
}

inline void sc_fast_trial(const Context& cx, const std::vector<channel::ChannelRealization>& real,
                          const std::vector<UserFrame>& frames, double n0, Rng& nrng,
                          TrialOutput& out) {
    const std::size_t nu = cx.link.users;
    const std::size_t nt = cx.link.profile.taps();
    const std::size_t nc = cx.nc;
    const std::size_t alpha = cx.link.sc.alpha;
    Fft fft(nc);

    // cross-user tap grams d[u][v](l,l') = sum_m conj(c_u[m,l]) c_v[m,l']
    std::vector<std::vector<std::vector<std::complex<double>>>> gram(
        nu, std::vector<std::vector<std::complex<double>>>(nu));
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t v = 0; v < nu; ++v) {
            auto& d = gram[u][v];
            d.assign(nt * nt, {0.0, 0.0});
            for (std::size_t m = 0; m < cx.link.antennas; ++m)
                for (std::size_t l = 0; l < nt; ++l) {
                    const auto cu = std::conj(real[u].gains[m][l]);
                    for (std::size_t l1 = 0; l1 < nt; ++l1)
                        d[l * nt + l1] += cu * real[v].gains[m][l1];
                }
        }

    // coupling spectra: c_uv(f) = sum_{l,l'} d[u][v](l,l') conj(pwin_l) pfull_l'
    // and the template-only version t_uv(f) used for the noise covariance
    auto combine = [&](const std::vector<std::complex<double>>& d,
                       const std::vector<cvec>& right) {
        cvec acc(nc, {0.0, 0.0});
        cvec w(nc);
        for (std::size_t l = 0; l < nt; ++l) {
            std::fill(w.begin(), w.end(), std::complex<double>(0.0, 0.0));
            for (std::size_t l1 = 0; l1 < nt; ++l1) {
                const auto dl = d[l * nt + l1];
                if (dl == std::complex<double>(0.0, 0.0)) continue;
                const auto& col = right[l1];
                for (std::size_t f = 0; f < nc; ++f) w[f] += dl * col[f];
            }
            const auto& left = cx.p_win[l];
            for (std::size_t f = 0; f < nc; ++f) acc[f] += std::conj(left[f]) * w[f];
        }
        return acc;
    };
    std::vector<std::vector<cvec>> cp(nu, std::vector<cvec>(nu)), tp(nu, std::vector<cvec>(nu));
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t v = 0; v < nu; ++v) {
            cp[u][v] = combine(gram[u][v], cx.p_full);
            tp[u][v] = combine(gram[u][v], cx.p_win);
        }

    // upsampled symbol spectra
    std::vector<cvec> up(nu);
    for (std::size_t u = 0; u < nu; ++u) {
        up[u].assign(nc, {0.0, 0.0});
        for (std::size_t k = 0; k < cx.train; ++k) up[u][alpha * k] = frames[u].all[k];
        fft.forward(up[u]);
    }

    // noise spectra: per bin, cov across users is n0*nc*T(f); cholesky-color
    // unit draws bin by bin (independent bins = circularly white antennas)
    std::vector<cvec> spec(nu, cvec(nc, {0.0, 0.0}));
    {
        const double scale = std::sqrt(n0 * double(nc));
        std::vector<std::complex<double>> t(nu * nu), xi(nu);
        for (std::size_t f = 0; f < nc; ++f) {
            for (std::size_t u = 0; u < nu; ++u)
                for (std::size_t v = 0; v < nu; ++v) t[u * nu + v] = tp[u][v][f];
            chol_inplace(t, nu);
            for (std::size_t v = 0; v < nu; ++v) xi[v] = nrng.cgaussian(1.0);
            for (std::size_t u = 0; u < nu; ++u) {
                std::complex<double> eta(0.0, 0.0);
                for (std::size_t v = 0; v <= u; ++v) eta += t[u * nu + v] * xi[v];
                spec[u][f] = scale * eta;
            }
        }
    }

    for (std::size_t u = 0; u < nu; ++u) {
        // template energy and self gain from the coupling spectra
        double et = 0.0;
        std::complex<double> rho0(0.0, 0.0);
        for (std::size_t f = 0; f < nc; ++f) {
            et += tp[u][u][f].real();
            rho0 += cp[u][u][f];
        }
        et /= double(nc);
        rho0 /= double(nc);

        for (std::size_t v = 0; v < nu; ++v)
            for (std::size_t f = 0; f < nc; ++f) spec[u][f] += cp[u][v][f] * up[v][f];
        fft.inverse(spec[u]);
        out.est[u].resize(cx.payload_syms);
        for (std::size_t j = 0; j < cx.payload_syms; ++j)
            out.est[u][j] = spec[u][alpha * (cx.guard + j)] / rho0;

        // interference budget from the coupling impulse responses
        double self = 0.0, iui = 0.0;
        for (std::size_t v = 0; v < nu; ++v) {
            cvec lag = cp[u][v];
            fft.inverse(lag);
            for (long d = -cx.reach; d <= cx.reach; ++d) {
                if (v == u && d == 0) continue;
                const std::size_t idx =
                    std::size_t(((long(alpha) * d) % long(nc) + long(nc)) % long(nc));
                (v == u ? self : iui) += std::norm(lag[idx]);
            }
        }
        const double g2 = std::norm(rho0);
        out.nv[u].assign(cx.payload_syms, (n0 * et + self + iui) / g2);
    }
}

}  // namespace detail

// one frame per user at one operating point; reproducible from the arguments
inline TrialOutput run_trial(const Context& cx, double esn0_db, std::uint64_t seed,
                             std::size_t trial, bool fast) {
    const std::size_t nu = cx.link.users;
    const double n0 = std::pow(10.0, -esn0_db / 10.0);
    std::vector<channel::ChannelRealization> real(nu);
    std::vector<detail::UserFrame> frames(nu);
    for (std::size_t u = 0; u < nu; ++u) {
        real[u] = channel::draw_channel_paired(cx.link.profile, cx.link.antennas,
                                               channel_seed(seed, u, trial));
        Rng brng(bits_seed(seed, u, trial));
        frames[u] = detail::make_frame(cx, brng);
    }
    Rng nrng(noise_seed(seed, cx.link.waveform, esn0_db, trial));

    TrialOutput out;
    out.error.assign(nu, 0);
    out.payload.resize(nu);
    out.est.resize(nu);
    out.nv.resize(nu);
    for (std::size_t u = 0; u < nu; ++u) out.payload[u] = frames[u].payload;

    if (cx.link.waveform == Waveform::ofdm) {
        if (fast)
            detail::ofdm_fast_trial(cx, real, frames, n0, nrng, out);
        else
            detail::ofdm_full_trial(cx, real, frames, n0, nrng, out);
    } else {
        if (fast)
            detail::sc_fast_trial(cx, real, frames, n0, nrng, out);
        else
            detail::sc_full_trial(cx, real, frames, n0, nrng, out);
    }

    for (std::size_t u = 0; u < nu; ++u) {
        const auto llr = modem::llr_demap(out.est[u], cx.link.scheme, out.nv[u]);
        const auto dec = turbo::turbo_decode(llr, cx.link.code);
        out.error[u] = !std::equal(out.payload[u].begin(), out.payload[u].end(),
                                   dec.bits.begin());
    }
    return out;
}

inline TrialOutput run_trial(const LinkConfig& link, double esn0_db, std::uint64_t seed,
                             std::size_t trial) {
    const Context cx = make_context(link);
    return run_trial(cx, esn0_db, seed, trial, link.fast_path);
}

// batched early-stopped point: run frames until the baseline block count and
// the error target are both met (or the cap is hit); trial t is seeded by t
// alone, so the stop rule never changes what any individual trial contains
inline PointResult run_point(const Context& cx, const CampaignConfig& camp, double esn0_db) {
    const std::size_t nu = cx.link.users;
    std::size_t blocks = 0, errors = 0, trial = 0;
    while (true) {
        for (std::size_t b = 0; b < camp.batch; ++b) {
            if (blocks >= camp.max_blocks) break;
            const TrialOutput out = run_trial(cx, esn0_db, camp.seed, trial++, cx.link.fast_path);
            for (std::size_t u = 0; u < nu; ++u) {
                ++blocks;
                errors += out.error[u] != 0;
            }
        }
        const bool enough = blocks >= camp.blocks_per_point && errors >= camp.min_block_errors;
        if (enough || blocks >= camp.max_blocks) break;
    }
    const auto est = metrics::bler_estimate(errors, blocks);
    PointResult pr;
    pr.esn0_db = esn0_db;
    pr.blocks = blocks;
    pr.block_errors = errors;
    pr.bler = est.bler;
    pr.bler_lo = est.lo;
    pr.bler_hi = est.hi;
    pr.se = metrics::spectral_efficiency(double(modem::bits_per_symbol(cx.link.scheme)),
                                         cx.link.nominal_code_rate(), est.bler,
                                         cx.link.net_symbol_rate());
    pr.ee = metrics::relative_energy_efficiency(pr.se, std::pow(10.0, esn0_db / 10.0),
                                                cx.link.cp_overhead());
    return pr;
}

inline std::vector<PointResult> run_campaign(const CampaignConfig& camp) {
    camp.validate();
    const Context cx = make_context(camp.link);
    std::vector<PointResult> out;
    out.reserve(camp.esn0_db.size());
    for (double e : camp.esn0_db) out.push_back(run_point(cx, camp, e));
    return out;
}

inline const char* csv_header() {
    return "waveform,M,K,scheme,code_rate,esn0_db,blocks,block_errors,bler,bler_lo,"
           "bler_hi,se_bps_hz,ee_relative,seed";
}

inline void append_csv_row(std::ostream& os, const LinkConfig& link, std::uint64_t seed,
                           const PointResult& pr) {
    std::ostringstream row;
    row.precision(10);
    row << waveform_name(link.waveform) << ',' << link.antennas << ',' << link.users << ','
        << modem::scheme_name(link.scheme) << ',' << link.nominal_code_rate() << ','
        << pr.esn0_db << ',' << pr.blocks << ',' << pr.block_errors << ',' << pr.bler << ','
        << pr.bler_lo << ',' << pr.bler_hi << ',' << pr.se << ',' << pr.ee << ',' << seed;
    os << row.str() << '\n';
}

inline void write_csv(std::ostream& os, const CampaignConfig& camp,
                      const std::vector<PointResult>& results) {
    os << csv_header() << '\n';
    for (const auto& pr : results) append_csv_row(os, camp.link, camp.seed, pr);
}

}  // namespace lsalink::harness
