// Rate-1/3 parallel-concatenated turbo code in the LTE structure: 8-state RSC
// constituents (feedback 1+D^2+D^3, feedforward 1+D+D^3), quadratic permutation
// interleaver, trellis termination, max-log-MAP decoding with scaled extrinsics
// and hard-decision early stopping.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lsalink::turbo {

using std::size_t;
using std::vector;

struct TurboConfig {
    size_t block_length = 616;  // information bits K
    std::uint64_t f1 = 19;      // QPP coefficients; defaults form a bijection for K=616
    std::uint64_t f2 = 154;
    int max_iterations = 8;
    double extrinsic_scale = 0.75;
    bool early_stop = true;

    void validate() const {
        if (block_length < 8) throw std::invalid_argument("turbo: block length too small");
        if (max_iterations < 1) throw std::invalid_argument("turbo: need at least one iteration");
        if (extrinsic_scale <= 0.0 || extrinsic_scale > 1.0)
            throw std::invalid_argument("turbo: extrinsic scale outside (0,1]");
    }

    size_t coded_length() const { return 3 * block_length + 12; }
};

// pi(i) = (f1*i + f2*i^2) mod K; rejects parameter sets that do not permute.
inline vector<size_t> qpp_permutation(size_t k, std::uint64_t f1, std::uint64_t f2) {
    if (k == 0) throw std::invalid_argument("qpp: empty block");
    vector<size_t> pi(k);
    vector<char> seen(k, 0);
    for (size_t i = 0; i < k; ++i) {
        const std::uint64_t ii = std::uint64_t(i);
        const size_t p = size_t((f1 % k * ii % k + f2 % k * (ii * ii % k) % k) % k);
        if (seen[p]) throw std::invalid_argument("qpp: parameters do not yield a bijection");
        seen[p] = 1;
        pi[i] = p;
    }
    return pi;
}

namespace detail {

// State s packs (a_{k-1}, a_{k-2}, a_{k-3}) into bits 2..0.
inline int rsc_feedback(int s, int u) { return u ^ ((s >> 1) & 1) ^ (s & 1); }
inline int rsc_parity(int s, int a) { return a ^ ((s >> 2) & 1) ^ (s & 1); }
inline int rsc_next(int s, int a) { return ((a << 2) | (s >> 1)) & 7; }
inline int rsc_term_input(int s) { return ((s >> 1) & 1) ^ (s & 1); }  // drives a to 0

struct Trellis {
    int next[8][2];    // next state by (state, input bit)
    int parity[8][2];  // parity bit by (state, input bit)

    Trellis() {
        for (int s = 0; s < 8; ++s)
            for (int u = 0; u < 2; ++u) {
                const int a = rsc_feedback(s, u);
                parity[s][u] = rsc_parity(s, a);
                next[s][u] = rsc_next(s, a);
            }
    }
};

inline const Trellis& trellis() {
    static const Trellis t;
    return t;
}

// One RSC pass over k input bits plus 3 termination steps.
inline void rsc_encode(const vector<std::uint8_t>& in, vector<std::uint8_t>& par,
                       std::uint8_t tail[6]) {
    const Trellis& t = trellis();
    int s = 0;
    par.resize(in.size());
    for (size_t i = 0; i < in.size(); ++i) {
        const int u = in[i] & 1;
        par[i] = std::uint8_t(t.parity[s][u]);
        s = t.next[s][u];
    }
    for (int i = 0; i < 3; ++i) {
        const int u = rsc_term_input(s);
        tail[2 * i] = std::uint8_t(u);
        tail[2 * i + 1] = std::uint8_t(t.parity[s][u]);
        s = t.next[s][u];
    }
}

}  // namespace detail

// Output layout: K systematic, K parity-1, K parity-2 (on interleaved bits),
// then 6 tail bits (x,z pairs) from encoder 1 and 6 from encoder 2.
inline vector<std::uint8_t> turbo_encode(const vector<std::uint8_t>& bits,
                                         const TurboConfig& cfg) {
    cfg.validate();
    if (bits.size() != cfg.block_length)
        throw std::invalid_argument("turbo_encode: bit count != block length");
    const auto pi = qpp_permutation(cfg.block_length, cfg.f1, cfg.f2);
    vector<std::uint8_t> inter(cfg.block_length);
    for (size_t i = 0; i < pi.size(); ++i) inter[i] = bits[pi[i]];

    vector<std::uint8_t> par1, par2;
    std::uint8_t tail1[6], tail2[6];
    detail::rsc_encode(bits, par1, tail1);
    detail::rsc_encode(inter, par2, tail2);

    vector<std::uint8_t> out;
    out.reserve(cfg.coded_length());
    out.insert(out.end(), bits.begin(), bits.end());
    out.insert(out.end(), par1.begin(), par1.end());
    out.insert(out.end(), par2.begin(), par2.end());
    out.insert(out.end(), tail1, tail1 + 6);
    out.insert(out.end(), tail2, tail2 + 6);
    return out;
}

struct TurboDecodeResult {
    vector<std::uint8_t> bits;
    int iterations = 0;
};

namespace detail {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// Max-log BCJR over one constituent.  sys/apriori cover k steps, tail_llr holds
// 3 (x,z) pairs; forced termination branches close the trellis.  Returns the
// extrinsic on the k input bits.
inline void siso_maxlog(const vector<double>& sys, const vector<double>& apriori,
                        const vector<double>& par, const double tail_llr[6],
                        vector<double>& extrinsic, vector<double>& alpha_ws) {
    const Trellis& t = trellis();
    const size_t k = sys.size();
    alpha_ws.assign((k + 1) * 8, neg_inf);
    double* alpha = alpha_ws.data();
    alpha[0] = 0.0;

    // gamma for (state, u): 0.5*(sign(u)*(sys+apriori) + sign(z)*par)
    auto gamma = [&](size_t i, int s, int u) {
        const double lu = sys[i] + apriori[i];
        const double su = u == 0 ? 0.5 : -0.5;
        const double sz = t.parity[s][u] == 0 ? 0.5 : -0.5;
        return su * lu + sz * par[i];
    };

    for (size_t i = 0; i < k; ++i) {
        const double* a = alpha + 8 * i;
        double* an = alpha + 8 * (i + 1);
        for (int s = 0; s < 8; ++s) {
            if (a[s] == neg_inf) continue;
            for (int u = 0; u < 2; ++u) {
                const double m = a[s] + gamma(i, s, u);
                const int ns = t.next[s][u];
                if (m > an[ns]) an[ns] = m;
            }
        }
    }

    // Tail: forced input per state; propagate beta from the all-zero end state.
    double beta[8], beta_next[8];
    std::fill(beta_next, beta_next + 8, neg_inf);
    beta_next[0] = 0.0;
    for (int i = 2; i >= 0; --i) {
        const double lx = tail_llr[2 * i], lz = tail_llr[2 * i + 1];
        std::fill(beta, beta + 8, neg_inf);
        for (int s = 0; s < 8; ++s) {
            const int u = rsc_term_input(s);
            const double su = u == 0 ? 0.5 : -0.5;
            const double sz = t.parity[s][u] == 0 ? 0.5 : -0.5;
            const double m = beta_next[t.next[s][u]] + su * lx + sz * lz;
            if (m > beta[s]) beta[s] = m;
        }
        std::copy(beta, beta + 8, beta_next);
    }

    extrinsic.resize(k);
    for (size_t i = k; i-- > 0;) {
        std::fill(beta, beta + 8, neg_inf);
        double best0 = neg_inf, best1 = neg_inf;
        const double* a = alpha + 8 * i;
        for (int s = 0; s < 8; ++s) {
            for (int u = 0; u < 2; ++u) {
                const double g = gamma(i, s, u);
                const double bn = beta_next[t.next[s][u]];
                if (bn == neg_inf) continue;
                if (a[s] != neg_inf) {
                    const double m = a[s] + g + bn;
                    if (u == 0) best0 = std::max(best0, m);
                    else best1 = std::max(best1, m);
                }
                const double mb = g + bn;
                if (mb > beta[s]) beta[s] = mb;
            }
        }
        extrinsic[i] = (best0 - best1) - (sys[i] + apriori[i]);
        std::copy(beta, beta + 8, beta_next);
    }
}

}  // namespace detail

// llr follows the turbo_encode layout; positive values favor bit 0.
inline TurboDecodeResult turbo_decode(const vector<double>& llr, const TurboConfig& cfg) {
    cfg.validate();
    const size_t k = cfg.block_length;
    if (llr.size() != cfg.coded_length())
        throw std::invalid_argument("turbo_decode: LLR count != coded length");
    const auto pi = qpp_permutation(k, cfg.f1, cfg.f2);

    const vector<double> sys(llr.begin(), llr.begin() + k);
    const vector<double> par1(llr.begin() + k, llr.begin() + 2 * k);
    const vector<double> par2(llr.begin() + 2 * k, llr.begin() + 3 * k);
    const double* tail1 = llr.data() + 3 * k;
    const double* tail2 = llr.data() + 3 * k + 6;

    vector<double> sys_int(k);
    for (size_t i = 0; i < k; ++i) sys_int[i] = sys[pi[i]];

    vector<double> apr1(k, 0.0), apr2(k, 0.0), ext1, ext2(k, 0.0);
    vector<double> ws;
    TurboDecodeResult res;
    res.bits.assign(k, 0);
    vector<std::uint8_t> prev_bits;

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        for (size_t i = 0; i < k; ++i) apr1[pi[i]] = cfg.extrinsic_scale * ext2[i];
        detail::siso_maxlog(sys, apr1, par1, tail1, ext1, ws);
        for (size_t i = 0; i < k; ++i) apr2[i] = cfg.extrinsic_scale * ext1[pi[i]];
        detail::siso_maxlog(sys_int, apr2, par2, tail2, ext2, ws);

        for (size_t i = 0; i < k; ++i) {
            const double total = sys_int[i] + apr2[i] + ext2[i];
            res.bits[pi[i]] = total < 0.0 ? 1 : 0;
        }
        res.iterations = iter;
        if (cfg.early_stop && iter > 1 && res.bits == prev_bits) break;
        prev_bits = res.bits;
    }
    return res;
}

}  // namespace lsalink::turbo
