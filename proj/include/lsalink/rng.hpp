// Self-contained seeded random source: xoshiro256++ core, splitmix64 seeding,
// polar-method Gaussian draws.  Standard-library engines are avoided on purpose:
// distribution algorithms are implementation-defined and campaign output must be
// bit-stable across toolchains.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace lsalink {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Order-insensitive-free mixing of a seed with a tag word; chaining calls derives
// independent substreams (point index, trial index, purpose tag).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull + (tag << 1));
    splitmix64(s);
    return splitmix64(s);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0x853c49e6748fea9bull) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
        have_spare_ = false;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1) with 53-bit resolution.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    std::uint32_t uniform_u32(std::uint32_t bound) {  // [0, bound)
        return std::uint32_t((next_u64() >> 32) * std::uint64_t(bound) >> 32);
    }

    bool bit() { return (next_u64() >> 63) != 0; }

    // Standard normal via Marsaglia polar; one spare cached between calls.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, r2;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            r2 = u * u + v * v;
        } while (r2 >= 1.0 || r2 == 0.0);
        const double f = std::sqrt(-2.0 * std::log(r2) / r2);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    // Circular complex Gaussian with E|z|^2 = variance.
    std::complex<double> cgaussian(double variance = 1.0) {
        const double s = std::sqrt(0.5 * variance);
        return {s * gaussian(), s * gaussian()};
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4] = {};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace lsalink
