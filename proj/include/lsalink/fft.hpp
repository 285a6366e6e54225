// Iterative radix-2 complex FFT for power-of-two sizes (512 for the multicarrier
// grid, 4096 for single-carrier frames and Welch segments).  Twiddles are cached
// per size so campaign inner loops pay no setup cost.
#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace lsalink {

using cvec = std::vector<std::complex<double>>;

class Fft {
  public:
    explicit Fft(std::size_t n) : n_(n) {
        if (n == 0 || (n & (n - 1)) != 0)
            throw std::invalid_argument("Fft: size must be a power of two");
        log2n_ = 0;
        while ((std::size_t(1) << log2n_) < n) ++log2n_;
        twiddle_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double ang = -2.0 * pi() * double(k) / double(n);
            twiddle_[k] = {std::cos(ang), std::sin(ang)};
        }
        bitrev_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n_; ++b) r |= ((i >> b) & 1u) << (log2n_ - 1 - b);
            bitrev_[i] = r;
        }
    }

    std::size_t size() const { return n_; }

    // In-place forward DFT, no scaling: X[k] = sum_n x[n] e^{-j2*pi*kn/N}.
    void forward(cvec& x) const { run(x, false); }

    // In-place inverse DFT with 1/N scaling.
    void inverse(cvec& x) const {
        run(x, true);
        const double inv = 1.0 / double(n_);
        for (auto& v : x) v *= inv;
    }

    static double pi() { return 3.141592653589793238462643383279502884; }

  private:
    void run(cvec& x, bool inv) const {
        if (x.size() != n_) throw std::invalid_argument("Fft: length mismatch");
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t j = bitrev_[i];
            if (i < j) std::swap(x[i], x[j]);
        }
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len >> 1;
            const std::size_t step = n_ / len;
            for (std::size_t base = 0; base < n_; base += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    std::complex<double> w = twiddle_[k * step];
                    if (inv) w = std::conj(w);
                    const std::complex<double> t = x[base + k + half] * w;
                    x[base + k + half] = x[base + k] - t;
                    x[base + k] += t;
                }
            }
        }
    }

    std::size_t n_, log2n_ = 0;
    cvec twiddle_;
    std::vector<std::size_t> bitrev_;
};

// Convenience wrappers for one-off transforms (tests, setup paths).
inline cvec fft(cvec x) {
    Fft plan(x.size());
    plan.forward(x);
    return x;
}

inline cvec ifft(cvec x) {
    Fft plan(x.size());
    plan.inverse(x);
    return x;
}

}  // namespace lsalink
