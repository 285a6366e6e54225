#include <catch2/catch_amalgamated.hpp>

#include "lsalink/modem.hpp"

using namespace lsalink;
using namespace lsalink::modem;

TEST_CASE("qpsk mapping and unit energy", "[modem]") {
    const auto block = modulate_bits({0, 0, 0, 1, 1, 0, 1, 1}, ModScheme::qpsk);
    const double a = 1.0 / std::sqrt(2.0);
    REQUIRE(block.symbols.size() == 4);
    REQUIRE(std::abs(block.symbols[0] - std::complex<double>(a, a)) < 1e-15);
    REQUIRE(std::abs(block.symbols[1] - std::complex<double>(a, -a)) < 1e-15);
    REQUIRE(std::abs(block.symbols[2] - std::complex<double>(-a, a)) < 1e-15);
    REQUIRE(std::abs(block.symbols[3] - std::complex<double>(-a, -a)) < 1e-15);
    double e = 0.0;
    for (auto& s : block.symbols) e += std::norm(s);
    REQUIRE(e / 4.0 == Catch::Approx(1.0));
}

TEST_CASE("qam16 mapping unit energy and gray roundtrip", "[modem]") {
    std::vector<std::uint8_t> bits;
    for (int v = 0; v < 16; ++v)
        for (int b = 3; b >= 0; --b) bits.push_back(std::uint8_t((v >> b) & 1));
    const auto block = modulate_bits(bits, ModScheme::qam16);
    REQUIRE(block.symbols.size() == 16);

    double e = 0.0;
    for (auto& s : block.symbols) e += std::norm(s);
    REQUIRE(e / 16.0 == Catch::Approx(1.0));

    // all 16 symbols distinct, hard demap recovers the bits exactly
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = i + 1; j < 16; ++j)
            REQUIRE(std::abs(block.symbols[i] - block.symbols[j]) > 1e-6);
    const auto llr = llr_demap(block.symbols, ModScheme::qam16, {0.1});
    REQUIRE(hard_bits(llr) == bits);

    // spot-check the 36.211 corner points
    const double a = 1.0 / std::sqrt(10.0);
    REQUIRE(std::abs(block.symbols[0] - std::complex<double>(a, a)) < 1e-15);      // 0000
    REQUIRE(std::abs(block.symbols[3] - std::complex<double>(3 * a, 3 * a)) < 1e-15);  // 0011
    REQUIRE(std::abs(block.symbols[15] - std::complex<double>(-3 * a, -3 * a)) < 1e-15);
}

TEST_CASE("qpsk llr closed form", "[modem]") {
    const cvec rx = {{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}, {-0.3, 0.8}};
    const auto llr = llr_demap(rx, ModScheme::qpsk, {1.0});
    REQUIRE(llr[0] == Catch::Approx(2.0));  // 2*sqrt(2)*Re / sigma^2
    REQUIRE(llr[1] == Catch::Approx(2.0));
    REQUIRE(llr[2] == Catch::Approx(2.0 * std::sqrt(2.0) * -0.3));
    REQUIRE(llr[3] == Catch::Approx(2.0 * std::sqrt(2.0) * 0.8));

    // per-symbol variance vector scales entries independently
    const auto llr2 = llr_demap(rx, ModScheme::qpsk, {1.0, 4.0});
    REQUIRE(llr2[0] == Catch::Approx(llr[0]));
    REQUIRE(llr2[2] == Catch::Approx(llr[2] / 4.0));
    REQUIRE_THROWS_AS(llr_demap(rx, ModScheme::qpsk, {1.0, 1.0, 1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(llr_demap(rx, ModScheme::qpsk, {0.0}), std::invalid_argument);
}

TEST_CASE("qam16 llr against exhaustive max-log oracle", "[modem]") {
    // oracle: brute-force min distance over the bit partitions of the full
    // constellation, for every bit position
    std::vector<std::uint8_t> bits;
    for (int v = 0; v < 16; ++v)
        for (int b = 3; b >= 0; --b) bits.push_back(std::uint8_t((v >> b) & 1));
    const auto cons = modulate_bits(bits, ModScheme::qam16);

    Rng rng(31);
    const double nv = 0.37;
    cvec rx(64);
    for (auto& s : rx) s = rng.cgaussian(1.4);
    const auto llr = llr_demap(rx, ModScheme::qam16, {nv});
    for (std::size_t i = 0; i < rx.size(); ++i)
        for (int b = 0; b < 4; ++b) {
            double d0 = 1e300, d1 = 1e300;
            for (int v = 0; v < 16; ++v) {
                const double d = std::norm(rx[i] - cons.symbols[v]);
                if (bits[4 * v + b] == 0) d0 = std::min(d0, d);
                else d1 = std::min(d1, d);
            }
            REQUIRE(llr[4 * i + b] == Catch::Approx((d1 - d0) / nv).margin(1e-12));
        }
}

TEST_CASE("awgn injected variance", "[modem]") {
    Rng rng(77);
    cvec samples(1000000, 0.0);
    add_awgn(samples, 0.42, rng);
    std::complex<double> mean = 0.0;
    double power = 0.0;
    for (auto& s : samples) {
        mean += s;
        power += std::norm(s);
    }
    mean /= double(samples.size());
    power /= double(samples.size());
    REQUIRE(std::abs(power - 0.42) < 0.42 * 0.01);
    REQUIRE(std::abs(mean) < 4.0 * std::sqrt(0.42 / double(samples.size())));

    cvec quiet(16, {1.0, -1.0});
    add_awgn(quiet, 0.0, rng);
    for (auto& s : quiet) REQUIRE(s == std::complex<double>(1.0, -1.0));
    REQUIRE_THROWS_AS(add_awgn(quiet, -0.5, rng), std::invalid_argument);
}

TEST_CASE("rrc taps shape and singular points", "[modem]") {
    const auto p = rrc_taps(0.22, 12, 2);
    REQUIRE(p.taps.size() == 2 * 12 * 2 + 1);
    double e = 0.0;
    for (double v : p.taps) e += v * v;
    REQUIRE(e == Catch::Approx(1.0).epsilon(1e-12));
    // symmetric, peak at center
    const std::size_t c = p.taps.size() / 2;
    for (std::size_t i = 0; i < p.taps.size(); ++i) {
        REQUIRE(p.taps[i] == Catch::Approx(p.taps[p.taps.size() - 1 - i]).margin(1e-12));
        REQUIRE(p.taps[i] <= p.taps[c] + 1e-12);
    }
    // the 1/(4 beta) singularity lands between grid points at alpha=2, so probe directly
    REQUIRE(std::isfinite(rrc_value(1.0 / (4.0 * 0.22), 0.22)));
    REQUIRE(std::isfinite(rrc_value(0.0, 0.22)));
    // continuity across the singular point
    const double s = 1.0 / (4.0 * 0.22);
    REQUIRE(std::abs(rrc_value(s, 0.22) - rrc_value(s + 1e-7, 0.22)) < 1e-5);
    REQUIRE_THROWS_AS(rrc_taps(-0.1, 12, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(rrc_taps(0.22, 0, 2), std::invalid_argument);
}

TEST_CASE("rrc pair is near-nyquist", "[modem]") {
    const auto p = rrc_taps(0.22, 12, 2);
    // tx filter convolved with its matched filter, sampled at symbol lags
    const std::size_t n = p.taps.size();
    std::vector<double> conv(2 * n - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) conv[i + j] += p.taps[i] * p.taps[j];
    const std::size_t mid = n - 1;
    REQUIRE(conv[mid] == Catch::Approx(1.0).epsilon(1e-12));  // unit-energy matched peak
    for (std::size_t lag = 2; mid + lag < conv.size(); lag += 2) {
        // span-12 truncation leaves ~1.3e-3 peak residual at the first symbol lag
        REQUIRE(std::abs(conv[mid + lag]) < 2e-3);
        REQUIRE(std::abs(conv[mid - lag]) < 2e-3);
    }
}

TEST_CASE("rc value nyquist zeros and singularity", "[modem]") {
    REQUIRE(rc_value(0.0, 0.22) == Catch::Approx(1.0));
    for (int k = 1; k <= 8; ++k) REQUIRE(std::abs(rc_value(double(k), 0.22)) < 1e-14);
    const double s = 1.0 / (2.0 * 0.22);
    REQUIRE(std::isfinite(rc_value(s, 0.22)));
    REQUIRE(std::abs(rc_value(s, 0.22) - rc_value(s + 1e-7, 0.22)) < 1e-5);
    // beta=0 reduces to sinc
    REQUIRE(rc_value(0.5, 0.0) == Catch::Approx(std::sin(Fft::pi() * 0.5) / (Fft::pi() * 0.5)));
}

TEST_CASE("rc pulse sampler has unit grid energy", "[modem]") {
    const double ts = 1.0 / 4.2e6;
    const auto ps = rc_pulse_sampler(0.22, 12, ts, 2);
    double e = 0.0;
    for (long n = -100; n <= 100; ++n) {
        const double t = double(n) * ts / 2.0;
        if (std::abs(t) <= ps.half_width) e += ps.value(t) * ps.value(t);
    }
    REQUIRE(e == Catch::Approx(1.0).epsilon(1e-12));
}
