#include <catch2/catch_amalgamated.hpp>

#include "lsalink/modem.hpp"
#include "lsalink/ofdm_link.hpp"
#include "lsalink/rng.hpp"

using namespace lsalink;
using namespace lsalink::ofdm;

namespace {

cvec random_qpsk(std::size_t n, Rng& rng) {
    std::vector<std::uint8_t> bits(2 * n);
    for (auto& b : bits) b = rng.bit() ? 1 : 0;
    return modem::modulate_bits(bits, modem::ModScheme::qpsk).symbols;
}

double rel_rms(const cvec& a, const cvec& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("config validation and bin layout", "[ofdm_link]") {
    OfdmConfig cfg;
    REQUIRE_NOTHROW(cfg.validate());
    REQUIRE(cfg.subcarrier_spacing() == Catch::Approx(15e3));
    REQUIRE(cfg.symbol_samples() == 552);

    const auto idx = cfg.bin_indices();
    REQUIRE(idx.size() == 300);
    REQUIRE(idx.front() == 512 - 150);  // lowest negative frequency
    REQUIRE(idx[149] == 511);           // -1 subcarrier
    REQUIRE(idx[150] == 1);             // +1 subcarrier
    REQUIRE(idx.back() == 150);
    for (auto b : idx) REQUIRE(b != 0);  // DC stays empty

    const auto f = cfg.bin_frequencies();
    REQUIRE(f.front() == Catch::Approx(-2.25e6));
    REQUIRE(f.back() == Catch::Approx(2.25e6));
    REQUIRE(f[149] == Catch::Approx(-15e3));

    OfdmConfig bad = cfg;
    bad.used = 301;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.nfft = 500;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.cp = 512;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

    REQUIRE(symbols_per_frame(cfg, 930) == 4);
    REQUIRE(symbols_per_frame(cfg, 465) == 2);
    REQUIRE(symbols_per_frame(cfg, 300) == 1);
}

TEST_CASE("tx matches direct idft evaluation", "[ofdm_link]") {
    OfdmConfig cfg;
    cfg.nfft = 8;
    cfg.used = 4;
    cfg.cp = 3;
    Rng rng(50);
    const auto slots = random_qpsk(4, rng);
    const auto tx = ofdm_tx(slots, cfg);
    REQUIRE(tx.size() == 11);

    // slot i -> bin: {6,7,1,2}; x[n] = (1/sqrt(8)) sum_k X[k] e^{j2 pi k n/8}
    const std::size_t bins[4] = {6, 7, 1, 2};
    for (std::size_t n = 0; n < 8; ++n) {
        std::complex<double> x(0.0, 0.0);
        for (std::size_t i = 0; i < 4; ++i) {
            const double ph = 2.0 * Fft::pi() * double(bins[i]) * double(n) / 8.0;
            x += slots[i] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        x /= std::sqrt(8.0);
        REQUIRE(std::abs(tx[3 + n] - x) < 1e-12);
    }
    // cyclic prefix copies the tail
    for (std::size_t n = 0; n < 3; ++n) REQUIRE(std::abs(tx[n] - tx[8 + n]) < 1e-15);
}

TEST_CASE("tx power follows parseval", "[ofdm_link]") {
    OfdmConfig cfg;
    Rng rng(51);
    const auto slots = random_qpsk(4 * cfg.used, rng);
    const auto tx = ofdm_tx(slots, cfg);
    double core = 0.0;
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t n = 0; n < cfg.nfft; ++n)
            core += std::norm(tx[s * cfg.symbol_samples() + cfg.cp + n]);
    REQUIRE(core == Catch::Approx(4.0 * cfg.used).epsilon(1e-9));

    REQUIRE_THROWS_AS(ofdm_tx(random_qpsk(299, rng), cfg), std::invalid_argument);
}

TEST_CASE("apply_channel is a per-antenna linear convolution", "[ofdm_link]") {
    channel::DiscreteChannel dc;
    dc.kind = channel::DiscretizeKind::grid_snapped;
    dc.sample_rate = 7.68e6;
    dc.origin = 0;
    dc.taps = {{{1.0, 0.0}, {0.0, 0.0}, {0.0, -0.5}}};
    cvec tx = {{1.0, 0.0}, {2.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}};
    const auto rx = apply_channel(tx, dc);
    REQUIRE(rx.size() == 1);
    REQUIRE(std::abs(rx[0][0] - std::complex<double>(1.0, 0.0)) < 1e-15);
    REQUIRE(std::abs(rx[0][1] - std::complex<double>(2.0, 0.0)) < 1e-15);
    REQUIRE(std::abs(rx[0][2] - std::complex<double>(0.0, 0.5)) < 1e-15);  // j + (-j/2)*1
    REQUIRE(std::abs(rx[0][3] - std::complex<double>(0.0, -1.0)) < 1e-15);
}

TEST_CASE("noiseless etu roundtrip recovers slots", "[ofdm_link]") {
    OfdmConfig cfg;
    const auto prof = channel::etu_profile();
    Rng rng(52);
    const auto real = channel::draw_channel(prof, 2, rng);
    const auto dc = channel::discretize(real, cfg.sample_rate,
                                        channel::DiscretizeKind::grid_snapped);
    const auto slots = random_qpsk(4 * cfg.used, rng);
    const auto tx = ofdm_tx(slots, cfg);
    const auto rx = apply_channel(tx, dc);
    const auto h = bin_response(dc, cfg);
    const auto res = rx_traditional(rx, h, cfg, 0.1);
    REQUIRE(res.est.size() == slots.size());
    REQUIRE(rel_rms(res.est, slots) < 1e-9);
    for (std::size_t i = 0; i < cfg.used; ++i)
        REQUIRE(res.noise_var[i] == Catch::Approx(0.1 / res.a[i]));
}

TEST_CASE("matched-filter route equals traditional route", "[ofdm_link]") {
    OfdmConfig cfg;
    const auto prof = channel::etu_profile();
    Rng rng(53);
    const auto real = channel::draw_channel(prof, 8, rng);
    const auto dc = channel::discretize(real, cfg.sample_rate,
                                        channel::DiscretizeKind::grid_snapped);
    const auto slots = random_qpsk(2 * cfg.used, rng);
    const auto tx = ofdm_tx(slots, cfg);
    auto rx = apply_channel(tx, dc);
    for (auto& stream : rx) modem::add_awgn(stream, 0.8, rng);

    const auto h = bin_response(dc, cfg);
    const auto trad = rx_traditional(rx, h, cfg, 0.8);
    const auto mf = rx_matched_filter(rx, dc, cfg, 0.8);
    REQUIRE(rel_rms(mf.est, trad.est) < 1e-9);
    for (std::size_t i = 0; i < cfg.used; ++i) {
        REQUIRE(mf.a[i] == Catch::Approx(trad.a[i]).margin(1e-12));
        REQUIRE(mf.noise_var[i] == Catch::Approx(trad.noise_var[i]).margin(1e-12));
    }
}

TEST_CASE("combining gain concentrates around antenna count", "[ofdm_link]") {
    OfdmConfig cfg;
    const auto prof = channel::etu_profile();
    Rng rng(54);
    const auto real = channel::draw_channel(prof, 100, rng);
    const auto dc = channel::discretize(real, cfg.sample_rate,
                                        channel::DiscretizeKind::grid_snapped);
    const auto h = bin_response(dc, cfg);
    std::vector<double> a(cfg.used, 0.0);
    for (const auto& hm : h)
        for (std::size_t i = 0; i < cfg.used; ++i) a[i] += std::norm(hm[i]);
    double mean = 0.0;
    for (double v : a) mean += v;
    mean /= double(cfg.used);
    REQUIRE(std::abs(mean - 100.0) < 15.0);  // E[A] = M, std(A[k]) = sqrt(M)
    for (double v : a) REQUIRE(std::abs(v - 100.0) < 45.0);
}

TEST_CASE("awgn through the receiver has the advertised llr variance", "[ofdm_link]") {
    // flat unit channel, one antenna: per-slot noise variance should equal n0
    OfdmConfig cfg;
    channel::DiscreteChannel dc;
    dc.kind = channel::DiscretizeKind::grid_snapped;
    dc.sample_rate = cfg.sample_rate;
    dc.origin = 0;
    dc.taps = {{{1.0, 0.0}}};
    Rng rng(55);
    const double n0 = 0.25;
    const std::size_t frames = 40;
    double err2 = 0.0;
    std::size_t count = 0;
    for (std::size_t f = 0; f < frames; ++f) {
        const auto slots = random_qpsk(cfg.used, rng);
        const auto tx = ofdm_tx(slots, cfg);
        auto rx = apply_channel(tx, dc);
        modem::add_awgn(rx[0], n0, rng);
        const auto h = bin_response(dc, cfg);
        const auto res = rx_traditional(rx, h, cfg, n0);
        for (std::size_t i = 0; i < cfg.used; ++i) {
            REQUIRE(res.noise_var[i] == Catch::Approx(n0));
            err2 += std::norm(res.est[i] - slots[i]);
            ++count;
        }
    }
    // empirical per-slot error variance matches n0 within 5%
    REQUIRE(err2 / double(count) == Catch::Approx(n0).epsilon(0.05));
}
