// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>

#include "irsofdm/optimizer.hpp"
#include "irsofdm/protocol.hpp"
#include "oracles.hpp"

using namespace irsofdm;

namespace {

// Solves A x = b (square) by Gaussian elimination with partial pivoting.
std::vector<cplx> solve(std::vector<std::vector<cplx>> A, std::vector<cplx> b)
{
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const cplx f = A[r][c] / A[c][c];
            for (std::size_t j = c; j < n; ++j) A[r][j] -= f * A[c][j];
            b[r] -= f * b[c];
        }
    }
    std::vector<cplx> x(n);
    for (std::size_t i = n; i-- > 0;) {
        cplx s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x;
}

// argmin_h ||s - X_p F[:, :taps] h||^2 via the normal equations.
std::vector<cplx> ls_oracle(const ComplexVec& s, const PilotSignal& pilot, std::size_t taps)
{
    const std::size_t N = s.size();
    std::vector<std::vector<cplx>> A(N, std::vector<cplx>(taps));
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t l = 0; l < taps; ++l)
            A[n][l] = pilot.x_p[n] * std::polar(1.0, -2.0 * std::numbers::pi * double(n * l % N) / double(N));
    std::vector<std::vector<cplx>> G(taps, std::vector<cplx>(taps));
    std::vector<cplx> rhs(taps);
    for (std::size_t i = 0; i < taps; ++i) {
        for (std::size_t j = 0; j < taps; ++j)
            for (std::size_t n = 0; n < N; ++n) G[i][j] += std::conj(A[n][i]) * A[n][j];
        for (std::size_t n = 0; n < N; ++n) rhs[i] += std::conj(A[n][i]) * s[n];
    }
    return solve(G, rhs);
}

ChannelRealization random_channel(const SystemConfig& cfg, std::uint64_t seed)
{
    Rng rng(seed);
    return gen_channel(cfg, rng);
}

} // namespace

TEST_CASE("make_zc_pilot")
{
    const auto p4 = make_zc_pilot(4, 4.0);
    for (auto x : p4.x_p) CHECK(std::abs(x) == doctest::Approx(1.0));

    const double P = 64 * db_to_linear(5.0);
    const auto p = make_zc_pilot(64, 20 * P);
    CHECK(p.per_tone_power == doctest::Approx(20 * P / 64));
    for (auto x : p.x_p) CHECK(std::norm(x) == doctest::Approx(20 * P / 64));

    for (int N : {64, 63}) {
        const auto z = make_zc_pilot(N, 20 * P);
        for (int lag = 1; lag < N; ++lag) {
            cplx r{};
            for (int n = 0; n < N; ++n) r += z.x_p[static_cast<std::size_t>(n)] * std::conj(z.x_p[static_cast<std::size_t>((n + lag) % N)]);
            CHECK(std::abs(r) <= 1e-9 * 20 * P);
        }
    }
    CHECK_THROWS(make_zc_pilot(0, 1.0));
    CHECK_THROWS(make_zc_pilot(64, 0.0));
    CHECK_THROWS(make_zc_pilot(64, 1.0, 2));
}

TEST_CASE("simulate_training without noise")
{
    SystemConfig cfg;
    cfg.B_y = 4;  // K = 5
    const auto chan = random_channel(cfg, 3);
    const Grouping g = Grouping::from_config(cfg);
    const auto Vp = group_composite(chan.V, g);
    const auto pilot = make_zc_pilot(cfg.N, cfg.P_t);
    Rng rng(1);
    const auto rx = simulate_training(chan, g, pilot, 0.0, rng);
    REQUIRE(rx.size() == 6);
    const auto dv = dft(Vp.col(0));
    for (std::size_t n = 0; n < 64; ++n) CHECK(std::abs(rx[1][n] - rx[0][n] - pilot.x_p[n] * dv[n]) < 1e-10);

    ChannelRealization zero = chan;
    zero.h_d = ComplexVec(64);
    const auto rz = simulate_training(zero, g, pilot, 0.0, rng);
    for (auto z : rz[0]) CHECK(z == cplx{});
}

TEST_CASE("simulate_training noise variance")
{
    SystemConfig cfg;
    cfg.B_x = 5;
    cfg.B_y = 4;  // K = 1
    const auto chan = random_channel(cfg, 5);
    const Grouping g = Grouping::from_config(cfg);
    const auto pilot = make_zc_pilot(cfg.N, cfg.P_t);
    const auto clean = dft(chan.h_d.span());
    Rng rng(17);
    std::vector<double> acc(64, 0.0);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const auto rx = simulate_training(chan, g, pilot, 0.1, rng);
        for (std::size_t n = 0; n < 64; ++n) acc[n] += std::norm(rx[0][n] - pilot.x_p[n] * clean[n]);
    }
    // Pooled over tones the standard error is 0.125%; per tone it is 1%, so the
    // per-tone band is widened to 4 standard errors to cover 64 comparisons.
    double pooled = 0.0;
    for (double a : acc) {
        pooled += a / draws / 64;
        CHECK(a / draws >= 0.096);
        CHECK(a / draws <= 0.104);
    }
    CHECK(pooled >= 0.097);
    CHECK(pooled <= 0.103);
}

TEST_CASE("ls_estimate")
{
    SystemConfig cfg;
    const auto chan = random_channel(cfg, 8);
    const Grouping g(5, 4, 1, 2);
    const auto Vp = group_composite(chan.V, g);
    const auto pilot = make_zc_pilot(cfg.N, cfg.P_t);
    Rng rng(2);

    SUBCASE("noiseless recovery")
    {
        const auto rx = simulate_training(chan, g, pilot, 0.0, rng);
        const auto est = ls_estimate(rx, pilot, cfg.L, cfg.L0());
        for (std::size_t t = 0; t < 64; ++t) CHECK(std::abs(est.h_d_hat[t] - chan.h_d[t]) < 1e-10);
        for (std::size_t k = 0; k < Vp.cols(); ++k)
            for (std::size_t t = 0; t < 64; ++t) CHECK(std::abs(est.Vp_hat(t, k) - Vp(t, k)) < 1e-10);
    }
    SUBCASE("no reflected power")
    {
        auto rx = simulate_training(chan, g, pilot, 0.0, rng);
        for (std::size_t k = 1; k < rx.size(); ++k) rx[k] = rx[0];
        const auto est = ls_estimate(rx, pilot, cfg.L, cfg.L0());
        for (std::size_t k = 0; k < est.Vp_hat.cols(); ++k)
            for (std::size_t t = 0; t < 64; ++t) CHECK(std::abs(est.Vp_hat(t, k)) < 1e-12);
    }
    SUBCASE("matches normal-equations oracle with noise")
    {
        SystemConfig c2 = cfg;
        c2.L = 8;  // direct support shorter than the reflected one
        const auto rx = simulate_training(chan, g, pilot, 1.0, rng);
        const auto est = ls_estimate(rx, pilot, c2.L, c2.L0());
        const auto hd = ls_oracle(rx[0], pilot, 8);
        for (std::size_t t = 0; t < 64; ++t) CHECK(std::abs(est.h_d_hat[t] - (t < 8 ? hd[t] : cplx{})) < 1e-9);
        for (std::size_t k = 0; k < 3; ++k) {
            const auto full = ls_oracle(rx[k + 1], pilot, 16);
            for (std::size_t t = 0; t < 64; ++t) {
                const cplx expect = t < 16 ? full[t] - (t < 8 ? hd[t] : cplx{}) : cplx{};
                CHECK(std::abs(est.Vp_hat(t, k) - expect) < 1e-9);
            }
        }
    }
    SUBCASE("errors")
    {
        const auto rx = simulate_training(chan, g, pilot, 0.0, rng);
        CHECK_THROWS_AS(ls_estimate(rx, pilot, 17, 16), std::invalid_argument);
        PilotSignal bad = pilot;
        bad.x_p[5] = 0.0;
        CHECK_THROWS_AS(ls_estimate(rx, bad, 16, 16), std::invalid_argument);
    }
}

TEST_CASE("ls_estimate is unbiased")
{
    SystemConfig cfg;
    const auto chan = random_channel(cfg, 4);
    const Grouping g(5, 4, 5, 4);
    const auto pilot = make_zc_pilot(cfg.N, cfg.P_t);
    Rng rng(6);
    const int draws = 1000;
    std::vector<cplx> mean(16);
    for (int i = 0; i < draws; ++i) {
        const auto est = ls_estimate(simulate_training(chan, g, pilot, cfg.sigma2, rng), pilot, cfg.L, cfg.L0());
        for (std::size_t t = 0; t < 16; ++t) mean[t] += est.h_d_hat[t] / double(draws);
    }
    // Per-tap error variance is sigma2 / P_t; 3 standard errors per (complex) tap.
    const double se = std::sqrt(cfg.sigma2 / cfg.P_t / draws);
    for (std::size_t t = 0; t < 16; ++t) CHECK(std::abs(mean[t] - chan.h_d[t]) <= 3 * se);
}

TEST_CASE("mse_bound")
{
    SystemConfig cfg;
    CHECK(mse_bound(cfg, 0) == doctest::Approx(cfg.sigma2 * cfg.L / cfg.P_t));
    cfg.sigma2 = 0.1;
    cfg.P_t = 128;
    CHECK(mse_bound(cfg, 4) == doctest::Approx(0.1125));
    SystemConfig twice = cfg;
    twice.P_t *= 2;
    CHECK(mse_bound(twice, 4) == doctest::Approx(mse_bound(cfg, 4) / 2));
}

TEST_CASE("empirical_mse")
{
    SystemConfig cfg;
    cfg.B_y = 2;  // K = 10
    const auto chan = random_channel(cfg, 12);
    const Grouping g = Grouping::from_config(cfg);
    const auto pilot = make_zc_pilot(cfg.N, cfg.P_t);
    Rng rng(3);
    std::mt19937_64 gen(4);
    ComplexVec phi(10);
    for (auto& c : phi) c = oracle::unit_phase(gen);

    CHECK(empirical_mse(chan, g, pilot, 0.0, phi, cfg.L, cfg.L0(), 5, rng) < 1e-20);
    CHECK_THROWS(empirical_mse(chan, g, pilot, 1.0, phi, cfg.L, cfg.L0(), 0, rng));

    // IRS off: only the direct estimate contributes.
    const double off = empirical_mse(chan, g, pilot, cfg.sigma2, ComplexVec(10), cfg.L, cfg.L0(), 2000, rng);
    CHECK(off == doctest::Approx(cfg.sigma2 * cfg.L / cfg.P_t).epsilon(0.05));

    // Against the closed form at a fixed phibar.
    const double mc = empirical_mse(chan, g, pilot, cfg.sigma2, phi, cfg.L, cfg.L0(), 2000, rng);
    CHECK(mc == doctest::Approx(expected_mse(cfg, phi)).epsilon(0.05));

    // The closed form averages to the bound over random phases.
    double avg = 0.0;
    for (int i = 0; i < 20000; ++i) {
        for (auto& c : phi) c = oracle::unit_phase(gen);
        avg += expected_mse(cfg, phi) / 20000;
    }
    CHECK(avg == doctest::Approx(mse_bound(cfg, 10)).epsilon(0.02));
}

TEST_CASE("overhead and rates")
{
    CHECK(overhead_factor(10, 0, 100) == doctest::Approx(0.9));
    CHECK(overhead_factor(10, 0, std::numeric_limits<double>::infinity()) == 1.0);
    CHECK_THROWS_AS(overhead_factor(100, 0, 100), std::invalid_argument);
    CHECK_THROWS_AS(overhead_factor(90, 10, 100), std::invalid_argument);
    for (int K = 1; K < 50; ++K) CHECK(overhead_factor(K + 2, 1, 300) < overhead_factor(K + 1, 1, 300));

    SystemConfig cfg;
    const auto chan = random_channel(cfg, 21);
    const Grouping g = Grouping::from_config(cfg);
    const ChannelEstimate truth{chan.h_d, group_composite(chan.V, g)};
    const int K = g.K();
    std::mt19937_64 gen(1);
    ComplexVec phi(static_cast<std::size_t>(K));
    for (auto& c : phi) c = oracle::disc_point(gen);
    const std::vector<double> zero(64, 0.0);
    CHECK(protocol_rate(zero, phi, truth, cfg, K) == 0.0);

    const auto pa = waterfill(cnr_of(effective_cfr(truth.h_d_hat, truth.Vp_hat, phi).span(), cfg), cfg.P);
    const double r8 = rate(pa.p, phi, truth.h_d_hat, truth.Vp_hat, cfg);
    const double factor = 1.0 - (K + 1.0) / cfg.T_c;
    CHECK(protocol_rate(pa.p, phi, truth, cfg, K) == doctest::Approx(factor * r8));
    CHECK(realized_rate(pa.p, phi, truth, chan, g, cfg, K) == doctest::Approx(protocol_rate(pa.p, phi, truth, cfg, K)));

    SystemConfig inf = cfg;
    inf.T_c = std::numeric_limits<double>::infinity();
    CHECK(protocol_rate(pa.p, phi, truth, inf, K) == doctest::Approx(r8));

    const ComplexVec off(static_cast<std::size_t>(K));
    const auto vd = dft(chan.h_d.span());
    CHECK(realized_rate(pa.p, off, truth, chan, g, cfg, K) == doctest::Approx(factor * log_rate(vd.span(), pa.p, cfg)));

    std::vector<double> too_much = pa.p;
    too_much[0] += cfg.P;
    CHECK_THROWS(protocol_rate(too_much, phi, truth, cfg, K));
    SystemConfig short_block = cfg;
    short_block.T_c = K + 1;
    CHECK_THROWS(protocol_rate(pa.p, phi, truth, short_block, K));
}
