// SPDX-License-Identifier: Apache-2.0

#include "irsofdm/protocol.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace irsofdm {

PilotSignal make_zc_pilot(int N, double P_t, int root)
{
    if (N < 1) throw std::invalid_argument("make_zc_pilot: N must be >= 1");
    if (!(P_t > 0.0)) throw std::invalid_argument("make_zc_pilot: P_t must be > 0");
    if (root < 1 || std::gcd(root, N) != 1) throw std::invalid_argument("make_zc_pilot: root must be coprime with N");

    const double per_tone = P_t / N;
    const double amp = std::sqrt(per_tone);
    const auto two_n = 2 * static_cast<std::int64_t>(N);
    ComplexVec x(static_cast<std::size_t>(N));
    for (std::int64_t n = 0; n < N; ++n) {
        // Reduce the quadratic index mod 2N before scaling to keep the phase exact.
        const std::int64_t q = (N % 2 == 0) ? n * n : n * (n + 1);
        const std::int64_t r = (static_cast<std::int64_t>(root) * (q % two_n)) % two_n;
        x[static_cast<std::size_t>(n)] = std::polar(amp, -std::numbers::pi * static_cast<double>(r) / N);
    }
    return {std::move(x), per_tone};
}

ComplexVec simulate_pilot_symbol(const ComplexVec& h, const PilotSignal& pilot, double sigma2, Rng& rng)
{
    if (h.size() != pilot.x_p.size()) throw std::invalid_argument("simulate_pilot_symbol: length mismatch");
    auto s = dft(h.span());
    for (std::size_t n = 0; n < s.size(); ++n) {
        s[n] *= pilot.x_p[n];
        if (sigma2 > 0.0) s[n] += complex_gaussian(rng, sigma2);
    }
    return s;
}

std::vector<ComplexVec> simulate_training(const ChannelRealization& chan, const Grouping& g, const PilotSignal& pilot,
                                          double sigma2, Rng& rng)
{
    const auto Vp = group_composite(chan.V, g);
    std::vector<ComplexVec> received;
    received.reserve(Vp.cols() + 1);
    received.push_back(simulate_pilot_symbol(chan.h_d, pilot, sigma2, rng));
    for (std::size_t k = 0; k < Vp.cols(); ++k) {
        ComplexVec h = chan.h_d;
        const auto col = Vp.col(k);
        for (std::size_t t = 0; t < h.size(); ++t) h[t] += col[t];
        received.push_back(simulate_pilot_symbol(h, pilot, sigma2, rng));
    }
    return received;
}

namespace {

// (1/N) F^H X_p^{-1} s, untruncated.
ComplexVec back_project(const ComplexVec& s, const PilotSignal& pilot)
{
    if (s.size() != pilot.x_p.size()) throw std::invalid_argument("ls_estimate: received length != pilot length");
    ComplexVec y(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        if (std::abs(pilot.x_p[n]) < 1e-12)
            throw std::invalid_argument("ls_estimate: pilot tone " + std::to_string(n) + " is not invertible");
        y[n] = s[n] / pilot.x_p[n];
    }
    return idft(y.span());
}

void truncate(ComplexVec& h, int support)
{
    for (std::size_t t = static_cast<std::size_t>(support); t < h.size(); ++t) h[t] = cplx{};
}

} // namespace

ComplexVec ls_estimate_single(const ComplexVec& received, const PilotSignal& pilot, int support)
{
    if (support < 1 || static_cast<std::size_t>(support) > received.size())
        throw std::invalid_argument("ls_estimate: support must lie in [1, N]");
    auto h = back_project(received, pilot);
    truncate(h, support);
    return h;
}

ChannelEstimate ls_estimate(std::span<const ComplexVec> received, const PilotSignal& pilot, int L, int L0)
{
    if (received.empty()) throw std::invalid_argument("ls_estimate: no received pilot symbols");
    const std::size_t N = received.front().size();
    if (L > L0) throw std::invalid_argument("ls_estimate: L > L0 would truncate the direct-link estimate");
    if (L < 1 || static_cast<std::size_t>(L0) > N) throw std::invalid_argument("ls_estimate: need 1 <= L <= L0 <= N");

    ChannelEstimate est;
    est.h_d_hat = ls_estimate_single(received[0], pilot, L);
    est.Vp_hat = ComplexMat(N, received.size() - 1);
    for (std::size_t k = 1; k < received.size(); ++k) {
        auto nu = back_project(received[k], pilot);
        for (std::size_t t = 0; t < N; ++t) nu[t] -= est.h_d_hat[t];
        truncate(nu, L0);
        est.Vp_hat.set_column(k - 1, nu.span());
    }
    return est;
}

double mse_bound(const SystemConfig& cfg, int K)
{
    return cfg.sigma2 * ((K + 1.0) * cfg.L + static_cast<double>(K) * cfg.L0()) / cfg.P_t;
}

double expected_mse(const SystemConfig& cfg, const ComplexVec& phibar)
{
    cplx sum{};
    double mag2 = 0.0;
    for (const auto& c : phibar) {
        sum += c;
        mag2 += std::norm(c);
    }
    return cfg.sigma2 / cfg.P_t * (std::norm(1.0 - sum) * cfg.L + mag2 * cfg.L0());
}

double empirical_mse(const ChannelRealization& chan, const Grouping& g, const PilotSignal& pilot, double sigma2,
                     const ComplexVec& phibar, int L, int L0, int draws, Rng& rng)
{
    if (draws < 1) throw std::invalid_argument("empirical_mse: draws must be >= 1");
    if (phibar.size() != static_cast<std::size_t>(g.K())) throw std::invalid_argument("empirical_mse: phibar length != K");
    for (const auto& c : phibar)
        if (std::abs(c) > 1.0 + 1e-12) throw std::invalid_argument("empirical_mse: |phibar_k| must be <= 1");

    const auto Vp = group_composite(chan.V, g);
    const auto truth = mat_vec_add(chan.h_d.span(), Vp, phibar.span());
    const double n = static_cast<double>(truth.size());
    double acc = 0.0;
    for (int i = 0; i < draws; ++i) {
        const auto rx = simulate_training(chan, g, pilot, sigma2, rng);
        const auto est = ls_estimate(rx, pilot, L, L0);
        auto err = mat_vec_add(est.h_d_hat.span(), est.Vp_hat, phibar.span());
        for (std::size_t t = 0; t < err.size(); ++t) err[t] = truth[t] - err[t];
        acc += norm2(dft(err.span()).span()) / n;
    }
    return acc / draws;
}

double overhead_factor(double T_p, double tau_D, double T_c)
{
    if (T_p + tau_D >= T_c)
        throw std::invalid_argument("training plus feedback (" + std::to_string(T_p + tau_D) +
                                    " symbols) leaves no data time in coherence block T_c=" + std::to_string(T_c));
    if (std::isinf(T_c)) return 1.0;
    return 1.0 - (T_p + tau_D) / T_c;
}

double log_rate(std::span<const cplx> cfr, std::span<const double> p, const SystemConfig& cfg)
{
    if (cfr.size() != p.size()) throw std::invalid_argument("log_rate: p length != N");
    const double noise = cfg.gamma * cfg.sigma2;
    double s = 0.0;
    for (std::size_t n = 0; n < cfr.size(); ++n)
        if (p[n] > 0.0) s += std::log2(1.0 + std::norm(cfr[n]) * p[n] / noise);
    return s / (cfg.N + cfg.N_CP);
}

namespace {

void check_design(std::span<const double> p, const ComplexVec& phibar, const SystemConfig& cfg, int K)
{
    if (p.size() != static_cast<std::size_t>(cfg.N)) throw std::invalid_argument("rate: p length != N");
    if (phibar.size() != static_cast<std::size_t>(K)) throw std::invalid_argument("rate: phibar length != K");
    double total = 0.0;
    for (double v : p) {
        if (v < 0.0) throw std::invalid_argument("rate: negative power");
        total += v;
    }
    if (total > cfg.P * (1.0 + 1e-9)) throw std::invalid_argument("rate: total power exceeds P");
    for (const auto& c : phibar)
        if (std::abs(c) > 1.0 + 1e-12) throw std::invalid_argument("rate: |phibar_k| must be <= 1");
}

} // namespace

double protocol_rate(std::span<const double> p, const ComplexVec& phibar, const ChannelEstimate& est,
                     const SystemConfig& cfg, int K)
{
    check_design(p, phibar, cfg, K);
    const double factor = overhead_factor(K + 1.0, cfg.tau_D, cfg.T_c);
    const auto v_hat = effective_cfr(est.h_d_hat, est.Vp_hat, phibar);
    return factor * log_rate(v_hat.span(), p, cfg);
}

double realized_rate(std::span<const double> p, const ComplexVec& phibar, const ChannelEstimate& est,
                     const ChannelRealization& truth, const Grouping& g, const SystemConfig& cfg, int K)
{
    check_design(p, phibar, cfg, K);
    if (est.Vp_hat.cols() != static_cast<std::size_t>(K) || g.K() != K)
        throw std::invalid_argument("realized_rate: estimate and grouping disagree on K");
    const double factor = overhead_factor(K + 1.0, cfg.tau_D, cfg.T_c);
    const auto v = effective_cfr(truth.h_d, group_composite(truth.V, g), phibar);
    return factor * log_rate(v.span(), p, cfg);
}

} // namespace irsofdm
