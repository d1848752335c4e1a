// SPDX-License-Identifier: Apache-2.0
//
// Training/estimation/data protocol: on/off group pilots, LS channel
// estimation, estimation-error statistics and overhead-discounted rates.

#pragma once

#include <span>
#include <vector>

#include "irsofdm/channel.hpp"
#include "irsofdm/numerics.hpp"
#include "irsofdm/rng.hpp"

namespace irsofdm {

/// Frequency-domain pilot; every tone carries per_tone_power.
struct PilotSignal {
    ComplexVec x_p;
    double per_tone_power = 0.0;
};

struct ChannelEstimate {
    ComplexVec h_d_hat;  // support L
    ComplexMat Vp_hat;   // N x K, column support L0
};

/// Zadoff-Chu pilot with per-tone power P_t / N.
PilotSignal make_zc_pilot(int N, double P_t, int root = 1);

/// Received pilot symbols s_0 (all groups off) and s_k (group k on), k = 1..K.
std::vector<ComplexVec> simulate_training(const ChannelRealization& chan, const Grouping& g, const PilotSignal& pilot,
                                          double sigma2, Rng& rng);

/// Single pilot symbol through an arbitrary time-domain channel.
ComplexVec simulate_pilot_symbol(const ComplexVec& h, const PilotSignal& pilot, double sigma2, Rng& rng);

/// LS estimate of one channel: truncate_support((1/N) F^H X_p^{-1} s).
ComplexVec ls_estimate_single(const ComplexVec& received, const PilotSignal& pilot, int support);

/// LS estimates of h_d (support L) and each group channel (support L0).
ChannelEstimate ls_estimate(std::span<const ComplexVec> received, const PilotSignal& pilot, int L, int L0);

/// Upper bound on the per-subcarrier estimation MSE: sigma2 ((K+1) L + K L0) / P_t.
double mse_bound(const SystemConfig& cfg, int K);

/// Exact expected per-subcarrier MSE of the LS estimator at phibar under a
/// constant-modulus pilot of total power P_t:
/// sigma2 / P_t * (|1 - sum phibar_k|^2 L + sum |phibar_k|^2 L0).
double expected_mse(const SystemConfig& cfg, const ComplexVec& phibar);

/// Monte Carlo per-subcarrier MSE (1/N) E||F (h_d + V' phibar - h_d_hat - V'_hat phibar)||^2
/// over `draws` independent training noise realizations, estimating with
/// supports L (direct) and L0 (reflected).
double empirical_mse(const ChannelRealization& chan, const Grouping& g, const PilotSignal& pilot, double sigma2,
                     const ComplexVec& phibar, int L, int L0, int draws, Rng& rng);

/// Fraction of the coherence block left for data: 1 - (T_p + tau_D) / T_c.
/// Throws std::invalid_argument when no data time remains.
double overhead_factor(double T_p, double tau_D, double T_c);

/// (1/(N + N_CP)) sum_n log2(1 + |cfr_n|^2 p_n / (Gamma sigma2)).
double log_rate(std::span<const cplx> cfr, std::span<const double> p, const SystemConfig& cfg);

/// Rate the transmitter predicts from its estimates, discounted by K + 1 pilots.
double protocol_rate(std::span<const double> p, const ComplexVec& phibar, const ChannelEstimate& est,
                     const SystemConfig& cfg, int K);

/// Rate actually delivered over the true channel with (p, phibar) designed on `est`.
double realized_rate(std::span<const double> p, const ComplexVec& phibar, const ChannelEstimate& est,
                     const ChannelRealization& truth, const Grouping& g, const SystemConfig& cfg, int K);

} // namespace irsofdm
