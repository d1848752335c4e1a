// SPDX-License-Identifier: Apache-2.0
//
// Joint transmit power / IRS reflection design.
//
// Given (estimated) channels h_d and V', the rate
//
//   r(p, phibar) = 1/(N + N_CP) sum_n log2(1 + |f_n^H (h_d + V' phibar)|^2 p_n / (Gamma sigma2))
//
// is maximized over sum p_n <= P, p_n >= 0 and |phibar_k| <= 1 by alternating
// water-filling with a successive-convex-approximation (minorize-maximize)
// update of phibar. Each SCA step replaces |v_n|^2 = a_n^2 + b_n^2 by its
// tangent plane at the current point, which makes the per-step problem
// concave; it is solved by projected gradient ascent over the product of unit
// discs. The channel-power maximizing successive alignment supplies the start.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "irsofdm/channel.hpp"
#include "irsofdm/numerics.hpp"
#include "irsofdm/rng.hpp"

namespace irsofdm {

struct PowerAllocation {
    std::vector<double> p;
    double water_level = 0.0;  // 1 / c_u
};

/// Group reflection coefficients, |phibar_k| <= 1.
class ReflectCoeffs {
public:
    ReflectCoeffs() = default;
    /// Throws std::invalid_argument if some |phibar_k| > 1 + 1e-12.
    explicit ReflectCoeffs(ComplexVec phibar);

    const ComplexVec& values() const noexcept { return phibar_; }
    std::size_t size() const noexcept { return phibar_.size(); }
    const cplx& operator[](std::size_t k) const noexcept { return phibar_[k]; }

private:
    ComplexVec phibar_;
};

struct ScaSettings {
    double inner_tol = 1e-6;     // relative objective change, SCA and projected gradient
    double outer_tol = 1e-5;     // relative rate change, alternating loop
    int max_inner = 200;
    int max_outer = 300;
    double pg_step0 = 1.0;       // initial step, in units of the inverse local curvature bound
    double pg_backtrack = 0.5;
    double pg_tol = 1e-8;        // projected-gradient norm

    void validate() const;
};

struct DesignSolution {
    PowerAllocation p;
    ReflectCoeffs phibar;
    std::vector<double> objective_trace;  // rate (bps/Hz); entry 0 is the initial point
    bool converged = false;
    int iterations = 0;
};

/// Frequency-domain view of (h_d, V'): d = F h_d and G = F V', row-major.
class FrequencyModel {
public:
    FrequencyModel(const ComplexVec& h_d, const ComplexMat& Vp);

    std::size_t N() const noexcept { return d_.size(); }
    std::size_t K() const noexcept { return K_; }
    const cplx& direct(std::size_t n) const noexcept { return d_[n]; }
    const cplx& reflect(std::size_t n, std::size_t k) const noexcept { return G_[n * K_ + k]; }

    /// v = d + G phibar.
    ComplexVec cfr(std::span<const cplx> phibar) const;

private:
    std::size_t K_;
    ComplexVec d_;
    std::vector<cplx> G_;
};

/// Per-subcarrier CNR |v_n|^2 / (Gamma sigma2).
std::vector<double> cnr_of(std::span<const cplx> cfr, const SystemConfig& cfg);

/// r(p, phibar) in bps/Hz.
double rate(std::span<const double> p, const ComplexVec& phibar, const ComplexVec& h_d, const ComplexMat& Vp,
            const SystemConfig& cfg);
double rate(std::span<const double> p, const ComplexVec& phibar, const FrequencyModel& model, const SystemConfig& cfg);

/// sum_n log2(1 + |v_n|^2 p_n / noise), the objective of the phibar-step.
double sum_log_objective(const FrequencyModel& model, std::span<const double> p, std::span<const cplx> phibar,
                         double noise);

/// Water-filling p_n = (mu - 1/cnr_n)^+ with sum p_n = P.
/// Throws std::invalid_argument if P <= 0, some cnr_n < 0, or all cnr_n == 0.
PowerAllocation waterfill(std::span<const double> cnr, double P);

/// ||h_d + Vp phibar||^2.
double channel_power(const ComplexVec& phibar, const ComplexVec& h_d_hat, const ComplexMat& Vp_hat);

/// Called after each single-coefficient update with the coefficient index and
/// the vectors before and after the update.
using AlignmentObserver = std::function<void(std::size_t, const ComplexVec&, const ComplexVec&)>;

/// `sweeps` passes of successive alignment from `start` (unit modulus).
ComplexVec successive_alignment(const ComplexVec& h_d, const ComplexMat& Vp, ComplexVec start, int sweeps,
                                const AlignmentObserver& observer = {});

/// Successive alignment from random unit-modulus phases.
ReflectCoeffs sa_init(const ComplexVec& h_d_hat, const ComplexMat& Vp_hat, int I_SA, Rng& rng);

/// Concave surrogate of the phibar-step objective linearized at `expansion`:
///
///   h(phibar) = sum_n log2(1 + p_n f_n(phibar) / noise),
///   f_n = a~_n^2 + b~_n^2 + 2 a~_n (a_n - a~_n) + 2 b~_n (b_n - b~_n),
///
/// with (a_n, b_n) the real/imaginary parts of v_n(phibar). Only subcarriers
/// with p_n > 0 contribute.
class ScaSurrogate {
public:
    ScaSurrogate(const FrequencyModel& model, std::span<const double> p, double noise, std::span<const cplx> expansion);

    /// -infinity when some log argument drops to 1e-12 or below.
    double value(std::span<const cplx> phibar) const;
    /// Gradient w.r.t. (Re phibar_k, Im phibar_k), packed as a complex number per k.
    ComplexVec gradient(std::span<const cplx> phibar) const;
    /// Upper bound on the gradient's Lipschitz constant at phibar.
    double curvature_bound(std::span<const cplx> phibar) const;

    std::size_t K() const noexcept { return K_; }

    /// The tangent-plane lower bound f_n of a^2 + b^2 at (a_t, b_t).
    static double linearized_power(double a_t, double b_t, double a, double b) noexcept;

private:
    void arguments(std::span<const cplx> phibar, std::vector<double>& u) const;

    std::size_t K_;
    std::vector<double> q_;    // 1 + c_n f_n at phibar = 0, per active subcarrier
    std::vector<cplx> r_;      // c_n * 2 conj(v~_n) G_nk, row-major over active subcarriers
};

struct SubproblemResult {
    ReflectCoeffs phibar;
    double value = 0.0;  // surrogate at phibar
    int iterations = 0;
    bool converged = false;
};

/// Maximizes the surrogate expanded at phibar_tilde over |phibar_k| <= 1.
SubproblemResult sca_subproblem(const ReflectCoeffs& phibar_tilde, std::span<const double> p,
                                const FrequencyModel& model, const SystemConfig& cfg, const ScaSettings& settings);
SubproblemResult sca_subproblem(const ReflectCoeffs& phibar_tilde, std::span<const double> p, const ComplexVec& h_d_hat,
                                const ComplexMat& Vp_hat, const SystemConfig& cfg, const ScaSettings& settings);

struct ScaResult {
    ReflectCoeffs phibar;
    std::vector<double> trace;  // phibar-step objective; entry 0 at phibar_tilde
    int iterations = 0;
    bool converged = false;
};

/// Repeated surrogate maximization with re-expansion at each new iterate.
ScaResult algorithm1(const ReflectCoeffs& phibar_tilde, std::span<const double> p, const FrequencyModel& model,
                     const SystemConfig& cfg, const ScaSettings& settings);

/// Alternates water-filling and algorithm1 from `init`.
DesignSolution algorithm2(const ComplexVec& h_d_hat, const ComplexMat& Vp_hat, const SystemConfig& cfg,
                          const ReflectCoeffs& init, const ScaSettings& settings);

/// Water-filling for fixed coefficients, packaged as a one-point solution.
DesignSolution waterfill_design(const FrequencyModel& model, const ReflectCoeffs& phibar, const SystemConfig& cfg);

/// I.i.d. uniform phases, unit amplitude.
ReflectCoeffs scheme_random_phase(std::size_t K, Rng& rng);

/// Forces |phibar_k| = 1 (zero coefficients get phase 0) and re-runs water-filling.
DesignSolution scheme_amplitude_one(const DesignSolution& sol, const ComplexVec& h_d_hat, const ComplexMat& Vp_hat,
                                    const SystemConfig& cfg);

} // namespace irsofdm
