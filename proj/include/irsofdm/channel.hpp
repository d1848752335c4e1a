// SPDX-License-Identifier: Apache-2.0
//
// Channel generation for the IRS-assisted OFDM link: Rayleigh direct link,
// LoS+NLoS cascaded reflected links with geometry-correlated LoS phases,
// element grouping and effective frequency responses.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irsofdm/numerics.hpp"
#include "irsofdm/rng.hpp"

namespace irsofdm {

/// Raised for an invalid configuration; `key()` names the offending field.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key))
    {
    }
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

double db_to_linear(double db) noexcept;
double linear_to_db(double lin) noexcept;

/// Scenario parameters of a single link. Powers and ratios are linear.
struct SystemConfig {
    int N = 64;      // subcarriers
    int N_CP = 16;   // cyclic prefix, samples
    int L = 16;      // direct-link taps
    int L1 = 4;      // BS-IRS taps
    int L2 = 13;     // IRS-user taps
    int M_x = 5;
    int M_y = 4;
    int B_x = 1;     // group tile rows
    int B_y = 1;     // group tile columns
    double zeta_BI = db_to_linear(3.0);   // may be +inf (pure LoS)
    double zeta_Iu = db_to_linear(-20.0);
    double alpha = 0.1;
    double gamma = db_to_linear(8.8);
    double sigma2 = 1.0;
    double P = 64.0 * db_to_linear(5.0);
    double P_t = 20.0 * 64.0 * db_to_linear(5.0);
    double T_c = 900.0;  // OFDM symbols
    double tau_D = 0.0;  // OFDM symbols
    // User-side and BS-side angles of arrival (radians); drawn per realization when unset.
    std::optional<double> psi_e;
    std::optional<double> psi_a;
    std::optional<double> psi_e_bs;
    std::optional<double> psi_a_bs;
    double d = 0.01;
    double lambda = 0.0857;
    std::uint64_t seed = 1;
    int zc_root = 1;
    int I_SA = 10;

    int M() const noexcept { return M_x * M_y; }
    int L0() const noexcept { return L1 + L2 - 1; }
    int B() const noexcept { return B_x * B_y; }
    int K() const noexcept { return M() / B(); }
    /// Direct-link reference SNR P / (N sigma2).
    double snr() const noexcept { return P / (N * sigma2); }

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;
};

struct ChannelRealization {
    ComplexVec h_d;  // length N, support L
    ComplexMat V;    // N x M, column m = zero-padded nu_m, natural element order
    double P_d_realized = 0.0;
    // Angles actually used (user side, BS side).
    double psi_e = 0.0;
    double psi_a = 0.0;
    double psi_e_bs = 0.0;
    double psi_a_bs = 0.0;
};

/// Partition of the M_x x M_y array into B_x x B_y rectangular tiles.
///
/// Elements are indexed row-major, m = (m_x - 1) * M_y + (m_y - 1). Tiles are
/// numbered row-major as well. `order()` relabels elements so that group k
/// occupies positions [k B, (k + 1) B), which is the layout phi = phibar (x) 1_B
/// assumes.
class Grouping {
public:
    Grouping(int M_x, int M_y, int B_x, int B_y);

    /// Tile shape for grouping ratio rho = K / M: the most square B_x x B_y
    /// (B_x <= B_y on ties) with B_x | M_x and B_y | M_y.
    static Grouping from_ratio(int M_x, int M_y, double rho);
    static Grouping from_config(const SystemConfig& cfg) { return {cfg.M_x, cfg.M_y, cfg.B_x, cfg.B_y}; }

    int M() const noexcept { return M_x_ * M_y_; }
    int K() const noexcept { return static_cast<int>(M() / B()); }
    int B() const noexcept { return B_x_ * B_y_; }
    int B_x() const noexcept { return B_x_; }
    int B_y() const noexcept { return B_y_; }
    double ratio() const noexcept { return static_cast<double>(K()) / M(); }

    /// Group index of natural element m.
    int group_of(int m) const { return assignment_.at(static_cast<std::size_t>(m)); }
    const std::vector<int>& assignment() const noexcept { return assignment_; }
    /// order()[k * B + b] = natural index of the b-th element of group k.
    const std::vector<int>& order() const noexcept { return order_; }

    /// V with columns permuted into group-contiguous order.
    ComplexMat relabel(const ComplexMat& V) const;
    /// Per-element coefficients in natural order.
    ComplexVec expand(const ComplexVec& phibar) const;

private:
    int M_x_, M_y_, B_x_, B_y_;
    std::vector<int> assignment_;
    std::vector<int> order_;
};

ComplexVec gen_direct_channel(const SystemConfig& cfg, Rng& rng);

/// omega(m_x, m_y) for 1-based grid position, with the given angles.
double los_phase_offset(const SystemConfig& cfg, int m_x, int m_y, double psi_e, double psi_a);
/// Same, using the user-side angles in cfg (which must be set).
double los_phase_offset(const SystemConfig& cfg, int m_x, int m_y);

/// Per-element composite channels nu_m = h_m * g_m, scaled so E||nu_m||^2 = alpha.
/// Angles are taken from cfg when set, else drawn uniformly in [0, pi/2] from rng.
ComplexMat gen_reflected_channels(const SystemConfig& cfg, Rng& rng, double* angles_out = nullptr);

/// Direct plus reflected channels of one realization.
ChannelRealization gen_channel(const SystemConfig& cfg, Rng& rng);

/// Column k = sum of V's columns assigned to group k.
ComplexMat group_composite(const ComplexMat& V, const Grouping& g);

/// dft(h_d + Vp * phibar).
ComplexVec effective_cfr(const ComplexVec& h_d, const ComplexMat& Vp, const ComplexVec& phibar);

} // namespace irsofdm
