// SPDX-License-Identifier: Apache-2.0

#include "irsofdm/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace irsofdm {

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) noexcept { return 10.0 * std::log10(lin); }

namespace {

void require(bool ok, const char* key, const std::string& what)
{
    if (!ok) throw ConfigError(key, what);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

} // namespace

void SystemConfig::validate() const
{
    require(N >= 1, "N", "must be >= 1");
    require(L >= 1, "L", "must be >= 1");
    require(L1 >= 1, "L1", "must be >= 1");
    require(L2 >= 1, "L2", "must be >= 1");
    require(L <= L0(), "L", "must not exceed L1 + L2 - 1");
    require(L0() <= N, "L2", "reflected-link length L1 + L2 - 1 exceeds N");
    require(N_CP >= std::max(L, L0()), "N_CP", "must cover max(L, L1 + L2 - 1)");
    require(M_x >= 1, "M_x", "must be >= 1");
    require(M_y >= 1, "M_y", "must be >= 1");
    require(B_x >= 1 && M_x % B_x == 0, "B_x", "must divide M_x");
    require(B_y >= 1 && M_y % B_y == 0, "B_y", "must divide M_y");
    require(zeta_BI >= 0.0 && !std::isnan(zeta_BI), "zeta_BI", "must be >= 0");
    require(zeta_Iu >= 0.0 && !std::isnan(zeta_Iu), "zeta_Iu", "must be >= 0");
    require(std::isfinite(alpha) && alpha >= 0.0, "alpha", "must be >= 0");
    require(std::isfinite(gamma) && gamma >= 1.0, "gamma", "SNR gap must be >= 1 (0 dB)");
    require(positive_finite(sigma2), "sigma2", "must be > 0");
    require(positive_finite(P), "P", "must be > 0");
    require(positive_finite(P_t), "P_t", "must be > 0");
    require(T_c > 0.0 && !std::isnan(T_c), "T_c", "must be > 0");
    require(std::isfinite(tau_D) && tau_D >= 0.0, "tau_D", "must be >= 0");
    require(positive_finite(d), "d", "must be > 0");
    require(positive_finite(lambda), "lambda", "must be > 0");
    require(zc_root >= 1 && std::gcd(zc_root, N) == 1, "zc_root", "must be >= 1 and coprime with N");
    require(I_SA >= 1, "I_SA", "must be >= 1");
    for (const auto* a : {&psi_e, &psi_a, &psi_e_bs, &psi_a_bs})
        require(!a->has_value() || std::isfinite(**a), "psi", "angles must be finite");
}

Grouping::Grouping(int M_x, int M_y, int B_x, int B_y) : M_x_(M_x), M_y_(M_y), B_x_(B_x), B_y_(B_y)
{
    if (M_x < 1 || M_y < 1) throw ConfigError("M_x", "array dimensions must be >= 1");
    if (B_x < 1 || M_x % B_x != 0) throw ConfigError("B_x", "must divide M_x");
    if (B_y < 1 || M_y % B_y != 0) throw ConfigError("B_y", "must divide M_y");

    const int M = M_x * M_y;
    const int B = B_x * B_y;
    const int tiles_y = M_y / B_y;
    assignment_.assign(static_cast<std::size_t>(M), 0);
    order_.assign(static_cast<std::size_t>(M), 0);
    std::vector<int> fill(static_cast<std::size_t>(M / B), 0);
    for (int mx = 0; mx < M_x; ++mx) {
        for (int my = 0; my < M_y; ++my) {
            const int m = mx * M_y + my;
            const int k = (mx / B_x) * tiles_y + (my / B_y);
            assignment_[static_cast<std::size_t>(m)] = k;
            order_[static_cast<std::size_t>(k * B + fill[static_cast<std::size_t>(k)]++)] = m;
        }
    }
}

Grouping Grouping::from_ratio(int M_x, int M_y, double rho)
{
    const int M = M_x * M_y;
    const double k_real = rho * M;
    const int K = static_cast<int>(std::lround(k_real));
    if (!(rho > 0.0) || K < 1 || std::abs(k_real - K) > 1e-9 * M || M % K != 0)
        throw ConfigError("grouping_ratio", "ratio " + std::to_string(rho) + " does not give an integer group count dividing M=" +
                                                std::to_string(M));
    const int B = M / K;
    int best_x = 0;
    int best_y = 0;
    for (int bx = 1; bx <= B; ++bx) {
        if (B % bx != 0) continue;
        const int by = B / bx;
        if (M_x % bx != 0 || M_y % by != 0) continue;
        // Most square first, then B_x <= B_y.
        const std::pair key{std::abs(by - bx), bx > by};
        const std::pair best{std::abs(best_y - best_x), best_x > best_y};
        if (best_x == 0 || key < best) {
            best_x = bx;
            best_y = by;
        }
    }
    if (best_x == 0)
        throw ConfigError("grouping_ratio", "no rectangular tile of " + std::to_string(B) + " elements fits a " +
                                                std::to_string(M_x) + "x" + std::to_string(M_y) + " array");
    return {M_x, M_y, best_x, best_y};
}

ComplexMat Grouping::relabel(const ComplexMat& V) const
{
    if (V.cols() != static_cast<std::size_t>(M())) throw std::invalid_argument("Grouping::relabel: column count != M");
    ComplexMat out(V.rows(), V.cols());
    for (std::size_t i = 0; i < order_.size(); ++i) out.set_column(i, V.col(static_cast<std::size_t>(order_[i])));
    return out;
}

ComplexVec Grouping::expand(const ComplexVec& phibar) const
{
    if (phibar.size() != static_cast<std::size_t>(K())) throw std::invalid_argument("Grouping::expand: length != K");
    ComplexVec phi(static_cast<std::size_t>(M()));
    for (std::size_t m = 0; m < assignment_.size(); ++m) phi[m] = phibar[static_cast<std::size_t>(assignment_[m])];
    return phi;
}

ComplexVec gen_direct_channel(const SystemConfig& cfg, Rng& rng)
{
    ComplexVec h(static_cast<std::size_t>(cfg.N));
    const double tap_var = 1.0 / cfg.L;
    for (int l = 0; l < cfg.L; ++l) h[static_cast<std::size_t>(l)] = complex_gaussian(rng, tap_var);
    return h;
}

double los_phase_offset(const SystemConfig& cfg, int m_x, int m_y, double psi_e, double psi_a)
{
    if (m_x < 1 || m_x > cfg.M_x || m_y < 1 || m_y > cfg.M_y)
        throw std::out_of_range("los_phase_offset: element position outside the array");
    const double k = 2.0 * std::numbers::pi / cfg.lambda;
    return k * ((m_x - 1) * cfg.d * std::sin(psi_e) * std::sin(psi_a) + (m_y - 1) * cfg.d * std::cos(psi_e));
}

double los_phase_offset(const SystemConfig& cfg, int m_x, int m_y)
{
    if (!cfg.psi_e || !cfg.psi_a) throw std::invalid_argument("los_phase_offset: user-side angles not set");
    return los_phase_offset(cfg, m_x, m_y, *cfg.psi_e, *cfg.psi_a);
}

namespace {

// One L-tap link: LoS on tap 0 with the given phase, NLoS on the rest, unit
// ensemble power split by the LoS-to-NLoS ratio zeta. A single-tap link is Rician.
std::vector<cplx> los_nlos_link(int taps, double zeta, double los_phase, Rng& rng)
{
    const double los_pow = std::isinf(zeta) ? 1.0 : zeta / (1.0 + zeta);
    const double nlos_pow = std::isinf(zeta) ? 0.0 : 1.0 / (1.0 + zeta);
    std::vector<cplx> h(static_cast<std::size_t>(taps));
    h[0] = std::polar(std::sqrt(los_pow), los_phase);
    if (taps == 1) {
        h[0] += complex_gaussian(rng, nlos_pow);
    } else {
        const double var = nlos_pow / (taps - 1);
        for (int l = 1; l < taps; ++l) h[static_cast<std::size_t>(l)] = complex_gaussian(rng, var);
    }
    return h;
}

} // namespace

ComplexMat gen_reflected_channels(const SystemConfig& cfg, Rng& rng, double* angles_out)
{
    const double half_pi = std::numbers::pi / 2.0;
    // Always consume the same draws so explicit angles do not shift the stream.
    double angles[4];
    for (double& a : angles) a = uniform(rng, 0.0, half_pi);
    const double psi_e = cfg.psi_e.value_or(angles[0]);
    const double psi_a = cfg.psi_a.value_or(angles[1]);
    const double psi_e_bs = cfg.psi_e_bs.value_or(angles[2]);
    const double psi_a_bs = cfg.psi_a_bs.value_or(angles[3]);
    if (angles_out) {
        angles_out[0] = psi_e;
        angles_out[1] = psi_a;
        angles_out[2] = psi_e_bs;
        angles_out[3] = psi_a_bs;
    }
    const double ref_bi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double ref_iu = uniform(rng, 0.0, 2.0 * std::numbers::pi);

    const auto N = static_cast<std::size_t>(cfg.N);
    const double scale = std::sqrt(cfg.alpha);
    ComplexMat V(N, static_cast<std::size_t>(cfg.M()));
    for (int mx = 1; mx <= cfg.M_x; ++mx) {
        for (int my = 1; my <= cfg.M_y; ++my) {
            const auto m = static_cast<std::size_t>((mx - 1) * cfg.M_y + (my - 1));
            const auto h = los_nlos_link(cfg.L1, cfg.zeta_BI, ref_bi + los_phase_offset(cfg, mx, my, psi_e_bs, psi_a_bs), rng);
            const auto g = los_nlos_link(cfg.L2, cfg.zeta_Iu, ref_iu + los_phase_offset(cfg, mx, my, psi_e, psi_a), rng);
            auto nu = linear_convolve(h, g);
            auto col = V.col(m);
            for (std::size_t t = 0; t < nu.size(); ++t) col[t] = scale * nu[t];
        }
    }
    return V;
}

ChannelRealization gen_channel(const SystemConfig& cfg, Rng& rng)
{
    ChannelRealization ch;
    ch.h_d = gen_direct_channel(cfg, rng);
    ch.P_d_realized = norm2(ch.h_d.span());
    double angles[4];
    ch.V = gen_reflected_channels(cfg, rng, angles);
    ch.psi_e = angles[0];
    ch.psi_a = angles[1];
    ch.psi_e_bs = angles[2];
    ch.psi_a_bs = angles[3];
    return ch;
}

ComplexMat group_composite(const ComplexMat& V, const Grouping& g)
{
    if (V.cols() != static_cast<std::size_t>(g.M())) throw std::invalid_argument("group_composite: V has " +
                                                                                 std::to_string(V.cols()) + " columns, grouping expects " +
                                                                                 std::to_string(g.M()));
    ComplexMat Vp(V.rows(), static_cast<std::size_t>(g.K()));
    for (std::size_t m = 0; m < V.cols(); ++m) {
        auto dst = Vp.col(static_cast<std::size_t>(g.group_of(static_cast<int>(m))));
        const auto src = V.col(m);
        for (std::size_t r = 0; r < V.rows(); ++r) dst[r] += src[r];
    }
    return Vp;
}

ComplexVec effective_cfr(const ComplexVec& h_d, const ComplexMat& Vp, const ComplexVec& phibar)
{
    return dft(mat_vec_add(h_d.span(), Vp, phibar.span()).span());
}

} // namespace irsofdm
