// SPDX-License-Identifier: Apache-2.0

#include "irsofdm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace irsofdm {

namespace {

constexpr double kLogGuard = 1e-12;
constexpr double kFeasSlack = 1e-12;

double relative_change(double prev, double next)
{
    return std::abs(next - prev) / std::max(std::abs(prev), 1e-300);
}

cplx project_disc(cplx z)
{
    const double a = std::abs(z);
    return a > 1.0 ? z / a : z;
}

} // namespace

ReflectCoeffs::ReflectCoeffs(ComplexVec phibar) : phibar_(std::move(phibar))
{
    for (std::size_t k = 0; k < phibar_.size(); ++k)
        if (std::abs(phibar_[k]) > 1.0 + kFeasSlack)
            throw std::invalid_argument("ReflectCoeffs: |phibar_" + std::to_string(k) + "| exceeds 1");
}

void ScaSettings::validate() const
{
    auto pos = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!pos(inner_tol)) throw ConfigError("inner_tol", "must be > 0");
    if (!pos(outer_tol)) throw ConfigError("outer_tol", "must be > 0");
    if (max_inner < 1) throw ConfigError("max_inner", "must be >= 1");
    if (max_outer < 1) throw ConfigError("max_outer", "must be >= 1");
    if (!pos(pg_step0)) throw ConfigError("pg_step0", "must be > 0");
    if (!(pg_backtrack > 0.0 && pg_backtrack < 1.0)) throw ConfigError("pg_backtrack", "must lie in (0, 1)");
    if (!pos(pg_tol)) throw ConfigError("pg_tol", "must be > 0");
}

FrequencyModel::FrequencyModel(const ComplexVec& h_d, const ComplexMat& Vp)
    : K_(Vp.cols()), d_(dft(h_d.span())), G_(h_d.size() * Vp.cols())
{
    if (Vp.rows() != h_d.size()) throw std::invalid_argument("FrequencyModel: Vp rows != length of h_d");
    const std::size_t N = h_d.size();
    for (std::size_t k = 0; k < K_; ++k) {
        const auto col = dft(Vp.col(k));
        for (std::size_t n = 0; n < N; ++n) G_[n * K_ + k] = col[n];
    }
}

ComplexVec FrequencyModel::cfr(std::span<const cplx> phibar) const
{
    if (phibar.size() != K_) throw std::invalid_argument("FrequencyModel::cfr: phibar length != K");
    ComplexVec v = d_;
    for (std::size_t n = 0; n < v.size(); ++n) {
        const cplx* row = G_.data() + n * K_;
        cplx acc{};
        for (std::size_t k = 0; k < K_; ++k) acc += row[k] * phibar[k];
        v[n] += acc;
    }
    return v;
}

std::vector<double> cnr_of(std::span<const cplx> cfr, const SystemConfig& cfg)
{
    const double noise = cfg.gamma * cfg.sigma2;
    std::vector<double> c(cfr.size());
    for (std::size_t n = 0; n < cfr.size(); ++n) c[n] = std::norm(cfr[n]) / noise;
    return c;
}

double sum_log_objective(const FrequencyModel& model, std::span<const double> p, std::span<const cplx> phibar,
                         double noise)
{
    if (p.size() != model.N()) throw std::invalid_argument("sum_log_objective: p length != N");
    const auto v = model.cfr(phibar);
    double s = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n)
        if (p[n] > 0.0) s += std::log2(1.0 + std::norm(v[n]) * p[n] / noise);
    return s;
}

double rate(std::span<const double> p, const ComplexVec& phibar, const FrequencyModel& model, const SystemConfig& cfg)
{
    return sum_log_objective(model, p, phibar.span(), cfg.gamma * cfg.sigma2) / (cfg.N + cfg.N_CP);
}

double rate(std::span<const double> p, const ComplexVec& phibar, const ComplexVec& h_d, const ComplexMat& Vp,
            const SystemConfig& cfg)
{
    return rate(p, phibar, FrequencyModel(h_d, Vp), cfg);
}

PowerAllocation waterfill(std::span<const double> cnr, double P)
{
    if (!(P > 0.0) || !std::isfinite(P)) throw std::invalid_argument("waterfill: P must be > 0");
    std::vector<std::size_t> idx;
    for (std::size_t n = 0; n < cnr.size(); ++n) {
        if (!(cnr[n] >= 0.0) || !std::isfinite(cnr[n])) throw std::invalid_argument("waterfill: cnr must be finite and >= 0");
        if (cnr[n] > 0.0) idx.push_back(n);
    }
    if (idx.empty()) throw std::invalid_argument("waterfill: no usable subcarrier (all cnr are zero)");

    // Strongest first, i.e. 1/c_n ascending.
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return cnr[a] > cnr[b]; });
    double level = 0.0;
    double inv_sum = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        inv_sum += 1.0 / cnr[idx[k]];
        const double candidate = (P + inv_sum) / static_cast<double>(k + 1);
        // Adding subcarrier k is valid only if it gets positive power.
        if (k > 0 && candidate <= 1.0 / cnr[idx[k]]) break;
        level = candidate;
    }

    PowerAllocation out;
    out.water_level = level;
    out.p.assign(cnr.size(), 0.0);
    for (std::size_t n : idx) out.p[n] = std::max(0.0, level - 1.0 / cnr[n]);
    return out;
}

double channel_power(const ComplexVec& phibar, const ComplexVec& h_d_hat, const ComplexMat& Vp_hat)
{
    return norm2(mat_vec_add(h_d_hat.span(), Vp_hat, phibar.span()).span());
}

ComplexVec successive_alignment(const ComplexVec& h_d, const ComplexMat& Vp, ComplexVec start, int sweeps,
                                const AlignmentObserver& observer)
{
    if (sweeps < 1) throw std::invalid_argument("successive_alignment: I_SA must be >= 1");
    if (start.size() != Vp.cols()) throw std::invalid_argument("successive_alignment: start length != K");
    ComplexVec phi = std::move(start);
    auto r = mat_vec_add(h_d.span(), Vp, phi.span());
    for (int s = 0; s < sweeps; ++s) {
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const auto nu = Vp.col(i);
            // r without element i, then align element i with it.
            for (std::size_t t = 0; t < r.size(); ++t) r[t] -= nu[t] * phi[i];
            const cplx z = inner(r.span(), nu);
            const ComplexVec before = observer ? phi : ComplexVec{};
            phi[i] = (z == cplx{}) ? cplx{1.0, 0.0} : std::conj(z) / std::abs(z);
            for (std::size_t t = 0; t < r.size(); ++t) r[t] += nu[t] * phi[i];
            if (observer) observer(i, before, phi);
        }
    }
    return phi;
}

ReflectCoeffs sa_init(const ComplexVec& h_d_hat, const ComplexMat& Vp_hat, int I_SA, Rng& rng)
{
    ComplexVec start(Vp_hat.cols());
    for (auto& c : start) c = std::polar(1.0, uniform(rng, 0.0, 2.0 * std::numbers::pi));
    return ReflectCoeffs(successive_alignment(h_d_hat, Vp_hat, std::move(start), I_SA));
}

ScaSurrogate::ScaSurrogate(const FrequencyModel& model, std::span<const double> p, double noise,
                           std::span<const cplx> expansion)
    : K_(model.K())
{
    if (p.size() != model.N()) throw std::invalid_argument("ScaSurrogate: p length != N");
    if (!(noise > 0.0)) throw std::invalid_argument("ScaSurrogate: noise must be > 0");
    const auto vt = model.cfr(expansion);
    for (std::size_t n = 0; n < model.N(); ++n) {
        if (!(p[n] > 0.0)) continue;
        const double c = p[n] / noise;
        const cplx v = vt[n];
        q_.push_back(1.0 + c * (2.0 * (std::conj(v) * model.direct(n)).real() - std::norm(v)));
        const cplx w = 2.0 * c * std::conj(v);
        for (std::size_t k = 0; k < K_; ++k) r_.push_back(w * model.reflect(n, k));
    }
}

double ScaSurrogate::linearized_power(double a_t, double b_t, double a, double b) noexcept
{
    return a_t * a_t + b_t * b_t + 2.0 * a_t * (a - a_t) + 2.0 * b_t * (b - b_t);
}

void ScaSurrogate::arguments(std::span<const cplx> phibar, std::vector<double>& u) const
{
    if (phibar.size() != K_) throw std::invalid_argument("ScaSurrogate: phibar length != K");
    u.resize(q_.size());
    for (std::size_t n = 0; n < q_.size(); ++n) {
        const cplx* row = r_.data() + n * K_;
        double acc = 0.0;
        for (std::size_t k = 0; k < K_; ++k)
            acc += row[k].real() * phibar[k].real() - row[k].imag() * phibar[k].imag();
        u[n] = q_[n] + acc;
    }
}

double ScaSurrogate::value(std::span<const cplx> phibar) const
{
    std::vector<double> u;
    arguments(phibar, u);
    double s = 0.0;
    for (double x : u) {
        if (!(x > kLogGuard)) return -std::numeric_limits<double>::infinity();
        s += std::log(x);
    }
    return s / std::numbers::ln2;
}

ComplexVec ScaSurrogate::gradient(std::span<const cplx> phibar) const
{
    std::vector<double> u;
    arguments(phibar, u);
    ComplexVec g(K_);
    for (std::size_t n = 0; n < u.size(); ++n) {
        const double w = 1.0 / (u[n] * std::numbers::ln2);
        const cplx* row = r_.data() + n * K_;
        for (std::size_t k = 0; k < K_; ++k) g[k] += w * std::conj(row[k]);
    }
    return g;
}

double ScaSurrogate::curvature_bound(std::span<const cplx> phibar) const
{
    std::vector<double> u;
    arguments(phibar, u);
    double s = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
        double r2 = 0.0;
        for (std::size_t k = 0; k < K_; ++k) r2 += std::norm(r_[n * K_ + k]);
        s += r2 / (u[n] * u[n]);
    }
    return s / std::numbers::ln2;
}

SubproblemResult sca_subproblem(const ReflectCoeffs& phibar_tilde, std::span<const double> p,
                                const FrequencyModel& model, const SystemConfig& cfg, const ScaSettings& settings)
{
    settings.validate();
    if (phibar_tilde.size() != model.K()) throw std::invalid_argument("sca_subproblem: phibar length != K");
    const ScaSurrogate h(model, p, cfg.gamma * cfg.sigma2, phibar_tilde.values().span());

    std::vector<cplx> x(phibar_tilde.values().begin(), phibar_tilde.values().end());
    std::vector<cplx> xn(x.size());
    double hx = h.value(x);
    const double curv = h.curvature_bound(x);
    double t = settings.pg_step0 / std::max(curv, 1e-300);

    SubproblemResult res;
    for (int it = 0; it < settings.max_inner; ++it) {
        res.iterations = it + 1;
        const auto g = h.gradient(x);
        bool accepted = false;
        double hn = hx;
        while (true) {
            double d2 = 0.0;
            double lin = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) {
                xn[k] = project_disc(x[k] + t * g[k]);
                const cplx d = xn[k] - x[k];
                d2 += std::norm(d);
                lin += (std::conj(g[k]) * d).real();
            }
            if (std::sqrt(d2) / t <= settings.pg_tol) {
                res.converged = true;
                break;
            }
            hn = h.value(xn);
            if (std::isfinite(hn) && hn >= hx && hn >= hx + lin - d2 / (2.0 * t)) {
                accepted = true;
                break;
            }
            t *= settings.pg_backtrack;
            if (t < 1e-300) {
                // No ascent available at machine precision: treat as stationary.
                res.converged = true;
                break;
            }
        }
        if (!accepted) break;
        const double rel = relative_change(hx, hn);
        x.swap(xn);
        hx = hn;
        if (rel <= settings.inner_tol) {
            res.converged = true;
            break;
        }
        t /= settings.pg_backtrack;
    }
    res.phibar = ReflectCoeffs(ComplexVec(std::move(x)));
    res.value = hx;
    return res;
}

SubproblemResult sca_subproblem(const ReflectCoeffs& phibar_tilde, std::span<const double> p, const ComplexVec& h_d_hat,
                                const ComplexMat& Vp_hat, const SystemConfig& cfg, const ScaSettings& settings)
{
    return sca_subproblem(phibar_tilde, p, FrequencyModel(h_d_hat, Vp_hat), cfg, settings);
}

ScaResult algorithm1(const ReflectCoeffs& phibar_tilde, std::span<const double> p, const FrequencyModel& model,
                     const SystemConfig& cfg, const ScaSettings& settings)
{
    settings.validate();
    const double noise = cfg.gamma * cfg.sigma2;
    ScaResult res;
    res.phibar = phibar_tilde;
    double obj = sum_log_objective(model, p, res.phibar.values().span(), noise);
    res.trace.push_back(obj);
    for (int it = 0; it < settings.max_inner; ++it) {
        res.iterations = it + 1;
        auto sub = sca_subproblem(res.phibar, p, model, cfg, settings);
        const double next = sum_log_objective(model, p, sub.phibar.values().span(), noise);
        if (next < obj) {
            // Only rounding can cause this; keep the better point.
            res.converged = true;
            break;
        }
        const double rel = relative_change(obj, next);
        res.phibar = std::move(sub.phibar);
        obj = next;
        res.trace.push_back(obj);
        if (rel <= settings.inner_tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

DesignSolution waterfill_design(const FrequencyModel& model, const ReflectCoeffs& phibar, const SystemConfig& cfg)
{
    DesignSolution sol;
    sol.phibar = phibar;
    sol.p = waterfill(cnr_of(model.cfr(phibar.values().span()).span(), cfg), cfg.P);
    sol.objective_trace.push_back(rate(sol.p.p, phibar.values(), model, cfg));
    sol.converged = true;
    return sol;
}

DesignSolution algorithm2(const ComplexVec& h_d_hat, const ComplexMat& Vp_hat, const SystemConfig& cfg,
                          const ReflectCoeffs& init, const ScaSettings& settings)
{
    settings.validate();
    const FrequencyModel model(h_d_hat, Vp_hat);
    if (init.size() != model.K()) throw std::invalid_argument("algorithm2: init length != K");

    DesignSolution sol = waterfill_design(model, init, cfg);
    sol.converged = false;
    double r = sol.objective_trace.back();
    for (int it = 0; it < settings.max_outer; ++it) {
        sol.iterations = it + 1;
        auto a1 = algorithm1(sol.phibar, sol.p.p, model, cfg, settings);
        auto p = waterfill(cnr_of(model.cfr(a1.phibar.values().span()).span(), cfg), cfg.P);
        const double next = rate(p.p, a1.phibar.values(), model, cfg);
        if (next < r) {
            sol.converged = true;
            break;
        }
        const double rel = relative_change(r, next);
        sol.phibar = std::move(a1.phibar);
        sol.p = std::move(p);
        r = next;
        sol.objective_trace.push_back(r);
        if (rel <= settings.outer_tol) {
            sol.converged = true;
            break;
        }
    }
    return sol;
}

ReflectCoeffs scheme_random_phase(std::size_t K, Rng& rng)
{
    if (K < 1) throw std::invalid_argument("scheme_random_phase: K must be >= 1");
    ComplexVec phi(K);
    for (auto& c : phi) c = std::polar(1.0, uniform(rng, 0.0, 2.0 * std::numbers::pi));
    return ReflectCoeffs(std::move(phi));
}

DesignSolution scheme_amplitude_one(const DesignSolution& sol, const ComplexVec& h_d_hat, const ComplexMat& Vp_hat,
                                    const SystemConfig& cfg)
{
    ComplexVec phi = sol.phibar.values();
    for (auto& c : phi) c = (c == cplx{}) ? cplx{1.0, 0.0} : c / std::abs(c);
    auto out = waterfill_design(FrequencyModel(h_d_hat, Vp_hat), ReflectCoeffs(std::move(phi)), cfg);
    out.iterations = sol.iterations;
    out.converged = sol.converged;
    return out;
}

} // namespace irsofdm
