// SPDX-License-Identifier: Apache-2.0

#include "irsofdm/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "irsofdm/protocol.hpp"

namespace irsofdm {

namespace {

constexpr Scheme kSchemes[] = {Scheme::iterative, Scheme::amplitude_one, Scheme::cpm_init, Scheme::random_phase,
                               Scheme::no_irs};
constexpr CsiMode kModes[] = {CsiMode::perfect, CsiMode::estimated};
constexpr SweepAxis kAxes[] = {SweepAxis::snr,           SweepAxis::elements,       SweepAxis::alpha,
                               SweepAxis::grouping_ratio, SweepAxis::coherence_time, SweepAxis::convergence_trace};

template <typename E, std::size_t n>
E parse_enum(const E (&all)[n], std::string_view token, const char* key, const char* what)
{
    for (E e : all)
        if (to_string(e) == token) return e;
    std::string allowed;
    for (E e : all) allowed += (allowed.empty() ? "" : ", ") + std::string(to_string(e));
    throw ConfigError(key, std::string("unknown ") + what + " '" + std::string(token) + "' (expected one of " + allowed + ")");
}

bool is_whole(double v) { return std::isfinite(v) && v == std::floor(v); }

} // namespace

std::string_view to_string(Scheme s) noexcept
{
    switch (s) {
    case Scheme::iterative: return "iterative";
    case Scheme::amplitude_one: return "amplitude_one";
    case Scheme::cpm_init: return "cpm_init";
    case Scheme::random_phase: return "random_phase";
    case Scheme::no_irs: return "no_irs";
    }
    return "?";
}

std::string_view to_string(CsiMode m) noexcept
{
    return m == CsiMode::perfect ? "perfect" : "estimated";
}

std::string_view to_string(SweepAxis a) noexcept
{
    switch (a) {
    case SweepAxis::snr: return "snr";
    case SweepAxis::elements: return "elements";
    case SweepAxis::alpha: return "alpha";
    case SweepAxis::grouping_ratio: return "grouping_ratio";
    case SweepAxis::coherence_time: return "coherence_time";
    case SweepAxis::convergence_trace: return "convergence_trace";
    }
    return "?";
}

Scheme parse_scheme(std::string_view token, const char* key) { return parse_enum(kSchemes, token, key, "scheme"); }
CsiMode parse_csi_mode(std::string_view token, const char* key) { return parse_enum(kModes, token, key, "CSI mode"); }
SweepAxis parse_sweep_axis(std::string_view token, const char* key)
{
    return parse_enum(kAxes, token, key, "sweep axis");
}

SystemConfig Scenario::config_at(double value) const
{
    SystemConfig cfg = base;
    switch (sweep_axis) {
    case SweepAxis::snr:
        if (!std::isfinite(value)) throw ConfigError("sweep_values", "SNR must be finite");
        cfg.P = cfg.N * cfg.sigma2 * db_to_linear(value);
        cfg.P_t = pt_over_p * cfg.P;
        break;
    case SweepAxis::elements: {
        if (!is_whole(value) || value < 5 || static_cast<long>(value) % 5 != 0)
            throw ConfigError("sweep_values", "element count " + std::to_string(value) + " is not a positive multiple of M_x=5");
        cfg.M_x = 5;
        cfg.M_y = static_cast<int>(value) / 5;
        cfg.B_x = cfg.B_y = 1;
        break;
    }
    case SweepAxis::alpha: cfg.alpha = value; break;
    case SweepAxis::grouping_ratio: {
        const auto g = Grouping::from_ratio(cfg.M_x, cfg.M_y, value);
        cfg.B_x = g.B_x();
        cfg.B_y = g.B_y();
        break;
    }
    case SweepAxis::coherence_time: cfg.T_c = value; break;
    case SweepAxis::convergence_trace:
        if (!is_whole(value) || value < 0)
            throw ConfigError("sweep_values", "convergence_trace values must be 0 (random start) or I_SA >= 1");
        if (value >= 1) cfg.I_SA = static_cast<int>(value);
        break;
    }
    return cfg;
}

void Scenario::validate() const
{
    if (sweep_values.empty()) throw ConfigError("sweep_values", "must not be empty");
    if (schemes.empty()) throw ConfigError("schemes", "must not be empty");
    if (n_realizations < 1) throw ConfigError("n_realizations", "must be >= 1");
    if (!(pt_over_p > 0.0) || !std::isfinite(pt_over_p)) throw ConfigError("pt_over_p", "must be > 0");
    sca.validate();
    base.validate();
    for (double v : sweep_values) {
        const auto cfg = config_at(v);
        cfg.validate();
        if (csi_mode == CsiMode::estimated && cfg.K() + 1 + cfg.tau_D >= cfg.T_c)
            throw ConfigError("T_c", "K+1 training symbols plus tau_D leave no data time at sweep value " +
                                         std::to_string(v));
    }
}

namespace {

struct Prepared {
    SystemConfig cfg;
    Grouping g{1, 1, 1, 1};
    ChannelRealization chan;
    ComplexMat Vp;  // true group composites
    ChannelEstimate est;
    PilotSignal pilot;
    std::uint64_t rseed = 0;
};

Prepared prepare(const Scenario& sc, double value, int r)
{
    Prepared w;
    w.cfg = sc.config_at(value);
    w.rseed = realization_seed(w.cfg.seed, static_cast<std::uint64_t>(r));
    auto crng = make_stream(w.rseed, Stream::channel);
    w.chan = gen_channel(w.cfg, crng);
    w.g = Grouping::from_config(w.cfg);
    w.Vp = group_composite(w.chan.V, w.g);
    if (sc.csi_mode == CsiMode::estimated) {
        w.pilot = make_zc_pilot(w.cfg.N, w.cfg.P_t, w.cfg.zc_root);
        auto nrng = make_stream(w.rseed, Stream::training_noise);
        const auto rx = simulate_training(w.chan, w.g, w.pilot, w.cfg.sigma2, nrng);
        w.est = ls_estimate(rx, w.pilot, w.cfg.L, w.cfg.L0());
    } else {
        w.est = {w.chan.h_d, w.Vp};
    }
    return w;
}

ReflectCoeffs initializer(const Scenario& sc, double value, const Prepared& w)
{
    auto irng = make_stream(w.rseed, Stream::initializer);
    if (sc.sweep_axis == SweepAxis::convergence_trace && value == 0.0)
        return scheme_random_phase(static_cast<std::size_t>(w.g.K()), irng);
    return sa_init(w.est.h_d_hat, w.est.Vp_hat, w.cfg.I_SA, irng);
}

ComplexVec time_error(const ComplexVec& truth, const ComplexVec& estimate)
{
    ComplexVec e(truth.size());
    for (std::size_t t = 0; t < e.size(); ++t) e[t] = truth[t] - estimate[t];
    return e;
}

std::vector<ResultRow> run_point(const Scenario& sc, double value, int r)
{
    const Prepared w = prepare(sc, value, r);
    const auto& cfg = w.cfg;
    const bool estimated = sc.csi_mode == CsiMode::estimated;
    const int K = w.g.K();
    const FrequencyModel truth(w.chan.h_d, w.Vp);

    auto row_for = [&](Scheme s) {
        ResultRow row;
        row.scenario_id = sc.scenario_id;
        row.realization_index = r;
        row.seed = cfg.seed;
        row.sweep_value = value;
        row.scheme = s;
        row.csi_mode = sc.csi_mode;
        return row;
    };
    // Row for a group-coefficient design computed from the estimates.
    auto design_row = [&](Scheme s, const DesignSolution& sol) {
        auto row = row_for(s);
        const auto& phi = sol.phibar.values();
        row.rate_bps_hz = estimated ? realized_rate(sol.p.p, phi, w.est, w.chan, w.g, cfg, K) : rate(sol.p.p, phi, truth, cfg);
        row.iterations = sol.iterations;
        row.converged = sol.converged;
        row.channel_power = channel_power(phi, w.chan.h_d, w.Vp);
        if (estimated) {
            // Per-subcarrier error equals the time-domain error energy by Parseval.
            const auto e = time_error(mat_vec_add(w.chan.h_d.span(), w.Vp, phi.span()),
                                      mat_vec_add(w.est.h_d_hat.span(), w.est.Vp_hat, phi.span()));
            row.mse_empirical = norm2(e.span());
        }
        return row;
    };

    auto wants = [&](Scheme s) { return std::find(sc.schemes.begin(), sc.schemes.end(), s) != sc.schemes.end(); };

    std::vector<ResultRow> rows;
    std::optional<ReflectCoeffs> init;
    if (wants(Scheme::iterative) || wants(Scheme::amplitude_one) || wants(Scheme::cpm_init)) init = initializer(sc, value, w);
    std::optional<DesignSolution> iterative;
    if (wants(Scheme::iterative) || wants(Scheme::amplitude_one))
        iterative = algorithm2(w.est.h_d_hat, w.est.Vp_hat, cfg, *init, sc.sca);

    for (Scheme s : kSchemes) {
        if (!wants(s)) continue;
        switch (s) {
        case Scheme::iterative: rows.push_back(design_row(s, *iterative)); break;
        case Scheme::amplitude_one:
            rows.push_back(design_row(s, scheme_amplitude_one(*iterative, w.est.h_d_hat, w.est.Vp_hat, cfg)));
            break;
        case Scheme::cpm_init: {
            auto sol = waterfill_design(FrequencyModel(w.est.h_d_hat, w.est.Vp_hat), *init, cfg);
            sol.iterations = 0;
            rows.push_back(design_row(s, sol));
            break;
        }
        case Scheme::random_phase: {
            // Every element gets its own phase; only the combined link is trained.
            auto prng = make_stream(w.rseed, Stream::random_phase);
            const auto phi = scheme_random_phase(static_cast<std::size_t>(cfg.M()), prng);
            const auto h_c = mat_vec_add(w.chan.h_d.span(), w.chan.V, phi.values().span());
            const auto v = dft(h_c.span());
            auto row = row_for(s);
            row.channel_power = norm2(h_c.span());
            if (estimated) {
                auto trng = make_stream(w.rseed, Stream::combined_pilot);
                const auto rx = simulate_pilot_symbol(h_c, w.pilot, cfg.sigma2, trng);
                const auto h_hat = ls_estimate_single(rx, w.pilot, std::max(cfg.L, cfg.L0()));
                const auto p = waterfill(cnr_of(dft(h_hat.span()).span(), cfg), cfg.P);
                row.rate_bps_hz = overhead_factor(1.0, cfg.tau_D, cfg.T_c) * log_rate(v.span(), p.p, cfg);
                row.mse_empirical = norm2(time_error(h_c, h_hat).span());
            } else {
                const auto p = waterfill(cnr_of(v.span(), cfg), cfg.P);
                row.rate_bps_hz = log_rate(v.span(), p.p, cfg);
            }
            rows.push_back(std::move(row));
            break;
        }
        case Scheme::no_irs: {
            // No training and no IRS; the direct link is used as is.
            const auto v = dft(w.chan.h_d.span());
            const auto p = waterfill(cnr_of(v.span(), cfg), cfg.P);
            auto row = row_for(s);
            row.rate_bps_hz = (estimated ? overhead_factor(0.0, cfg.tau_D, cfg.T_c) : 1.0) * log_rate(v.span(), p.p, cfg);
            row.channel_power = norm2(w.chan.h_d.span());
            rows.push_back(std::move(row));
            break;
        }
        }
    }
    return rows;
}

// Runs fn(task) for task in [0, n) on up to `jobs` threads; rethrows the first failure.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn)
{
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    auto body = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(workers, n); ++t) pool.emplace_back(body);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

} // namespace

std::vector<ResultRow> run_scenario(const Scenario& sc, int jobs)
{
    sc.validate();
    const auto R = static_cast<std::size_t>(sc.n_realizations);
    std::vector<std::vector<ResultRow>> slots(sc.sweep_values.size() * R);
    parallel_for(slots.size(), jobs, [&](std::size_t i) {
        slots[i] = run_point(sc, sc.sweep_values[i / R], static_cast<int>(i % R));
    });

    std::vector<ResultRow> rows;
    for (auto& s : slots) std::move(s.begin(), s.end(), std::back_inserter(rows));
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
        if (a.realization_index != b.realization_index) return a.realization_index < b.realization_index;
        return a.scheme < b.scheme;
    });
    return rows;
}

std::vector<TraceRow> run_trace(const Scenario& sc, int jobs)
{
    sc.validate();
    const auto R = static_cast<std::size_t>(sc.n_realizations);
    std::vector<std::vector<TraceRow>> slots(sc.sweep_values.size() * R);
    parallel_for(slots.size(), jobs, [&](std::size_t i) {
        const double value = sc.sweep_values[i / R];
        const int r = static_cast<int>(i % R);
        const Prepared w = prepare(sc, value, r);
        const auto sol = algorithm2(w.est.h_d_hat, w.est.Vp_hat, w.cfg, initializer(sc, value, w), sc.sca);
        for (std::size_t it = 0; it < sol.objective_trace.size(); ++it)
            slots[i].push_back({sc.scenario_id, r, w.cfg.seed, value, static_cast<int>(it), sol.objective_trace[it]});
    });

    std::vector<TraceRow> rows;
    for (auto& s : slots) std::move(s.begin(), s.end(), std::back_inserter(rows));
    std::stable_sort(rows.begin(), rows.end(), [](const TraceRow& a, const TraceRow& b) {
        if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
        if (a.realization_index != b.realization_index) return a.realization_index < b.realization_index;
        return a.iteration < b.iteration;
    });
    return rows;
}

} // namespace irsofdm
