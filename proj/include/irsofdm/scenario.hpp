// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo scenario runner: sweeps one system parameter, draws channel
// realizations, runs every requested scheme and reports one row per
// (sweep value, realization, scheme).

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "irsofdm/channel.hpp"
#include "irsofdm/optimizer.hpp"

namespace irsofdm {

enum class Scheme { iterative, amplitude_one, cpm_init, random_phase, no_irs };
enum class CsiMode { perfect, estimated };
enum class SweepAxis { snr, elements, alpha, grouping_ratio, coherence_time, convergence_trace };

std::string_view to_string(Scheme s) noexcept;
std::string_view to_string(CsiMode m) noexcept;
std::string_view to_string(SweepAxis a) noexcept;

/// Throw ConfigError naming `key` and the offending token.
Scheme parse_scheme(std::string_view token, const char* key = "schemes");
CsiMode parse_csi_mode(std::string_view token, const char* key = "csi_mode");
SweepAxis parse_sweep_axis(std::string_view token, const char* key = "sweep_axis");

struct Scenario {
    std::string scenario_id = "default";
    SweepAxis sweep_axis = SweepAxis::snr;
    std::vector<double> sweep_values{5.0};
    std::vector<Scheme> schemes{Scheme::iterative, Scheme::amplitude_one, Scheme::cpm_init, Scheme::random_phase,
                                Scheme::no_irs};
    CsiMode csi_mode = CsiMode::perfect;
    int n_realizations = 100;
    SystemConfig base;
    ScaSettings sca;
    // Training power as a multiple of P when an snr sweep rescales P.
    double pt_over_p = 20.0;

    /// base with the sweep axis set to `value`.
    /// snr: gamma_d in dB, P = N sigma2 10^(v/10), P_t = pt_over_p P.
    /// elements: M_x = 5, M_y = M / 5, no grouping.
    /// grouping_ratio: tile chosen by Grouping::from_ratio.
    /// convergence_trace: 0 starts from random phases, n >= 1 from SA with I_SA = n.
    SystemConfig config_at(double value) const;

    /// Checks every sweep point up front; throws ConfigError.
    void validate() const;
};

struct ResultRow {
    std::string scenario_id;
    int realization_index = 0;
    std::uint64_t seed = 0;
    double sweep_value = 0.0;
    Scheme scheme = Scheme::iterative;
    CsiMode csi_mode = CsiMode::perfect;
    double rate_bps_hz = 0.0;
    int iterations = 0;
    bool converged = true;
    double channel_power = 0.0;
    std::optional<double> mse_empirical;
};

struct TraceRow {
    std::string scenario_id;
    int realization_index = 0;
    std::uint64_t seed = 0;
    double sweep_value = 0.0;
    int iteration = 0;
    double rate_bps_hz = 0.0;
};

/// Rows sorted by (sweep value, realization, scheme); identical for any `jobs`.
std::vector<ResultRow> run_scenario(const Scenario& sc, int jobs = 1);

/// Per-iteration rate of the alternating design for every (sweep value, realization).
std::vector<TraceRow> run_trace(const Scenario& sc, int jobs = 1);

} // namespace irsofdm
