// SPDX-License-Identifier: Apache-2.0
//
// CSV output of scenario results. Columns follow the ResultRow field order;
// reals are written with 17 significant digits so they parse back exactly.

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "irsofdm/scenario.hpp"

namespace irsofdm {

inline constexpr const char* kResultHeader =
    "scenario_id,realization_index,seed,sweep_value,scheme,csi_mode,rate_bps_hz,iterations,converged,channel_power,"
    "mse_empirical";
inline constexpr const char* kTraceHeader = "scenario_id,realization_index,seed,sweep_value,iteration,rate_bps_hz";

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);

/// Writes to `path`; throws std::runtime_error naming the path on I/O failure.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
void emit_trace_csv(const std::vector<TraceRow>& rows, const std::string& path);

/// Parses a file written by emit_csv.
std::vector<ResultRow> read_csv(const std::string& path);

} // namespace irsofdm
