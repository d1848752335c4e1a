// SPDX-License-Identifier: Apache-2.0
//
// Flat `key = value` scenario files. '#' starts a comment; keys are the
// SystemConfig / Scenario / ScaSettings field names plus a few convenience
// forms in dB (gamma_db, zeta_BI_db, zeta_Iu_db, snr_db). See README.md.

#pragma once

#include <istream>
#include <string>

#include "irsofdm/scenario.hpp"

namespace irsofdm {

/// Throws ConfigError naming the offending key.
Scenario parse_config(std::istream& in, const std::string& source = "<config>");
Scenario load_config(const std::string& path);

/// Fully resolved settings, one `key=value` per line.
std::string describe(const Scenario& sc);

} // namespace irsofdm
