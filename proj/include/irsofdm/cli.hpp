// SPDX-License-Identifier: Apache-2.0
//
// `irsofdm run|trace|validate --config <file> [--out <csv>] [--seed n] [--jobs n]`.
// Exit codes: 0 success, 1 runtime/I-O failure, 2 bad arguments or config.

#pragma once

#include <ostream>

namespace irsofdm {

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace irsofdm
