// SPDX-License-Identifier: Apache-2.0

#include "irsofdm/cli.hpp"

#include <CLI11.hpp>

#include <optional>
#include <thread>

#include "irsofdm/config.hpp"
#include "irsofdm/csv.hpp"

namespace irsofdm {

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"IRS-assisted OFDM link simulator"};
    app.require_subcommand(1);

    std::string config;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    auto add_common = [&](CLI::App* sub, bool with_out) {
        sub->add_option("--config", config, "scenario file")->required();
        if (with_out) {
            sub->add_option("--out", out_path, "output CSV")->required();
            sub->add_option("--seed", seed, "overrides the config seed");
            sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
        }
    };
    auto* run = app.add_subcommand("run", "run the scenario and write one row per scheme and realization");
    auto* trace = app.add_subcommand("trace", "write the per-iteration rate of the alternating design");
    auto* validate = app.add_subcommand("validate", "check a config and print the resolved settings");
    add_common(run, true);
    add_common(trace, true);
    add_common(validate, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        Scenario sc = load_config(config);
        if (seed) sc.base.seed = *seed;
        if (validate->parsed()) {
            out << describe(sc);
            return 0;
        }
        if (run->parsed()) {
            emit_csv(run_scenario(sc, jobs), out_path);
        } else {
            emit_trace_csv(run_trace(sc, jobs), out_path);
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace irsofdm
