// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "irsofdm/cli.hpp"
#include "irsofdm/config.hpp"
#include "irsofdm/csv.hpp"

using namespace irsofdm;

namespace {

Scenario parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

std::string config_error_key(const std::string& text)
{
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("irsofdm_test_" + name)).string();
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr)
{
    args.insert(args.begin(), "irsofdm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

const char* kSmall = R"(scenario_id = small
sweep_axis = snr
sweep_values = 0, 10
schemes = iterative, amplitude_one, cpm_init, random_phase, no_irs
n_realizations = 3
seed = 11
)";

} // namespace

TEST_CASE("config parsing")
{
    const auto sc = parse("# comment\nsweep_axis = alpha  # trailing\nsweep_values = 0.01 0.1\nschemes=no_irs\n"
                          "gamma_db = 8.8\nsnr_db = 5\nM_y = 8\n");
    CHECK(sc.sweep_axis == SweepAxis::alpha);
    CHECK(sc.sweep_values == std::vector<double>{0.01, 0.1});
    CHECK(sc.schemes == std::vector<Scheme>{Scheme::no_irs});
    CHECK(sc.base.M() == 40);
    CHECK(sc.base.gamma == doctest::Approx(std::pow(10.0, 0.88)));
    CHECK(sc.base.P == doctest::Approx(64 * std::pow(10.0, 0.5)));
    CHECK(sc.base.P_t == doctest::Approx(20 * sc.base.P));

    const auto g = parse("M_x = 10\nM_y = 10\ngrouping_ratio = 0.04\n");
    CHECK(g.base.B_x == 5);
    CHECK(g.base.B_y == 5);

    CHECK(config_error_key("bogus = 1\n") == "bogus");
    CHECK(config_error_key("N = sixty\n") == "N");
    CHECK(config_error_key("alpha = 0.1\nalpha = 0.2\n") == "alpha");
    CHECK(config_error_key("gamma = 7\ngamma_db = 8.8\n") == "gamma_db");
    CHECK(config_error_key("P = 100\nsnr_db = 5\n") == "snr_db");
    CHECK(config_error_key("schemes = iterative, bogus_scheme\n") == "schemes");
    CHECK(config_error_key("schemes = no_irs, no_irs\n") == "schemes");
    CHECK(config_error_key("csi_mode = partial\n") == "csi_mode");
    CHECK(config_error_key("sweep_axis = phase\n") == "sweep_axis");
    CHECK(config_error_key("B_x = 3\n") == "B_x");
    CHECK(config_error_key("n_realizations = 0\n") == "n_realizations");
    CHECK(config_error_key("L = 20\n") != "<no error>");
    CHECK(config_error_key("N_CP = 8\n") != "<no error>");
    CHECK(config_error_key("no equals sign\n").starts_with("test.cfg:1"));

    try {
        parse("schemes = iterative, bogus_scheme\n");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bogus_scheme") != std::string::npos);
    }
}

TEST_CASE("scenario validation happens before any computation")
{
    Scenario sc;
    sc.sweep_values.clear();
    CHECK_THROWS_AS(sc.validate(), ConfigError);

    sc = Scenario{};
    sc.base.M_x = sc.base.M_y = 10;
    sc.sweep_axis = SweepAxis::grouping_ratio;
    sc.sweep_values = {0.25, 0.3};
    CHECK_THROWS_AS(run_scenario(sc), ConfigError);

    sc = Scenario{};
    sc.sweep_axis = SweepAxis::elements;
    sc.sweep_values = {20, 22};
    CHECK_THROWS_AS(sc.validate(), ConfigError);

    // Training plus delay must fit in the coherence time.
    sc = Scenario{};
    sc.csi_mode = CsiMode::estimated;
    sc.base.T_c = 20;
    CHECK_THROWS_AS(sc.validate(), ConfigError);

    sc = Scenario{};
    sc.sweep_axis = SweepAxis::grouping_ratio;
    sc.base.M_x = sc.base.M_y = 10;
    sc.sweep_values = {0.01, 0.02, 0.04, 0.1, 0.25, 1.0};
    CHECK_NOTHROW(sc.validate());
    const int K[] = {1, 2, 4, 10, 25, 100};
    for (std::size_t i = 0; i < 6; ++i) CHECK(sc.config_at(sc.sweep_values[i]).K() == K[i]);
}

TEST_CASE("config_at")
{
    Scenario sc;
    sc.sweep_axis = SweepAxis::snr;
    const auto c = sc.config_at(10);
    CHECK(c.P == doctest::Approx(640.0));
    CHECK(c.P_t == doctest::Approx(20 * 640.0));
    sc.sweep_axis = SweepAxis::elements;
    const auto e = sc.config_at(30);
    CHECK(e.M_x == 5);
    CHECK(e.M_y == 6);
    CHECK(e.K() == 30);
    sc.sweep_axis = SweepAxis::coherence_time;
    CHECK(sc.config_at(2100).T_c == 2100);
    sc.sweep_axis = SweepAxis::alpha;
    CHECK(sc.config_at(0.05).alpha == 0.05);
}

TEST_CASE("describe shows resolved defaults")
{
    const auto text = describe(Scenario{});
    CHECK(text.find("N=64\nN_CP=16\n") != std::string::npos);
    CHECK(text.find("gamma_db=8.8 dB") != std::string::npos);
    CHECK(text.find("SDR excluded") != std::string::npos);
    CHECK(text.find("T_c=900") != std::string::npos);
}

TEST_CASE("csv emission and round trip")
{
    const auto empty = temp_path("empty.csv");
    emit_csv({}, empty);
    CHECK(slurp(empty) == std::string(kResultHeader) + "\n");
    CHECK(read_csv(empty).empty());

    ResultRow a;
    a.scenario_id = "id, with \"comma\"";
    a.realization_index = 3;
    a.seed = 18446744073709551615ull;
    a.sweep_value = 0.1 + 0.2;
    a.scheme = Scheme::random_phase;
    a.csi_mode = CsiMode::estimated;
    a.rate_bps_hz = 1.0 / 3.0;
    a.iterations = 7;
    a.converged = false;
    a.channel_power = 12345.678901234567;
    a.mse_empirical = 1e-7 / 3;
    ResultRow b = a;
    b.scenario_id = "plain";
    b.scheme = Scheme::no_irs;
    b.mse_empirical.reset();
    b.converged = true;

    const auto path = temp_path("two.csv");
    emit_csv({a, b}, path);
    const auto text = slurp(path);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    const auto back = read_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].scenario_id == a.scenario_id);
    CHECK(back[0].seed == a.seed);
    CHECK(back[0].scheme == a.scheme);
    CHECK(back[0].csi_mode == a.csi_mode);
    CHECK(back[0].converged == false);
    CHECK(back[0].iterations == 7);
    CHECK(std::abs(back[0].sweep_value - a.sweep_value) <= 1e-12 * a.sweep_value);
    CHECK(std::abs(back[0].rate_bps_hz - a.rate_bps_hz) <= 1e-12 * a.rate_bps_hz);
    CHECK(std::abs(back[0].channel_power - a.channel_power) <= 1e-12 * a.channel_power);
    CHECK(std::abs(*back[0].mse_empirical - *a.mse_empirical) <= 1e-12 * *a.mse_empirical);
    CHECK(!back[1].mse_empirical);
    CHECK(back[1].scheme == Scheme::no_irs);

    CHECK_THROWS_WITH_AS(emit_csv({a}, "/nonexistent_dir/x.csv"), doctest::Contains("/nonexistent_dir/x.csv"),
                         std::runtime_error);
}

TEST_CASE("run_scenario rows and determinism")
{
    const auto sc = parse(kSmall);
    const auto rows = run_scenario(sc, 1);
    REQUIRE(rows.size() == 2 * 3 * 5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].rate_bps_hz >= 0.0);
        CHECK(rows[i].csi_mode == CsiMode::perfect);
        CHECK(!rows[i].mse_empirical);
        CHECK(rows[i].scenario_id == "small");
        if (i > 0) {
            const auto& p = rows[i - 1];
            const auto& r = rows[i];
            CHECK(std::tuple(p.sweep_value, p.realization_index, p.scheme) <
                  std::tuple(r.sweep_value, r.realization_index, r.scheme));
        }
    }
    const auto parallel = run_scenario(sc, 4);
    std::ostringstream x, y;
    write_csv(x, rows);
    write_csv(y, parallel);
    CHECK(x.str() == y.str());

    auto other = sc;
    other.base.seed = 12;
    std::ostringstream z;
    write_csv(z, run_scenario(other, 2));
    CHECK(z.str() != x.str());
}

TEST_CASE("no_irs rate ignores the IRS")
{
    auto sc = parse("schemes = no_irs\nn_realizations = 4\nsweep_axis = elements\nsweep_values = 10, 40\n");
    auto rows = run_scenario(sc, 2);
    REQUIRE(rows.size() == 8);
    for (int r = 0; r < 4; ++r) CHECK(rows[r].rate_bps_hz == doctest::Approx(rows[r + 4].rate_bps_hz).epsilon(1e-12));

    sc = parse("schemes = no_irs\nn_realizations = 4\nsweep_axis = alpha\nsweep_values = 0.01, 0.2\n");
    rows = run_scenario(sc, 2);
    for (int r = 0; r < 4; ++r) CHECK(rows[r].rate_bps_hz == doctest::Approx(rows[r + 4].rate_bps_hz).epsilon(1e-12));
}

TEST_CASE("estimated CSI rows")
{
    const auto sc = parse("csi_mode = estimated\nn_realizations = 2\nsweep_axis = coherence_time\n"
                          "sweep_values = 300, 2100\nschemes = cpm_init, random_phase, no_irs\n");
    const auto rows = run_scenario(sc, 2);
    REQUIRE(rows.size() == 12);
    for (const auto& r : rows) {
        CHECK(r.csi_mode == CsiMode::estimated);
        CHECK(r.rate_bps_hz >= 0.0);
        if (r.scheme == Scheme::no_irs) {
            CHECK(!r.mse_empirical);
        } else {
            REQUIRE(r.mse_empirical);
            CHECK(*r.mse_empirical > 0.0);
        }
    }
    // Longer coherence time spends a smaller share on training.
    CHECK(rows[6].rate_bps_hz > rows[0].rate_bps_hz);
}

TEST_CASE("run_trace")
{
    const auto sc = parse("sweep_axis = convergence_trace\nsweep_values = 0, 10\nn_realizations = 2\nsnr_db = 5\n");
    const auto rows = run_trace(sc, 2);
    REQUIRE(!rows.empty());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& p = rows[i - 1];
        const auto& r = rows[i];
        if (p.sweep_value == r.sweep_value && p.realization_index == r.realization_index) {
            CHECK(r.iteration == p.iteration + 1);
            CHECK(r.rate_bps_hz >= p.rate_bps_hz - 1e-9);
        } else {
            CHECK(r.iteration == 0);
        }
    }
}

TEST_CASE("cli_main")
{
    const auto cfg = temp_path("small.cfg");
    {
        std::ofstream(cfg) << kSmall;
    }
    std::string out, err;
    CHECK(cli({"validate", "--config", cfg}, &out) == 0);
    CHECK(out.find("scenario_id=small") != std::string::npos);

    const auto a = temp_path("run_a.csv");
    const auto b = temp_path("run_b.csv");
    CHECK(cli({"run", "--config", cfg, "--out", a, "--jobs", "1"}) == 0);
    CHECK(cli({"run", "--config", cfg, "--out", b, "--jobs", "3"}) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(read_csv(a).size() == 30);

    CHECK(cli({"run", "--config", cfg, "--out", b, "--seed", "99"}) == 0);
    CHECK(slurp(a) != slurp(b));

    const auto t = temp_path("trace.csv");
    CHECK(cli({"trace", "--config", cfg, "--out", t}) == 0);
    CHECK(slurp(t).starts_with(kTraceHeader));

    const auto bad = temp_path("bad.cfg");
    {
        std::ofstream(bad) << "schemes = iterative, bogus_scheme\n";
    }
    CHECK(cli({"run", "--config", bad, "--out", a}, &out, &err) == 2);
    CHECK(err.find("bogus_scheme") != std::string::npos);

    CHECK(cli({"validate", "--config", temp_path("missing.cfg")}, &out, &err) == 2);
    CHECK(cli({"run", "--config", cfg}, &out, &err) == 2);
    CHECK(cli({"frobnicate"}, &out, &err) == 2);
    CHECK(cli({"run", "--config", cfg, "--out", "/nonexistent_dir/x.csv"}, &out, &err) == 1);
    CHECK(err.find("/nonexistent_dir/x.csv") != std::string::npos);
}
