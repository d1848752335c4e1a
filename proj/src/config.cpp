// SPDX-License-Identifier: Apache-2.0

#include "irsofdm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string_view>

namespace irsofdm {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, std::string_view v)
{
    double x = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc{} || ptr != end || std::isnan(x))
        throw ConfigError(key, "expected a number, got '" + std::string(v) + "'");
    return x;
}

template <typename Int>
Int to_int(const std::string& key, std::string_view v)
{
    Int x{};
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc{} || ptr != end) throw ConfigError(key, "expected an integer, got '" + std::string(v) + "'");
    return x;
}

std::vector<std::string_view> split_list(std::string_view v)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const auto next = v.find_first_of(", \t", pos);
        const auto tok = v.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
        if (!tok.empty()) out.push_back(tok);
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string fmt(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

} // namespace

Scenario parse_config(std::istream& in, const std::string& source)
{
    std::map<std::string, std::string> kv;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        std::string_view s = line;
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        const std::string where = source + ":" + std::to_string(lineno);
        if (eq == std::string_view::npos) throw ConfigError(where, "expected 'key = value', got '" + std::string(s) + "'");
        const std::string key(trim(s.substr(0, eq)));
        const std::string value(trim(s.substr(eq + 1)));
        if (key.empty()) throw ConfigError(where, "missing key");
        if (value.empty()) throw ConfigError(key, "missing value");
        if (!kv.emplace(key, value).second) throw ConfigError(key, "given more than once");
    }

    Scenario sc;
    SystemConfig& c = sc.base;
    std::optional<double> gamma_db, zeta_bi_db, zeta_iu_db, snr_db, grouping_ratio;
    std::optional<double> pt_over_p;

    using Setter = std::function<void(const std::string&, const std::string&)>;
    auto real = [](double& dst) -> Setter { return [&dst](const auto& k, const auto& v) { dst = to_double(k, v); }; };
    auto integer = [](int& dst) -> Setter { return [&dst](const auto& k, const auto& v) { dst = to_int<int>(k, v); }; };
    auto opt = [](std::optional<double>& dst) -> Setter {
        return [&dst](const auto& k, const auto& v) { dst = to_double(k, v); };
    };

    const std::map<std::string, Setter> setters = {
        {"N", integer(c.N)},
        {"N_CP", integer(c.N_CP)},
        {"L", integer(c.L)},
        {"L1", integer(c.L1)},
        {"L2", integer(c.L2)},
        {"M_x", integer(c.M_x)},
        {"M_y", integer(c.M_y)},
        {"B_x", integer(c.B_x)},
        {"B_y", integer(c.B_y)},
        {"zeta_BI", real(c.zeta_BI)},
        {"zeta_Iu", real(c.zeta_Iu)},
        {"zeta_BI_db", opt(zeta_bi_db)},
        {"zeta_Iu_db", opt(zeta_iu_db)},
        {"alpha", real(c.alpha)},
        {"gamma", real(c.gamma)},
        {"gamma_db", opt(gamma_db)},
        {"sigma2", real(c.sigma2)},
        {"P", real(c.P)},
        {"P_t", real(c.P_t)},
        {"snr_db", opt(snr_db)},
        {"pt_over_p", opt(pt_over_p)},
        {"T_c", real(c.T_c)},
        {"tau_D", real(c.tau_D)},
        {"psi_e", opt(c.psi_e)},
        {"psi_a", opt(c.psi_a)},
        {"psi_e_bs", opt(c.psi_e_bs)},
        {"psi_a_bs", opt(c.psi_a_bs)},
        {"d", real(c.d)},
        {"lambda", real(c.lambda)},
        {"seed", [&c](const auto& k, const auto& v) { c.seed = to_int<std::uint64_t>(k, v); }},
        {"zc_root", integer(c.zc_root)},
        {"I_SA", integer(c.I_SA)},
        {"grouping_ratio", opt(grouping_ratio)},
        {"scenario_id", [&sc](const auto&, const auto& v) { sc.scenario_id = v; }},
        {"sweep_axis", [&sc](const auto& k, const auto& v) { sc.sweep_axis = parse_sweep_axis(v, k.c_str()); }},
        {"sweep_values",
         [&sc](const auto& k, const auto& v) {
             sc.sweep_values.clear();
             for (auto tok : split_list(v)) sc.sweep_values.push_back(to_double(k, tok));
         }},
        {"schemes",
         [&sc](const auto& k, const auto& v) {
             sc.schemes.clear();
             for (auto tok : split_list(v)) {
                 const auto s = parse_scheme(tok, k.c_str());
                 if (std::find(sc.schemes.begin(), sc.schemes.end(), s) != sc.schemes.end())
                     throw ConfigError(k, "scheme '" + std::string(tok) + "' listed twice");
                 sc.schemes.push_back(s);
             }
         }},
        {"csi_mode", [&sc](const auto& k, const auto& v) { sc.csi_mode = parse_csi_mode(v, k.c_str()); }},
        {"n_realizations", integer(sc.n_realizations)},
        {"inner_tol", real(sc.sca.inner_tol)},
        {"outer_tol", real(sc.sca.outer_tol)},
        {"max_inner", integer(sc.sca.max_inner)},
        {"max_outer", integer(sc.sca.max_outer)},
        {"pg_step0", real(sc.sca.pg_step0)},
        {"pg_backtrack", real(sc.sca.pg_backtrack)},
        {"pg_tol", real(sc.sca.pg_tol)},
    };

    for (const auto& [key, value] : kv) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(key, "unknown key");
        it->second(key, value);
    }

    auto exclusive = [&kv](const char* a, const char* b) {
        if (kv.count(a) && kv.count(b)) throw ConfigError(b, std::string("conflicts with ") + a);
    };
    exclusive("gamma", "gamma_db");
    exclusive("zeta_BI", "zeta_BI_db");
    exclusive("zeta_Iu", "zeta_Iu_db");
    exclusive("P", "snr_db");
    exclusive("P_t", "pt_over_p");
    exclusive("B_x", "grouping_ratio");
    exclusive("B_y", "grouping_ratio");

    if (gamma_db) c.gamma = db_to_linear(*gamma_db);
    if (zeta_bi_db) c.zeta_BI = db_to_linear(*zeta_bi_db);
    if (zeta_iu_db) c.zeta_Iu = db_to_linear(*zeta_iu_db);
    if (snr_db) c.P = c.N * c.sigma2 * db_to_linear(*snr_db);
    if (kv.count("P_t")) {
        sc.pt_over_p = c.P_t / c.P;
    } else {
        sc.pt_over_p = pt_over_p.value_or(20.0);
        c.P_t = sc.pt_over_p * c.P;
    }
    if (grouping_ratio) {
        const auto g = Grouping::from_ratio(c.M_x, c.M_y, *grouping_ratio);
        c.B_x = g.B_x();
        c.B_y = g.B_y();
    }

    sc.validate();
    return sc;
}

Scenario load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    return parse_config(in, path);
}

std::string describe(const Scenario& sc)
{
    const auto& c = sc.base;
    std::ostringstream o;
    auto line = [&o](const char* k, const std::string& v) { o << k << '=' << v << '\n'; };
    auto angle = [](const std::optional<double>& a) { return a ? fmt(*a) : std::string("random U[0,pi/2]"); };

    line("scenario_id", sc.scenario_id);
    line("sweep_axis", std::string(to_string(sc.sweep_axis)));
    std::string values;
    for (double v : sc.sweep_values) values += (values.empty() ? "" : ",") + fmt(v);
    line("sweep_values", values);
    std::string schemes;
    for (auto s : sc.schemes) schemes += (schemes.empty() ? "" : ",") + std::string(to_string(s));
    line("schemes", schemes);
    line("csi_mode", std::string(to_string(sc.csi_mode)));
    line("n_realizations", std::to_string(sc.n_realizations));
    line("N", std::to_string(c.N));
    line("N_CP", std::to_string(c.N_CP));
    line("L", std::to_string(c.L));
    line("L1", std::to_string(c.L1));
    line("L2", std::to_string(c.L2));
    line("L0", std::to_string(c.L0()));
    line("M_x", std::to_string(c.M_x));
    line("M_y", std::to_string(c.M_y));
    line("B_x", std::to_string(c.B_x));
    line("B_y", std::to_string(c.B_y));
    line("K", std::to_string(c.K()));
    line("zeta_BI_db", fmt(linear_to_db(c.zeta_BI)));
    line("zeta_Iu_db", fmt(linear_to_db(c.zeta_Iu)));
    line("alpha", fmt(c.alpha));
    line("gamma_db", fmt(linear_to_db(c.gamma)) + " dB");
    line("sigma2", fmt(c.sigma2));
    line("P", fmt(c.P));
    line("snr_db", fmt(linear_to_db(c.snr())));
    line("P_t", fmt(c.P_t));
    line("pt_over_p", fmt(sc.pt_over_p));
    line("T_c", fmt(c.T_c));
    line("tau_D", fmt(c.tau_D));
    line("psi_e", angle(c.psi_e));
    line("psi_a", angle(c.psi_a));
    line("psi_e_bs", angle(c.psi_e_bs));
    line("psi_a_bs", angle(c.psi_a_bs));
    line("d", fmt(c.d));
    line("lambda", fmt(c.lambda));
    line("seed", std::to_string(c.seed));
    line("zc_root", std::to_string(c.zc_root));
    line("initializer", "SA (SDR excluded)");
    line("I_SA", std::to_string(c.I_SA));
    line("inner_tol", fmt(sc.sca.inner_tol));
    line("outer_tol", fmt(sc.sca.outer_tol));
    line("max_inner", std::to_string(sc.sca.max_inner));
    line("max_outer", std::to_string(sc.sca.max_outer));
    line("pg_step0", fmt(sc.sca.pg_step0));
    line("pg_backtrack", fmt(sc.sca.pg_backtrack));
    line("pg_tol", fmt(sc.sca.pg_tol));
    return o.str();
}

} // namespace irsofdm
