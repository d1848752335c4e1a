// SPDX-License-Identifier: Apache-2.0

#include "irsofdm/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace irsofdm {

namespace {

std::string num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Scenario ids are free text; quote when needed.
std::string field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::vector<std::string> split_record(const std::string& line)
{
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    return out;
}

template <typename Rows, typename Writer>
void emit_file(const Rows& rows, const std::string& path, Writer write)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write(out, rows);
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows)
{
    out << kResultHeader << '\n';
    for (const auto& r : rows) {
        out << field(r.scenario_id) << ',' << r.realization_index << ',' << r.seed << ',' << num(r.sweep_value) << ','
            << to_string(r.scheme) << ',' << to_string(r.csi_mode) << ',' << num(r.rate_bps_hz) << ',' << r.iterations
            << ',' << (r.converged ? "true" : "false") << ',' << num(r.channel_power) << ','
            << (r.mse_empirical ? num(*r.mse_empirical) : std::string()) << '\n';
    }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows)
{
    out << kTraceHeader << '\n';
    for (const auto& r : rows)
        out << field(r.scenario_id) << ',' << r.realization_index << ',' << r.seed << ',' << num(r.sweep_value) << ','
            << r.iteration << ',' << num(r.rate_bps_hz) << '\n';
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path)
{
    emit_file(rows, path, [](std::ostream& o, const auto& r) { write_csv(o, r); });
}

void emit_trace_csv(const std::vector<TraceRow>& rows, const std::string& path)
{
    emit_file(rows, path, [](std::ostream& o, const auto& r) { write_trace_csv(o, r); });
}

std::vector<ResultRow> read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != kResultHeader) throw std::runtime_error("'" + path + "': unexpected header");
    std::vector<ResultRow> rows;
    for (int lineno = 2; std::getline(in, line); ++lineno) {
        const auto f = split_record(line);
        if (f.size() != 11) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 11 fields");
        ResultRow r;
        r.scenario_id = f[0];
        r.realization_index = std::stoi(f[1]);
        r.seed = std::stoull(f[2]);
        r.sweep_value = std::strtod(f[3].c_str(), nullptr);
        r.scheme = parse_scheme(f[4]);
        r.csi_mode = parse_csi_mode(f[5]);
        r.rate_bps_hz = std::strtod(f[6].c_str(), nullptr);
        r.iterations = std::stoi(f[7]);
        r.converged = f[8] == "true";
        r.channel_power = std::strtod(f[9].c_str(), nullptr);
        if (!f[10].empty()) r.mse_empirical = std::strtod(f[10].c_str(), nullptr);
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace irsofdm
