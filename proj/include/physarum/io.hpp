#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "physarum/discrete.hpp"
#include "physarum/entropy_path.hpp"
#include "physarum/flow.hpp"
#include "physarum/model.hpp"
#include "physarum/oracle.hpp"

namespace physarum::io {

using nlohmann::json;

/// Problem document: {"A": [[int]], "b": [int], "c": [int], "name"?: str, "start"?: [real]}.
/// Throws Malformed on structural problems and ValidationFailed (cause set) on model errors.
LinearProgram problem_from_json(const json& doc);
ValidatedLP parse_problem_string(const std::string& text);
/// Throws Io when the file cannot be read.
ValidatedLP parse_problem(const std::string& path);

json problem_to_json(const LinearProgram& lp);
std::string serialize_problem(const LinearProgram& lp);

/// Column-oriented CSV trace: index column ("k", "t" or "mu"), x_0..x_{n-1}, V, E,
/// feas_residual, atp_inf, then optional B and phi. Empty cells are absent values.
struct TraceTable {
  std::string index_name;
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;
};

TraceTable trace_table(const std::vector<discrete::DiscreteTraceEntry>& trace);
TraceTable trace_table(const flow::FlowTrace& trace);
TraceTable trace_table(const ValidatedLP& lp, const entropy::EntropyPath& path);

/// Numeric cells use 17 significant digits, enough to round-trip binary64.
void write_csv(std::ostream& os, const TraceTable& table);
TraceTable read_csv(std::istream& is);
void write_csv_file(const std::string& path, const TraceTable& table);

std::string format_number(double v);

json to_json(const Params& p);
json to_json(const oracle::OracleResult& r);
json to_json(const discrete::Solution& s);
json to_json(const discrete::CertReport& r);
json to_json(const flow::ConvergenceReport& r);
json to_json(const entropy::EntropyPath& path);
json to_json(const Eigen::VectorXd& v);

}  // namespace physarum::io
