#include "physarum/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "physarum/dynamics.hpp"
#include "physarum/error.hpp"

namespace physarum::io {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::Malformed, what); }

std::int64_t as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) malformed(where + " must be an integer");
  return v.get<std::int64_t>();
}

IntVector int_vector(const json& doc, const char* key) {
  if (!doc.contains(key)) malformed(std::string("missing key \"") + key + "\"");
  const json& arr = doc.at(key);
  if (!arr.is_array()) malformed(std::string("\"") + key + "\" must be an array");
  IntVector out(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out(static_cast<Index>(i)) = as_int(arr[i], std::string(key) + "[" + std::to_string(i) + "]");
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> base_header(const std::string& index, Index n) {
  std::vector<std::string> h{index};
  for (Index i = 0; i < n; ++i) h.push_back("x_" + std::to_string(i));
  for (const char* col : {"V", "E", "feas_residual", "atp_inf"}) h.emplace_back(col);
  return h;
}

}  // namespace

LinearProgram problem_from_json(const json& doc) {
  if (!doc.is_object()) malformed("problem must be a JSON object");
  LinearProgram lp;
  if (!doc.contains("A")) malformed("missing key \"A\"");
  const json& A = doc.at("A");
  if (!A.is_array() || A.empty()) malformed("\"A\" must be a non-empty array of rows");
  std::size_t cols = 0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (!A[i].is_array()) malformed("A[" + std::to_string(i) + "] must be an array");
    if (i == 0) cols = A[i].size();
    if (A[i].size() != cols) {
      malformed("A row " + std::to_string(i) + " has " + std::to_string(A[i].size()) + " entries, expected " +
                std::to_string(cols));
    }
  }
  lp.A.resize(static_cast<Index>(A.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      lp.A(static_cast<Index>(i), static_cast<Index>(j)) =
          as_int(A[i][j], "A[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  lp.b = int_vector(doc, "b");
  lp.c = int_vector(doc, "c");
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) malformed("\"name\" must be a string");
    lp.name = doc.at("name").get<std::string>();
  }
  if (doc.contains("start")) {
    const json& s = doc.at("start");
    if (!s.is_array()) malformed("\"start\" must be an array");
    Eigen::VectorXd start(static_cast<Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_number()) malformed("start[" + std::to_string(i) + "] must be a number");
      start(static_cast<Index>(i)) = s[i].get<double>();
      if (!(start(static_cast<Index>(i)) > 0.0)) malformed("start[" + std::to_string(i) + "] must be positive");
    }
    lp.start = std::move(start);
  }
  return lp;
}

ValidatedLP parse_problem_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  LinearProgram lp = problem_from_json(doc);
  try {
    return validate(std::move(lp));
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationFailed, e.code(), e.what());
  }
}

ValidatedLP parse_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "read failed for " + path);
  return parse_problem_string(buf.str());
}

json problem_to_json(const LinearProgram& lp) {
  json doc = json::object();
  json A = json::array();
  for (Index i = 0; i < lp.A.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < lp.A.cols(); ++j) row.push_back(lp.A(i, j));
    A.push_back(std::move(row));
  }
  doc["A"] = std::move(A);
  doc["b"] = std::vector<std::int64_t>(lp.b.data(), lp.b.data() + lp.b.size());
  doc["c"] = std::vector<std::int64_t>(lp.c.data(), lp.c.data() + lp.c.size());
  if (!lp.name.empty()) doc["name"] = lp.name;
  if (lp.start) doc["start"] = to_json(*lp.start);
  return doc;
}

std::string serialize_problem(const LinearProgram& lp) { return problem_to_json(lp).dump(2); }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TraceTable trace_table(const std::vector<discrete::DiscreteTraceEntry>& trace) {
  TraceTable t;
  t.index_name = "k";
  const Index n = trace.empty() ? 0 : trace.front().x.size();
  const bool verify = !trace.empty() && trace.front().phi.has_value();
  t.header = base_header("k", n);
  if (verify) {
    t.header.emplace_back("B");
    t.header.emplace_back("phi");
  }
  for (const auto& e : trace) {
    std::vector<std::optional<double>> row{static_cast<double>(e.k)};
    for (Index i = 0; i < n; ++i) row.emplace_back(e.x(i));
    row.insert(row.end(), {e.V, e.E, e.feas_residual, e.atp_inf});
    if (verify) {
      row.push_back(e.B);
      row.push_back(e.phi);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

TraceTable trace_table(const flow::FlowTrace& trace) {
  TraceTable t;
  t.index_name = "t";
  const Index n = trace.samples.empty() ? 0 : trace.samples.front().x.size();
  t.header = base_header("t", n);
  for (const auto& e : trace.samples) {
    std::vector<std::optional<double>> row{e.t};
    for (Index i = 0; i < n; ++i) row.emplace_back(e.x(i));
    row.insert(row.end(), {e.V, e.E, e.feas_residual, e.atp_inf});
    t.rows.push_back(std::move(row));
  }
  return t;
}

TraceTable trace_table(const ValidatedLP& lp, const entropy::EntropyPath& path) {
  TraceTable t;
  t.index_name = "mu";
  t.header = base_header("mu", lp.n());
  for (const auto& pt : path.points) {
    std::vector<std::optional<double>> row{pt.mu};
    for (Index i = 0; i < lp.n(); ++i) row.emplace_back(pt.x(i));
    const double feas = (lp.A() * pt.x - lp.b()).cwiseAbs().maxCoeff();
    const double atp = (lp.A().transpose() * pt.y).cwiseAbs().maxCoeff();
    row.insert(row.end(), {lp.c().dot(pt.x), std::nullopt, feas, atp});
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_csv(std::ostream& os, const TraceTable& table) {
  for (std::size_t j = 0; j < table.header.size(); ++j) os << (j ? "," : "") << table.header[j];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) os << ',';
      if (row[j]) os << format_number(*row[j]);
    }
    os << '\n';
  }
}

TraceTable read_csv(std::istream& is) {
  TraceTable t;
  std::string line;
  if (!std::getline(is, line)) malformed("empty trace file");
  t.header = split(line, ',');
  if (t.header.empty()) malformed("trace header is empty");
  t.index_name = t.header.front();
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.header.size()) malformed("trace line " + std::to_string(lineno) + " has wrong column count");
    std::vector<std::optional<double>> row;
    for (const auto& cell : cells) {
      if (cell.empty()) {
        row.emplace_back();
        continue;
      }
      double v = 0.0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || end != cell.data() + cell.size()) {
        malformed("trace line " + std::to_string(lineno) + ": bad number \"" + cell + "\"");
      }
      row.emplace_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_csv_file(const std::string& path, const TraceTable& table) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  write_csv(out, table);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Params& p) {
  return json{{"C_s", p.cost_sum}, {"D", p.D},       {"D_exact", p.d_exact}, {"P_max", p.p_max},
              {"beta", p.beta},    {"m", p.m},       {"n", p.n}};
}

json to_json(const oracle::OracleResult& r) {
  json out;
  out["status"] = r.feasible() ? "optimal" : "infeasible";
  out["exact"] = r.exact;
  out["vertices"] = json::array();
  for (const auto& v : r.vertices) out["vertices"].push_back(to_json(v));
  out["rays"] = json::array();
  for (const auto& v : r.rays) out["rays"].push_back(to_json(v));
  if (r.feasible()) {
    out["opt"] = r.opt;
    if (r.exact_opt) out["opt_exact"] = r.exact_opt->str();
  } else {
    out["opt"] = nullptr;
  }
  out["optimal_vertices"] = r.optimal_vertices;
  out["nonoptimal_vertices"] = r.nonoptimal_vertices;
  out["J"] = r.J;
  out["N"] = r.N;
  return out;
}

json to_json(const discrete::Solution& s) {
  json out{{"x", to_json(s.x)},
           {"V", s.V},
           {"iters", s.iterations},
           {"stop_reason", std::string(discrete::to_string(s.stop))},
           {"h", s.h},
           {"lower_bound", s.lower_bound},
           {"fixed_point_residual", s.fixed_point_residual},
           {"iteration_cap", s.iteration_cap}};
  if (!s.warnings.empty()) out["warnings"] = s.warnings;
  if (s.certificate) out["certificate"] = to_json(*s.certificate);
  return out;
}

json to_json(const discrete::CertReport& r) {
  return json{{"pairs_seen", r.pairs_seen},
              {"steps_checked", r.steps_checked},
              {"violations", r.violations},
              {"big_gap_steps", r.big_gap_steps},
              {"small_gap_steps", r.small_gap_steps},
              {"neither_steps", r.neither_steps},
              {"recurrence_violations", r.recurrence_violations},
              {"required_drop", r.required_drop},
              {"worst_margin", std::isfinite(r.worst_margin) ? json(r.worst_margin) : json(nullptr)},
              {"max_phi_mismatch", r.max_phi_mismatch},
              {"violating_steps", r.violating_steps},
              {"ok", r.ok()}};
}

json to_json(const flow::ConvergenceReport& r) {
  json out{{"degenerate_already_optimal", r.degenerate_already_optimal},
           {"nu_bound", r.nu_bound},
           {"log_R_bound", r.log_R_bound},
           {"log_Q_bound", r.log_Q_bound},
           {"xN_slope", r.xN_slope},
           {"xN_decay_ok", r.xN_decay_ok},
           {"xJ_floor", std::isfinite(r.xJ_floor) ? json(r.xJ_floor) : json(nullptr)},
           {"limit_estimate", to_json(r.limit_estimate)},
           {"fixed_point_residual", r.fixed_point_residual},
           {"limit_drift", r.limit_drift}};
  if (r.degenerate_already_optimal) {
    out["nu_hat"] = nullptr;
  } else {
    out["nu_hat"] = r.nu_hat;
    out["fit_samples"] = r.fit_samples;
    out["fit_window"] = {r.fit_t_begin, r.fit_t_end};
  }
  return out;
}

json to_json(const entropy::EntropyPath& path) {
  json pts = json::array();
  for (const auto& p : path.points) {
    pts.push_back(json{{"mu", p.mu}, {"x", to_json(p.x)}, {"y", to_json(p.y)}, {"dual_value", p.dual_value},
                       {"newton_iters", p.newton_iters}});
  }
  return json{{"points", std::move(pts)},
              {"cost_monotone", path.cost_monotone},
              {"max_feas_residual", path.max_feas_residual}};
}

}  // namespace physarum::io
