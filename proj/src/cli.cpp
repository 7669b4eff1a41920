#include "physarum/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "physarum/discrete.hpp"
#include "physarum/entropy_path.hpp"
#include "physarum/error.hpp"
#include "physarum/flow.hpp"
#include "physarum/io.hpp"
#include "physarum/oracle.hpp"
#include "physarum/properties.hpp"

namespace physarum::cli {

namespace {

using io::json;

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
  auto log = std::make_shared<spdlog::logger>("physarum", sink);
  log->set_pattern("%l: %v");
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("PHYSARUM_LOG")) {
    const std::string v(env);
    if (v == "error") level = spdlog::level::err;
    else if (v == "warn") level = spdlog::level::warn;
    else if (v == "info") level = spdlog::level::info;
    else if (v == "debug") level = spdlog::level::debug;
  }
  log->set_level(level);
  return log;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
    case ErrorCode::Malformed:
      return kIo;
    case ErrorCode::ValidationFailed:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::RankDeficient:
    case ErrorCode::NonPositiveCost:
      return kValidation;
    case ErrorCode::BadEps:
    case ErrorCode::BadStep:
    case ErrorCode::BadGrid:
      return kUsage;
    default:
      return kNumerical;
  }
}

Eigen::VectorXd parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "bad number \"" + cell + "\"");
    }
  }
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Index>(vals.size()));
}

// A start file holds a JSON array of positive reals.
Eigen::VectorXd read_start_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Malformed, path + ": " + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::Malformed, path + ": start must be an array");
  Eigen::VectorXd x(static_cast<Index>(doc.size()));
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number()) throw Error(ErrorCode::Malformed, path + ": start entries must be numbers");
    x(static_cast<Index>(i)) = doc[i].get<double>();
  }
  return x;
}

Eigen::VectorXd default_start(const ValidatedLP& lp, spdlog::logger& log) {
  if (lp.problem().start) return *lp.problem().start;
  log.info("no start given, using the oracle interior point");
  return oracle::interior_point(oracle::enumerate(lp));
}

struct Options {
  std::string file;
  double eps = 0.1;
  std::optional<double> h;
  std::string start = "auto";
  std::string trace;
  std::uint64_t trace_every = 1;
  std::uint64_t max_iters = 100'000'000;
  bool no_gap_stop = false;
  bool infeasible_start = false;
  double t_end = 30.0;
  double sample_dt = 0.25;
  std::string x0;
  double mu_max = 10.0;
  double grid_step = 0.25;
  bool check_flow = false;
  bool exact_d = false;
  std::uint64_t seed = 1;
  std::size_t samples = 100;
};

Params params_for(const ValidatedLP& lp, spdlog::logger& log) {
  try {
    return compute_params(lp, DMode::Exact);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ExactTooLarge) throw;
    log.warn("exact D too costly, falling back to the Hadamard bound");
    return compute_params(lp, DMode::Bound);
  }
}

int cmd_solve(const Options& o, std::ostream& out, spdlog::logger& log) {
  const ValidatedLP lp = io::parse_problem(o.file);
  const Params params = params_for(lp, log);
  discrete::DiscreteConfig cfg;
  cfg.eps = o.eps;
  cfg.h = o.h;
  cfg.max_iters = o.max_iters;
  cfg.trace_every = o.trace.empty() ? 0 : o.trace_every;
  cfg.stop_on_certified_gap = !o.no_gap_stop;
  cfg.allow_infeasible_start = o.infeasible_start;
  if (o.start != "auto") cfg.start = read_start_file(o.start);
  const auto result = discrete::solve(lp, params, cfg);
  for (const auto& w : result.solution.warnings) log.warn("{}", w);
  log.info("stopped after {} iterations: {}", result.solution.iterations, discrete::to_string(result.solution.stop));
  if (!o.trace.empty()) io::write_csv_file(o.trace, io::trace_table(result.trace));
  out << io::to_json(result.solution).dump(2) << '\n';
  return kOk;
}

int cmd_flow(const Options& o, std::ostream& out, spdlog::logger& log) {
  const ValidatedLP lp = io::parse_problem(o.file);
  const Params params = params_for(lp, log);
  flow::FlowConfig cfg;
  cfg.t_end = o.t_end;
  cfg.sample_dt = o.sample_dt;
  cfg.x0 = o.x0.empty() ? default_start(lp, log) : parse_vector(o.x0, "--x0");
  if (cfg.x0.size() != lp.n()) throw Error(ErrorCode::DimensionMismatch, "--x0 must have n entries");
  const auto trace = flow::integrate(lp, params, cfg);
  log.info("{} accepted, {} rejected steps", trace.accepted_steps, trace.rejected_steps);
  if (!o.trace.empty()) io::write_csv_file(o.trace, io::trace_table(trace));
  const auto& last = trace.samples.back();
  json doc{{"x", io::to_json(last.x)},
           {"V", last.V},
           {"t", last.t},
           {"accepted_steps", trace.accepted_steps},
           {"rejected_steps", trace.rejected_steps}};
  try {
    const auto orc = oracle::enumerate(lp);
    if (orc.feasible()) doc["rate_report"] = io::to_json(flow::rate_report(lp, params, trace, orc));
  } catch (const Error& e) {
    log.warn("rate report skipped: {}", e.what());
  }
  out << doc.dump(2) << '\n';
  return kOk;
}

int cmd_path(const Options& o, std::ostream& out, spdlog::logger& log) {
  const ValidatedLP lp = io::parse_problem(o.file);
  const Eigen::VectorXd s = default_start(lp, log);
  const auto grid = entropy::uniform_grid(o.mu_max, o.grid_step);
  const auto path = entropy::follow_path(lp, s, grid);
  if (!o.trace.empty()) io::write_csv_file(o.trace, io::trace_table(lp, path));
  json doc = io::to_json(path);
  if (o.check_flow) {
    const Params params = params_for(lp, log);
    flow::FlowConfig cfg;
    cfg.x0 = s;
    cfg.t_end = o.mu_max;
    cfg.sample_dt = o.grid_step;
    doc["flow_deviation"] = entropy::path_flow_deviation(path, flow::integrate(lp, params, cfg));
  }
  out << doc.dump(2) << '\n';
  return kOk;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const ValidatedLP lp = io::parse_problem(o.file);
  out << io::to_json(oracle::enumerate(lp)).dump(2) << '\n';
  return kOk;
}

int cmd_params(const Options& o, std::ostream& out) {
  const ValidatedLP lp = io::parse_problem(o.file);
  out << io::to_json(compute_params(lp, o.exact_d ? DMode::Exact : DMode::Bound)).dump(2) << '\n';
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out, spdlog::logger& log) {
  const ValidatedLP lp = io::parse_problem(o.file);
  const Params params = params_for(lp, log);
  const auto orc = oracle::enumerate(lp);
  if (!orc.feasible()) throw Error(ErrorCode::Infeasible, "problem has no feasible point");

  discrete::DiscreteConfig cfg;
  cfg.eps = o.eps;
  cfg.h = o.h;
  cfg.max_iters = o.max_iters;
  cfg.stop_on_certified_gap = !o.no_gap_stop;
  cfg.verify = discrete::VerifyData{orc.opt, orc.x_star()};
  const auto result = discrete::solve(lp, params, cfg);
  const auto& sol = result.solution;
  const auto cert = discrete::certify_trace(lp, result.trace, orc.opt, o.eps, sol.h, orc.x_star());
  const bool gap_ok = sol.V <= (1.0 + o.eps) * orc.opt + 1e-12 * (1.0 + std::abs(orc.opt)) &&
                      sol.V >= orc.opt - 1e-9 * (1.0 + std::abs(orc.opt));

  properties::SuiteConfig suite_cfg;
  suite_cfg.seed = o.seed;
  suite_cfg.energy_samples = o.samples;
  suite_cfg.gradient_samples = o.samples;
  const auto suite = properties::run_suite(lp, params, orc, suite_cfg);

  json checks = json::array();
  for (const auto& c : suite.checks) {
    checks.push_back(json{{"name", c.name}, {"samples", c.samples}, {"violations", c.violations}, {"worst", c.worst}});
  }
  json doc{{"solution", io::to_json(sol)},
           {"opt", orc.opt},
           {"gap_ok", gap_ok},
           {"certificate", io::to_json(cert)},
           {"properties", std::move(checks)}};
  const bool ok = gap_ok && cert.ok() && suite.ok();
  doc["ok"] = ok;
  out << doc.dump(2) << '\n';
  if (!ok) log.error("verification failed");
  return ok ? kOk : kVerification;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);
  CLI::App app{"Physarum dynamics LP solver"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Options o;

  auto add_file = [&](CLI::App* sub) { sub->add_option("file", o.file, "problem JSON")->required(); };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--eps", o.eps, "target relative gap")->check(CLI::Range(0.0, 0.5));
    sub->add_option("--h", o.h, "explicit step length");
    sub->add_option("--max-iters", o.max_iters, "hard iteration cap");
    sub->add_flag("--no-gap-stop", o.no_gap_stop, "run until the fixed point or the iteration bound");
  };

  auto* solve = app.add_subcommand("solve", "discrete solver");
  add_file(solve);
  add_solver(solve);
  solve->add_option("--start", o.start, "auto or a JSON file holding the start vector");
  solve->add_option("--trace", o.trace, "CSV trace output");
  solve->add_option("--trace-every", o.trace_every, "record every k-th iterate")->check(CLI::PositiveNumber);
  solve->add_flag("--experimental-infeasible", o.infeasible_start, "allow an infeasible start");

  auto* flow = app.add_subcommand("flow", "continuous dynamics");
  add_file(flow);
  flow->add_option("--t-end", o.t_end, "final time")->check(CLI::PositiveNumber);
  flow->add_option("--x0", o.x0, "comma separated start");
  flow->add_option("--sample-dt", o.sample_dt, "sampling interval")->check(CLI::PositiveNumber);
  flow->add_option("--trace", o.trace, "CSV trace output");

  auto* path = app.add_subcommand("path", "entropy barrier path");
  add_file(path);
  path->add_option("--mu-max", o.mu_max, "largest mu")->check(CLI::NonNegativeNumber);
  path->add_option("--grid-step", o.grid_step, "mu spacing")->check(CLI::PositiveNumber);
  path->add_option("--trace", o.trace, "CSV trace output");
  path->add_flag("--check-flow", o.check_flow, "compare against the integrated dynamics");

  auto* orc = app.add_subcommand("oracle", "vertex and ray enumeration");
  add_file(orc);

  auto* params = app.add_subcommand("params", "instance constants");
  add_file(params);
  params->add_flag("--exact-d", o.exact_d, "enumerate subdeterminants instead of bounding them");

  auto* verify = app.add_subcommand("verify", "certified solve plus property checks");
  add_file(verify);
  add_solver(verify);
  verify->add_option("--seed", o.seed, "property sampling seed");
  verify->add_option("--samples", o.samples, "random points per identity check");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return cmd_solve(o, out, *log);
    if (*flow) return cmd_flow(o, out, *log);
    if (*path) return cmd_path(o, out, *log);
    if (*orc) return cmd_oracle(o, out);
    if (*params) return cmd_params(o, out);
    if (*verify) return cmd_verify(o, out, *log);
  } catch (const CLI::ValidationError& e) {
    log->error("{}", e.what());
    return kUsage;
  } catch (const Error& e) {
    log->error("{}", e.what());
    return exit_code_for(e.code());
  }
  return kUsage;
}

}  // namespace physarum::cli
