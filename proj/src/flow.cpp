#include "physarum/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "physarum/dynamics.hpp"
#include "physarum/error.hpp"

namespace physarum::flow {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the 5th and embedded 4th order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class LogField {
 public:
  explicit LogField(const ValidatedLP& lp) : ev_(lp) {}

  void operator()(const Eigen::VectorXd& u, Eigen::VectorXd& du) {
    x_ = u.array().exp().matrix();
    ev_.flux(x_);
    du = ev_.atp().cwiseQuotient(ev_.c()).array() - 1.0;
  }

  Evaluator<double>& evaluator() { return ev_; }

 private:
  Evaluator<double> ev_;
  Eigen::VectorXd x_;
};

FlowTraceEntry make_sample(const ValidatedLP& lp, Evaluator<double>& ev, double t, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& x0, double beta) {
  ev.flux(x);
  FlowTraceEntry e;
  e.t = t;
  e.x = x;
  e.V = lp.c().dot(x);
  e.E = ev.energy();
  e.feas_residual = (lp.A() * (x - std::exp(-t) * x0) + std::expm1(-t) * lp.b()).cwiseAbs().maxCoeff();
  e.atp_inf = ev.atp().cwiseAbs().maxCoeff();
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) > std::max(x0(i), beta) * (1.0 + 1e-6)) e.xbound_ok = false;
  }
  return e;
}

}  // namespace

Eigen::VectorXd rhs_log(const ValidatedLP& lp, const Eigen::VectorXd& u) {
  LogField field(lp);
  Eigen::VectorXd du(u.size());
  field(u, du);
  return du;
}

FlowTrace integrate(const ValidatedLP& lp, const Params& params, const FlowConfig& config) {
  const Index n = lp.n();
  if (config.x0.size() != n) throw Error(ErrorCode::DimensionMismatch, "x0 has wrong length");
  if (!strictly_positive(config.x0)) throw Error(ErrorCode::NonPositiveState, "x0 must be strictly positive");
  if (!(config.t_end > 0.0) || !(config.rel_tol > 0.0) || !(config.abs_tol > 0.0) || !(config.sample_dt > 0.0)) {
    throw Error(ErrorCode::DimensionMismatch, "t_end, tolerances and sample_dt must be positive");
  }

  FlowTrace trace;
  LogField field(lp);
  Evaluator<double> sampler(lp);
  const double dt_min = 1e-14 * config.t_end;

  Eigen::VectorXd u = config.x0.array().log().matrix();
  std::array<Eigen::VectorXd, 7> k;
  for (auto& v : k) v.resize(n);
  Eigen::VectorXd stage(n), u_new(n), err(n);

  double t = 0.0;
  double dt = std::min(config.initial_dt, config.t_end);
  trace.samples.push_back(make_sample(lp, sampler, 0.0, config.x0, config.x0, params.beta));
  std::uint64_t next_index = 1;
  auto sample_time = [&](std::uint64_t i) { return std::min(config.t_end, static_cast<double>(i) * config.sample_dt); };

  field(u, k[0]);
  while (t < config.t_end) {
    const double target = sample_time(next_index);
    const bool clipped = t + dt >= target;
    const double h = clipped ? target - t : dt;

    stage = u + h * a21 * k[0];
    field(stage, k[1]);
    stage = u + h * (a31 * k[0] + a32 * k[1]);
    field(stage, k[2]);
    stage = u + h * (a41 * k[0] + a42 * k[1] + a43 * k[2]);
    field(stage, k[3]);
    stage = u + h * (a51 * k[0] + a52 * k[1] + a53 * k[2] + a54 * k[3]);
    field(stage, k[4]);
    stage = u + h * (a61 * k[0] + a62 * k[1] + a63 * k[2] + a64 * k[3] + a65 * k[4]);
    field(stage, k[5]);
    u_new = u + h * (b1 * k[0] + b3 * k[2] + b4 * k[3] + b5 * k[4] + b6 * k[5]);
    field(u_new, k[6]);
    err = h * (e1 * k[0] + e3 * k[2] + e4 * k[3] + e5 * k[4] + e6 * k[5] + e7 * k[6]);

    // An error of du in u is a relative error of du in x; the absolute floor on x
    // becomes abs_tol / x_i in u.
    double err_norm = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double xi = std::exp(std::max(u(i), u_new(i)));
      err_norm = std::max(err_norm, std::abs(err(i)) / (config.rel_tol + config.abs_tol / xi));
    }

    if (err_norm <= 1.0) {
      t = clipped ? target : t + h;
      u = u_new;
      k[0] = k[6];
      ++trace.accepted_steps;
      if (clipped) {
        trace.samples.push_back(make_sample(lp, sampler, t, u.array().exp().matrix(), config.x0, params.beta));
        ++next_index;
      }
    } else {
      ++trace.rejected_steps;
    }
    const double factor = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
    // A step clipped to a sample time does not shrink the working step size.
    dt = (clipped && err_norm <= 1.0) ? std::max(dt, h * factor) : h * factor;
    if (dt < dt_min && t < config.t_end) {
      throw Error(ErrorCode::StepSizeUnderflow, "step size fell below 1e-14 t_end at t = " + std::to_string(t));
    }
    if (trace.accepted_steps + trace.rejected_steps > config.max_steps) {
      throw Error(ErrorCode::StepSizeUnderflow, "step budget exhausted at t = " + std::to_string(t));
    }
  }
  return trace;
}

double fit_slope(const std::vector<double>& ts, const std::vector<double>& ys) {
  const auto count = static_cast<double>(ts.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxy += (ts[i] - mt) * (ys[i] - my);
    sxx += (ts[i] - mt) * (ts[i] - mt);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

ConvergenceReport rate_report(const ValidatedLP& lp, const Params& params, const FlowTrace& trace,
                              const oracle::OracleResult& oracle) {
  const auto& s = trace.samples;
  if (s.size() < 2 || s.back().t - s.front().t < 10.0) {
    throw Error(ErrorCode::InsufficientTrace, "rate fit needs a trace spanning at least 10 time units");
  }
  if (!oracle.feasible()) throw Error(ErrorCode::Infeasible, "rate report needs a feasible instance");

  ConvergenceReport r;
  const double opt = oracle.opt;
  const double D = params.D;
  r.nu_bound = 1.0 / (D * D * D);
  double M_x = 1.0;
  for (Index i = 0; i < s.front().x.size(); ++i) M_x = std::max({M_x, s.front().x(i), 1.0 / s.front().x(i)});
  const double b1 = static_cast<double>(lp.b_int().cwiseAbs().sum());
  const double cs = static_cast<double>(params.cost_sum);
  const double nd = static_cast<double>(lp.n());
  r.log_R_bound = 8.0 * D * D * cs * b1 + 2.0 * std::log(nd + M_x);
  r.log_Q_bound = 4.0 * D * D * cs * b1 + std::log(nd + M_x);

  std::vector<std::size_t> above;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s[i].V - opt) > kGapFloor) above.push_back(i);
  }
  if (above.empty()) {
    r.degenerate_already_optimal = true;
  } else {
    const std::size_t first = above.size() / 2;
    if (above.size() - first < 3) throw Error(ErrorCode::InsufficientTrace, "too few samples above the gap floor");
    std::vector<double> ts, ys;
    for (std::size_t j = first; j < above.size(); ++j) {
      ts.push_back(s[above[j]].t);
      ys.push_back(std::log(std::abs(s[above[j]].V - opt)));
    }
    r.nu_hat = fit_slope(ts, ys);
    r.fit_samples = ts.size();
    r.fit_t_begin = ts.front();
    r.fit_t_end = ts.back();
  }

  const double t_last = s.back().t;
  const double t_half = s.front().t + 0.5 * (t_last - s.front().t);
  std::vector<double> tail_t, tail_n;
  r.xJ_floor = std::numeric_limits<double>::infinity();
  for (const auto& e : s) {
    if (e.t < t_half) continue;
    if (!oracle.N.empty()) {
      double mx = 0.0;
      for (Index i : oracle.N) mx = std::max(mx, e.x(i));
      tail_t.push_back(e.t);
      tail_n.push_back(std::log(mx));
    }
    for (Index j : oracle.J) r.xJ_floor = std::min(r.xJ_floor, e.x(j));
  }
  if (!tail_t.empty()) {
    r.xN_slope = fit_slope(tail_t, tail_n);
    r.xN_decay_ok = r.xN_slope < 0.0;
  }

  r.limit_estimate = s.back().x;
  const auto eval = evaluate(lp, r.limit_estimate);
  r.fixed_point_residual = eval.P.cwiseAbs().maxCoeff();
  const FlowTraceEntry* mid = &s.front();
  for (const auto& e : s) {
    if (std::abs(e.t - 0.5 * t_last) < std::abs(mid->t - 0.5 * t_last)) mid = &e;
  }
  r.limit_drift = (s.back().x - mid->x).cwiseAbs().maxCoeff();
  return r;
}

}  // namespace physarum::flow
