#pragma once

#include <cstdint>
#include <vector>

#include "physarum/model.hpp"
#include "physarum/oracle.hpp"

namespace physarum::flow {

struct FlowConfig {
  Eigen::VectorXd x0;  // any strictly positive start; feasibility is not required
  double t_end = 30.0;
  double rel_tol = 1e-8;   // relative accuracy of each x_i per step
  double abs_tol = 1e-10;  // absolute accuracy floor of each x_i per step
  double sample_dt = 0.25;
  double initial_dt = 1e-3;
  std::uint64_t max_steps = 50'000'000;
};

struct FlowTraceEntry {
  double t = 0.0;
  Eigen::VectorXd x;
  double V = 0.0;
  double E = 0.0;
  double feas_residual = 0.0;  // |A (x(t) - e^{-t} x(0)) - (1 - e^{-t}) b|_inf
  double atp_inf = 0.0;
  bool xbound_ok = true;       // x_i(t) <= max(x_i(0), beta) (1 + 1e-6)
};

struct FlowTrace {
  std::vector<FlowTraceEntry> samples;
  std::uint64_t accepted_steps = 0;
  std::uint64_t rejected_steps = 0;
};

/// Log-coordinate vector field: du_i = a_i'p / c_i - 1 evaluated at x = exp(u).
Eigen::VectorXd rhs_log(const ValidatedLP& lp, const Eigen::VectorXd& u);

/// Dormand-Prince 5(4) integration of x' = q - x in u = ln x, sampled every sample_dt
/// (plus t_end). Throws StepSizeUnderflow when dt falls below 1e-14 t_end.
FlowTrace integrate(const ValidatedLP& lp, const Params& params, const FlowConfig& config);

struct ConvergenceReport {
  bool degenerate_already_optimal = false;  // |V - opt| <= 1e-12 at every sample
  double nu_hat = 0.0;    // least-squares slope of ln|V(t) - opt| on the fit window
  double nu_bound = 0.0;  // D^{-3}
  double log_R_bound = 0.0;  // ln of exp(8 D^2 C_s |b|_1) (n + M_x)^2
  double log_Q_bound = 0.0;  // ln of exp(4 D^2 C_s |b|_1) (n + M_x)
  std::size_t fit_samples = 0;
  double fit_t_begin = 0.0;
  double fit_t_end = 0.0;
  double xN_slope = 0.0;  // slope of ln max_{i in N} x_i(t) on the tail; 0 when N is empty
  bool xN_decay_ok = true;
  double xJ_floor = 0.0;  // min over the tail of min_{j in J} x_j(t)
  Eigen::VectorXd limit_estimate;
  double fixed_point_residual = 0.0;  // |q - x|_inf at the last sample
  double limit_drift = 0.0;           // |x(t_end) - x(t_end / 2)|_inf
};

inline constexpr double kGapFloor = 1e-12;

/// Throws InsufficientTrace if the trace spans less than 10 time units or too few
/// samples remain above the gap floor.
ConvergenceReport rate_report(const ValidatedLP& lp, const Params& params, const FlowTrace& trace,
                              const oracle::OracleResult& oracle);

/// Least-squares slope of ys against ts.
double fit_slope(const std::vector<double>& ts, const std::vector<double>& ys);

}  // namespace physarum::flow
