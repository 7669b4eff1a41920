#pragma once

#include <vector>

#include "physarum/flow.hpp"
#include "physarum/model.hpp"

namespace physarum::entropy {

/// Dual of  min mu c'x + sum c_i x_i ln(c_i x_i) - sum c_i x_i (1 + ln(c_i s_i))  s.t. Ax = b,
///   g(y) = y'b - sum_i c_i s_i exp(a_i'y / c_i - mu),
/// whose inner minimizer is x_i(y) = s_i exp(a_i'y / c_i - mu).
struct DualEval {
  double g = 0.0;
  Eigen::VectorXd grad;  // b - A x(y)
  Eigen::MatrixXd hess;  // -A W(x(y)) A'
  Eigen::VectorXd x;     // x(y)
};

inline constexpr double kMaxExponent = 700.0;

/// Throws Overflow when some exponent exceeds 700.
DualEval dual_value_and_derivatives(const ValidatedLP& lp, const Eigen::VectorXd& s, double mu,
                                    const Eigen::VectorXd& y);

struct PathPoint {
  double mu = 0.0;
  Eigen::VectorXd y;
  Eigen::VectorXd x;
  double dual_value = 0.0;
  int newton_iters = 0;
};

/// Damped Newton ascent on g (Armijo 0.25, halving) until |grad|_inf <= 1e-10 (|b|_inf + 1).
/// Throws InfeasibleStart unless s > 0 and As = b; NewtonStalled after 60 failed halvings.
PathPoint solve_point(const ValidatedLP& lp, const Eigen::VectorXd& s, double mu, const Eigen::VectorXd& y_init);

struct EntropyPath {
  std::vector<PathPoint> points;
  bool cost_monotone = true;  // c'x(mu_{j+1}) <= c'x(mu_j) + 1e-10
  double max_feas_residual = 0.0;
};

/// Warm-started sweep over an increasing grid starting at 0; grid gaps wider than
/// max_substep are bridged with unrecorded intermediate solves.
EntropyPath follow_path(const ValidatedLP& lp, const Eigen::VectorXd& s, const std::vector<double>& mu_grid,
                        double max_substep = 0.25);

/// {0, step, 2 step, ..., mu_max}.
std::vector<double> uniform_grid(double mu_max, double step);

/// max over grid points of |x_path(mu) - x_flow(t = mu)|_inf, matching samples by time.
/// Throws InsufficientTrace if some grid point has no flow sample within 1e-9.
double path_flow_deviation(const EntropyPath& path, const flow::FlowTrace& trace);

}  // namespace physarum::entropy
