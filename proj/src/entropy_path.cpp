#include "physarum/entropy_path.hpp"

#include <cmath>

#include "physarum/dynamics.hpp"
#include "physarum/error.hpp"
#include "physarum/linalg.hpp"

namespace physarum::entropy {

namespace {

constexpr double kArmijo = 0.25;
constexpr int kMaxHalvings = 60;
constexpr int kMaxNewtonIters = 200;

// g and x(y) only; the line search does not need the Hessian.
double dual_value(const ValidatedLP& lp, const Eigen::VectorXd& s, double mu, const Eigen::VectorXd& y,
                  Eigen::VectorXd& x) {
  const Eigen::VectorXd& c = lp.c();
  const Eigen::VectorXd expo = (lp.A().transpose() * y).cwiseQuotient(c).array() - mu;
  if ((expo.array() > kMaxExponent).any() || !expo.allFinite()) {
    throw Error(ErrorCode::Overflow, "dual exponent exceeds " + std::to_string(kMaxExponent));
  }
  x = s.cwiseProduct(expo.array().exp().matrix());
  return y.dot(lp.b()) - c.dot(x);
}

void check_start(const ValidatedLP& lp, const Eigen::VectorXd& s) {
  if (s.size() != lp.n()) throw Error(ErrorCode::DimensionMismatch, "s has wrong length");
  if (!strictly_positive(s)) throw Error(ErrorCode::InfeasibleStart, "s must be strictly positive");
  const double resid = (lp.A() * s - lp.b()).cwiseAbs().maxCoeff();
  if (resid > 1e-8 * (lp.b().cwiseAbs().maxCoeff() + 1.0)) {
    throw Error(ErrorCode::InfeasibleStart, "s violates As = b by " + std::to_string(resid));
  }
}

}  // namespace

DualEval dual_value_and_derivatives(const ValidatedLP& lp, const Eigen::VectorXd& s, double mu,
                                    const Eigen::VectorXd& y) {
  if (!strictly_positive(s)) throw Error(ErrorCode::InfeasibleStart, "s must be strictly positive");
  DualEval out;
  out.g = dual_value(lp, s, mu, y, out.x);
  out.grad = lp.b() - lp.A() * out.x;
  const Eigen::VectorXd w = out.x.cwiseQuotient(lp.c());
  out.hess = -(lp.A() * w.asDiagonal() * lp.A().transpose());
  return out;
}

PathPoint solve_point(const ValidatedLP& lp, const Eigen::VectorXd& s, double mu, const Eigen::VectorXd& y_init) {
  check_start(lp, s);
  const double tol = 1e-10 * (lp.b().cwiseAbs().maxCoeff() + 1.0);
  PathPoint pt;
  pt.mu = mu;
  pt.y = y_init.size() == lp.m() ? y_init : Eigen::VectorXd::Zero(lp.m());

  Eigen::VectorXd x_trial;
  for (int it = 0;; ++it) {
    DualEval d = dual_value_and_derivatives(lp, s, mu, pt.y);
    const double gnorm = d.grad.cwiseAbs().maxCoeff();
    if (gnorm <= tol) {
      pt.x = std::move(d.x);
      pt.dual_value = d.g;
      pt.newton_iters = it;
      return pt;
    }
    if (it >= kMaxNewtonIters) throw Error(ErrorCode::NewtonStalled, "Newton iteration limit at mu = " + std::to_string(mu));

    // Ascent direction: (A W A') dy = grad, the same normal equations as the dynamics.
    const Eigen::VectorXd dy = linalg::SpdFactorization<double>(-d.hess).solve(d.grad);
    const double slope = d.grad.dot(dy);
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= kMaxHalvings; ++halving, step *= 0.5) {
      const Eigen::VectorXd y_trial = pt.y + step * dy;
      double g_trial = 0.0;
      try {
        g_trial = dual_value(lp, s, mu, y_trial, x_trial);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Overflow) continue;
        throw;
      }
      // Near the optimum the Armijo test drowns in rounding; a full step that
      // shrinks the gradient is accepted on that basis instead.
      const bool armijo = g_trial >= d.g + kArmijo * step * slope;
      const bool shrinks = step == 1.0 && (lp.b() - lp.A() * x_trial).cwiseAbs().maxCoeff() < 0.5 * gnorm;
      if (armijo || shrinks) {
        pt.y = y_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw Error(ErrorCode::NewtonStalled, "line search failed at mu = " + std::to_string(mu));
  }
}

EntropyPath follow_path(const ValidatedLP& lp, const Eigen::VectorXd& s, const std::vector<double>& mu_grid,
                        double max_substep) {
  if (mu_grid.empty() || mu_grid.front() != 0.0) throw Error(ErrorCode::BadGrid, "grid must start at 0");
  for (std::size_t j = 1; j < mu_grid.size(); ++j) {
    if (!(mu_grid[j] > mu_grid[j - 1])) throw Error(ErrorCode::BadGrid, "grid must be strictly increasing");
  }
  check_start(lp, s);
  EntropyPath path;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(lp.m());
  double mu_prev = 0.0;
  for (double mu : mu_grid) {
    const int pieces = std::max(1, static_cast<int>(std::ceil((mu - mu_prev) / max_substep - 1e-12)));
    for (int piece = 1; piece < pieces; ++piece) {
      y = solve_point(lp, s, mu_prev + (mu - mu_prev) * piece / pieces, y).y;
    }
    PathPoint pt = solve_point(lp, s, mu, y);
    y = pt.y;
    mu_prev = mu;
    path.max_feas_residual = std::max(path.max_feas_residual, (lp.A() * pt.x - lp.b()).cwiseAbs().maxCoeff());
    if (!path.points.empty() && lp.c().dot(pt.x) > lp.c().dot(path.points.back().x) + 1e-10) {
      path.cost_monotone = false;
    }
    path.points.push_back(std::move(pt));
  }
  return path;
}

std::vector<double> uniform_grid(double mu_max, double step) {
  if (!(mu_max >= 0.0) || !(step > 0.0)) throw Error(ErrorCode::BadGrid, "grid needs mu_max >= 0 and step > 0");
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor(mu_max / step + 1e-9));
  for (std::size_t j = 0; j <= count; ++j) grid.push_back(static_cast<double>(j) * step);
  if (mu_max - grid.back() > 1e-9 * step) grid.push_back(mu_max);
  return grid;
}

double path_flow_deviation(const EntropyPath& path, const flow::FlowTrace& trace) {
  double worst = 0.0;
  std::size_t j = 0;
  for (const auto& pt : path.points) {
    while (j < trace.samples.size() && trace.samples[j].t < pt.mu - 1e-9) ++j;
    if (j == trace.samples.size() || std::abs(trace.samples[j].t - pt.mu) > 1e-9) {
      throw Error(ErrorCode::InsufficientTrace, "no flow sample at mu = " + std::to_string(pt.mu));
    }
    worst = std::max(worst, (pt.x - trace.samples[j].x).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace physarum::entropy
