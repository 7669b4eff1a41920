#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "physarum/model.hpp"

namespace physarum::discrete {

/// Ground truth handed to the solver for potential-function bookkeeping.
struct VerifyData {
  double opt = 0.0;
  Eigen::VectorXd x_star;
};

struct DiscreteConfig {
  double eps = 0.1;                  // target relative gap, 0 < eps < 1/2
  std::optional<double> h;           // explicit step; default eps / (6 P_max^2)
  std::uint64_t max_iters = 100'000'000;
  std::optional<Eigen::VectorXd> start;
  double fixed_point_tol = 1e-9;
  std::uint64_t trace_every = 1;     // 0 records no trace
  bool stop_on_certified_gap = true;
  bool allow_infeasible_start = false;  // experimental: no certificate applies
  std::optional<VerifyData> verify;
};

struct DiscreteTraceEntry {
  std::uint64_t k = 0;
  Eigen::VectorXd x;
  double V = 0.0;  // c'x(k)
  double E = 0.0;  // b'p(k)
  double feas_residual = 0.0;
  double atp_inf = 0.0;
  std::optional<double> B;    // sum_i c_i x*_i ln x_i(k)
  std::optional<double> phi;  // 4 ln V - (eps h / opt) B
};

enum class StopReason {
  FixedPoint,      // |q - x|_inf <= tol (1 + |x|_inf)
  CertifiedGap,    // V <= (1 + eps) * (dual lower bound)
  IterationBound,  // worst-case bound from the potential argument reached
  UserCap,         // max_iters reached first
  ZeroDemand,      // b = 0: x = 0 is the unique optimum
};

std::string_view to_string(StopReason r) noexcept;

/// Per-step potential-drop audit over steps with V(k) > (1 + eps) opt.
struct CertReport {
  std::uint64_t pairs_seen = 0;
  std::uint64_t steps_checked = 0;
  std::uint64_t violations = 0;
  std::uint64_t big_gap_steps = 0;    // E/V < 1 - eps/3
  std::uint64_t small_gap_steps = 0;  // E > (1 + eps/3) opt
  std::uint64_t neither_steps = 0;
  std::uint64_t recurrence_violations = 0;  // V(k+1) = (1-h) V(k) + h E(k)
  double required_drop = 0.0;               // h^2 eps^2 / 6
  double worst_margin = -std::numeric_limits<double>::infinity();  // max of dphi + required_drop
  double max_phi_mismatch = 0.0;            // only set by certify_trace
  std::vector<std::uint64_t> violating_steps;  // first few offending k

  bool ok() const { return violations == 0 && recurrence_violations == 0; }
};

inline constexpr double kDropSlack = 1e-10;
inline constexpr double kRecurrenceTol = 1e-10;

/// Streaming form of the certificate; fed one (k, V, E, phi) per iteration.
class PotentialCertifier {
 public:
  PotentialCertifier(double opt, double eps, double h, Eigen::VectorXd x_star, Eigen::VectorXd c);

  template <typename Derived>
  double barrier(const Eigen::MatrixBase<Derived>& x) const {
    double B = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
      if (weights_(i) != 0.0) B += weights_(i) * std::log(x(i));
    }
    return B;
  }
  double potential(double V, double B) const;

  void observe(std::uint64_t k, double V, double E, double phi);

  const CertReport& report() const { return report_; }

 private:
  double opt_, eps_, h_;
  Eigen::VectorXd weights_;  // c_i x*_i
  CertReport report_;
  bool has_prev_ = false;
  std::uint64_t prev_k_ = 0;
  double prev_V_ = 0.0, prev_E_ = 0.0, prev_phi_ = 0.0;
};

struct Solution {
  Eigen::VectorXd x;
  double V = 0.0;
  std::uint64_t iterations = 0;
  StopReason stop = StopReason::FixedPoint;
  double h = 0.0;
  double lower_bound = 0.0;  // best dual bound b'y seen, y = p / max_i(a_i'p / c_i)
  double fixed_point_residual = 0.0;
  std::uint64_t iteration_cap = 0;
  std::vector<std::string> warnings;
  std::optional<CertReport> certificate;  // verify mode only
};

struct SolveResult {
  Solution solution;
  std::vector<DiscreteTraceEntry> trace;
};

/// eps / (6 P_max^2). Throws BadEps unless 0 < eps < 1/2.
double default_step(const Params& params, double eps);

/// ceil(6 (4 ln M + 2 eps h ln M_x) / (h^2 eps^2)), saturating at UINT64_MAX.
std::uint64_t iteration_bound(double M, double M_x, double eps, double h);

/// x' = (1 - h) x + h q. Throws PositivityLost if some x'_i <= 0.
Eigen::VectorXd step(const ValidatedLP& lp, const Eigen::VectorXd& x, double h);

SolveResult solve(const ValidatedLP& lp, const Params& params, const DiscreteConfig& config);

/// Recomputes B and phi from each entry's x and checks the per-step drop.
/// Requires consecutive entries recorded in verify mode, else MissingVerifyData.
CertReport certify_trace(const ValidatedLP& lp, const std::vector<DiscreteTraceEntry>& trace, double opt,
                         double eps, double h, const Eigen::VectorXd& x_star);

}  // namespace physarum::discrete
