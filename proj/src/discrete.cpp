#include "physarum/discrete.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "physarum/dynamics.hpp"
#include "physarum/error.hpp"
#include "physarum/oracle.hpp"

namespace physarum::discrete {

std::string_view to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::FixedPoint: return "FixedPoint";
    case StopReason::CertifiedGap: return "CertifiedGap";
    case StopReason::IterationBound: return "IterationBound";
    case StopReason::UserCap: return "UserCap";
    case StopReason::ZeroDemand: return "ZeroDemand";
  }
  return "Unknown";
}

PotentialCertifier::PotentialCertifier(double opt, double eps, double h, Eigen::VectorXd x_star, Eigen::VectorXd c)
    : opt_(opt), eps_(eps), h_(h), weights_(c.cwiseProduct(x_star)) {
  if (!(opt > 0.0)) throw Error(ErrorCode::MissingVerifyData, "certificate needs opt > 0");
  report_.required_drop = h * h * eps * eps / 6.0;
}

double PotentialCertifier::potential(double V, double B) const {
  return 4.0 * std::log(V) - (eps_ * h_ / opt_) * B;
}

void PotentialCertifier::observe(std::uint64_t k, double V, double E, double phi) {
  if (has_prev_ && k == prev_k_ + 1) {
    ++report_.pairs_seen;
    const double predicted = (1.0 - h_) * prev_V_ + h_ * prev_E_;
    if (std::abs(V - predicted) > kRecurrenceTol * std::abs(prev_V_)) ++report_.recurrence_violations;
    if (prev_V_ > (1.0 + eps_) * opt_) {
      ++report_.steps_checked;
      if (prev_E_ / prev_V_ < 1.0 - eps_ / 3.0) {
        ++report_.big_gap_steps;
      } else if (prev_E_ > (1.0 + eps_ / 3.0) * opt_) {
        ++report_.small_gap_steps;
      } else {
        ++report_.neither_steps;
      }
      const double margin = (phi - prev_phi_) + report_.required_drop;
      report_.worst_margin = std::max(report_.worst_margin, margin);
      if (margin > kDropSlack) {
        ++report_.violations;
        if (report_.violating_steps.size() < 16) report_.violating_steps.push_back(prev_k_);
      }
    }
  }
  has_prev_ = true;
  prev_k_ = k;
  prev_V_ = V;
  prev_E_ = E;
  prev_phi_ = phi;
}

double default_step(const Params& params, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw Error(ErrorCode::BadEps, "eps must lie in (0, 1/2)");
  return eps / (6.0 * params.p_max * params.p_max);
}

std::uint64_t iteration_bound(double M, double M_x, double eps, double h) {
  const double numerator = 6.0 * (4.0 * std::log(M) + 2.0 * eps * h * std::log(M_x));
  const double value = numerator / (h * h * eps * eps);
  if (!(value > 0.0)) return 0;
  if (value >= static_cast<double>(std::numeric_limits<std::uint64_t>::max())) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  // Snap values within rounding of an integer before taking the ceiling.
  const double nearest = std::round(value);
  if (std::abs(value - nearest) <= 1e-12 * value) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(value));
}

Eigen::VectorXd step(const ValidatedLP& lp, const Eigen::VectorXd& x, double h) {
  Evaluator<double> ev(lp);
  ev.flux(x);
  Eigen::VectorXd next = x + h * (ev.q() - x);
  if (!strictly_positive(next)) throw Error(ErrorCode::PositivityLost, "step left the positive orthant; h too large");
  return next;
}

namespace {

template <typename Derived>
double inf_norm(const Eigen::MatrixBase<Derived>& v) {
  return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

Eigen::VectorXd resolve_start(const ValidatedLP& lp, const DiscreteConfig& config) {
  if (config.start) return *config.start;
  if (lp.problem().start) return *lp.problem().start;
  try {
    return oracle::interior_point(oracle::enumerate(lp));
  } catch (const Error& e) {
    throw Error(ErrorCode::NoFeasibleInteriorStart, e.what());
  }
}

// The main loop, with m fixed at compile time for the common small instances.
template <int Rows, int Cols>
void run_loop(const ValidatedLP& lp, const DiscreteConfig& config, double h, std::uint64_t bound,
              const Eigen::VectorXd& start, std::optional<PotentialCertifier>& cert, SolveResult& out) {
  Solution& sol = out.solution;
  Evaluator<double, Rows, Cols> ev(lp);
  const auto& c = ev.c();
  const auto& A_b = ev.b();
  Vector<double, Cols> x = start;
  Vector<double, Cols> direction(lp.n());
  sol.lower_bound = 0.0;
  std::uint64_t k = 0;
  for (;; ++k) {
    ev.flux(x);
    const double V = c.dot(x);
    const double E = ev.energy();
    direction = ev.q() - x;
    const double fp_resid = inf_norm(direction);

    const bool record = config.trace_every > 0 && k % config.trace_every == 0;
    std::optional<double> B, phi;
    if (cert) {
      B = cert->barrier(x);
      phi = cert->potential(V, *B);
      cert->observe(k, V, E, *phi);
    }

    const double s = ev.atp().cwiseQuotient(c).maxCoeff();
    if (s > 0.0) sol.lower_bound = std::max(sol.lower_bound, E / s);

    std::optional<StopReason> stop;
    if (fp_resid <= config.fixed_point_tol * (1.0 + inf_norm(x))) {
      stop = StopReason::FixedPoint;
    } else {
      if (config.stop_on_certified_gap && V <= (1.0 + config.eps) * sol.lower_bound) {
        stop = StopReason::CertifiedGap;
      } else if (k >= sol.iteration_cap) {
        stop = bound <= config.max_iters ? StopReason::IterationBound : StopReason::UserCap;
      }
    }

    if (record || (stop && config.trace_every > 0)) {
      DiscreteTraceEntry e;
      e.k = k;
      e.x = x;
      e.V = V;
      e.E = E;
      e.feas_residual = inf_norm(ev.A() * x - A_b);
      e.atp_inf = inf_norm(ev.atp());
      e.B = B;
      e.phi = phi;
      out.trace.push_back(std::move(e));
    }

    if (stop) {
      sol.stop = *stop;
      sol.fixed_point_residual = fp_resid;
      sol.V = V;
      break;
    }

    x += h * direction;
    if (!strictly_positive(x)) {
      throw Error(ErrorCode::PositivityLost, "iterate left the positive orthant at k = " + std::to_string(k + 1));
    }
  }
  sol.x = x;
  sol.iterations = k;
}

template <int Rows>
void dispatch_cols(const ValidatedLP& lp, const DiscreteConfig& config, double h, std::uint64_t bound,
                   const Eigen::VectorXd& x, std::optional<PotentialCertifier>& cert, SolveResult& out) {
  if constexpr (Rows != Eigen::Dynamic) {
    switch (lp.n()) {
      case 1: if constexpr (Rows <= 1) return run_loop<Rows, 1>(lp, config, h, bound, x, cert, out); break;
      case 2: if constexpr (Rows <= 2) return run_loop<Rows, 2>(lp, config, h, bound, x, cert, out); break;
      case 3: return run_loop<Rows, 3>(lp, config, h, bound, x, cert, out);
      case 4: return run_loop<Rows, 4>(lp, config, h, bound, x, cert, out);
      case 5: return run_loop<Rows, 5>(lp, config, h, bound, x, cert, out);
      case 6: return run_loop<Rows, 6>(lp, config, h, bound, x, cert, out);
      default: break;
    }
  }
  run_loop<Rows, Eigen::Dynamic>(lp, config, h, bound, x, cert, out);
}

void dispatch_rows(const ValidatedLP& lp, const DiscreteConfig& config, double h, std::uint64_t bound,
                   const Eigen::VectorXd& x, std::optional<PotentialCertifier>& cert, SolveResult& out) {
  switch (lp.m()) {
    case 1: return dispatch_cols<1>(lp, config, h, bound, x, cert, out);
    case 2: return dispatch_cols<2>(lp, config, h, bound, x, cert, out);
    case 3: return dispatch_cols<3>(lp, config, h, bound, x, cert, out);
    default: return dispatch_cols<Eigen::Dynamic>(lp, config, h, bound, x, cert, out);
  }
}

}  // namespace

SolveResult solve(const ValidatedLP& lp, const Params& params, const DiscreteConfig& config) {
  SolveResult out;
  Solution& sol = out.solution;
  const Index n = lp.n();

  const double auto_h = default_step(params, config.eps);
  if (lp.zero_demand()) {
    sol.x = Eigen::VectorXd::Zero(n);
    sol.stop = StopReason::ZeroDemand;
    sol.h = config.h.value_or(auto_h);
    return out;
  }

  double h = auto_h;
  if (config.h) {
    h = *config.h;
    if (!(h > 0.0 && h <= 0.5 / params.p_max)) {
      throw Error(ErrorCode::BadStep, "explicit h must lie in (0, 1/(2 P_max)]");
    }
    if (h > auto_h) {
      std::ostringstream msg;
      msg << "h = " << h << " exceeds eps/(6 P_max^2) = " << auto_h << "; the convergence certificate does not apply";
      sol.warnings.push_back(msg.str());
    }
  }
  sol.h = h;

  Eigen::VectorXd x = resolve_start(lp, config);
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "start has wrong length");
  if (!strictly_positive(x)) throw Error(ErrorCode::NoFeasibleInteriorStart, "start must be strictly positive");
  const Eigen::VectorXd& A_b = lp.b();
  const double feas_tol = 1e-8 * (inf_norm(A_b) + 1.0);
  const double start_resid = inf_norm(lp.A() * x - A_b);
  if (start_resid > feas_tol) {
    if (!config.allow_infeasible_start) {
      throw Error(ErrorCode::NoFeasibleInteriorStart, "start violates Ax = b by " + std::to_string(start_resid));
    }
    sol.warnings.push_back("infeasible start: experimental mode, no certificate applies");
  }

  const Eigen::VectorXd& c = lp.c();
  double M_x = 1.0;
  for (Index i = 0; i < n; ++i) M_x = std::max({M_x, x(i), 1.0 / x(i)});
  // opt >= c_min / D: every nonzero vertex coordinate is at least 1/D.
  const double opt_floor = c.minCoeff() / params.D;
  const double M_hat = std::max(1.0, c.dot(x) / opt_floor);
  const std::uint64_t bound = iteration_bound(M_hat, M_x, config.eps, h);
  sol.iteration_cap = std::min(bound, config.max_iters);

  std::optional<PotentialCertifier> cert;
  if (config.verify) cert.emplace(config.verify->opt, config.eps, h, config.verify->x_star, c);

  dispatch_rows(lp, config, h, bound, x, cert, out);
  if (cert) sol.certificate = cert->report();
  return out;
}

CertReport certify_trace(const ValidatedLP& lp, const std::vector<DiscreteTraceEntry>& trace, double opt,
                         double eps, double h, const Eigen::VectorXd& x_star) {
  PotentialCertifier cert(opt, eps, h, x_star, lp.c());
  double mismatch = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& e = trace[i];
    if (!e.phi) throw Error(ErrorCode::MissingVerifyData, "trace entry " + std::to_string(e.k) + " has no potential");
    if (i > 0 && e.k != trace[i - 1].k + 1) {
      throw Error(ErrorCode::MissingVerifyData, "trace is not consecutive at k = " + std::to_string(e.k));
    }
    const double phi = cert.potential(e.V, cert.barrier(e.x));
    mismatch = std::max(mismatch, std::abs(phi - *e.phi));
    cert.observe(e.k, e.V, e.E, phi);
  }
  CertReport rep = cert.report();
  rep.max_phi_mismatch = mismatch;
  return rep;
}

}  // namespace physarum::discrete
