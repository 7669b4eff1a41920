#include "physarum/properties.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "physarum/dynamics.hpp"
#include "physarum/error.hpp"
#include "physarum/linalg.hpp"

namespace physarum::properties {

namespace {

void record(Check& check, double measured, double allowed) {
  ++check.samples;
  const double ratio = measured / allowed;
  if (!(ratio <= 1.0)) ++check.violations;
  if (std::isnan(ratio)) check.worst = ratio;
  else check.worst = std::max(check.worst, ratio);
}

Eigen::VectorXd random_feasible(const oracle::OracleResult& oracle, const Eigen::VectorXd& interior,
                                std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(interior.size());
  double total = 0.0;
  for (const auto& v : oracle.vertices) {
    const double w = expo(rng);
    x += w * v;
    total += w;
  }
  x /= total;
  const double lambda = 0.01 + 0.99 * unit(rng);
  x = (1.0 - lambda) * x + lambda * interior;
  for (const auto& r : oracle.rays) x += 10.0 * unit(rng) * r;
  return x;
}

}  // namespace

bool SuiteReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.violations == 0; });
}

const Check& SuiteReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no check named " + name);
}

SuiteReport run_suite(const ValidatedLP& lp, const Params& params, const oracle::OracleResult& oracle,
                      const SuiteConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> expo10(-4.0, 4.0);
  std::uniform_real_distribution<double> expo2(-2.0, 2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Index n = lp.n();
  const auto& b = lp.b();
  const auto& c = lp.c();
  const double b_inf = b.size() ? b.cwiseAbs().maxCoeff() : 0.0;

  auto log_point = [&](auto& dist) {
    Eigen::VectorXd x(n);
    for (Index i = 0; i < n; ++i) x(i) = std::pow(10.0, dist(rng));
    return x;
  };

  Check energy{"energy_identity"}, by_flux{"energy_by_flux"}, flux{"flux_feasible"}, split{"direction_split"};
  Check gradient{"gradient_identity"}, qbound{"q_bound"}, atp{"atp_bound"}, pf{"pf_vanishes"}, key{"key_bound"};

  auto pointwise = [&](const DynamicsEval<double>& e) {
    const double scale = std::abs(e.energy) + 1.0;
    record(by_flux, std::abs(e.energy - energy_by_flux(e)), 1e-10 * scale);
    record(flux, (lp.A() * e.q - b).cwiseAbs().maxCoeff(), 1e-8 * (b_inf + 1.0));
    record(split, (e.P - e.P_f - e.P_o).cwiseAbs().maxCoeff(),
           1e-10 * (e.P_f.cwiseAbs().maxCoeff() + e.P_o.cwiseAbs().maxCoeff() + 1.0));
  };

  for (std::size_t s = 0; s < config.energy_samples; ++s) {
    const auto e = evaluate(lp, log_point(expo2));
    pointwise(e);
    for (const auto& y : oracle.vertices)
      record(energy, energy_identity_residual(e, y), 1e-8 * (std::abs(e.energy) + 1.0));
  }

  if (n > lp.m()) {
    const Eigen::MatrixXd K = linalg::kernel_basis(lp.A());
    for (std::size_t s = 0; s < config.gradient_samples; ++s) {
      const auto e = evaluate(lp, log_point(expo2));
      Eigen::VectorXd coeff(K.cols());
      for (Index j = 0; j < coeff.size(); ++j) coeff(j) = gauss(rng);
      const Eigen::VectorXd h = K * coeff;
      record(gradient, gradient_identity_residual(lp, e, h),
             1e-8 * (c.cwiseAbs().maxCoeff() * h.cwiseAbs().maxCoeff() + 1.0));
    }
  }

  for (std::size_t s = 0; s < config.bound_samples; ++s) {
    const auto e = evaluate(lp, log_point(expo10));
    const auto r = check_bounds(e, params, false);
    record(qbound, r.q_inf, r.q_bound * (1.0 + kBoundSlack));
  }

  // Feasible samples need a strictly positive feasible point; skipped when none exists.
  std::optional<Eigen::VectorXd> interior_opt;
  if (oracle.feasible() && !lp.zero_demand()) {
    try {
      interior_opt = oracle::interior_point(oracle);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoInteriorPoint) throw;
    }
  }
  if (interior_opt) {
    const Eigen::VectorXd& interior = *interior_opt;
    for (std::size_t s = 0; s < config.feasible_samples; ++s) {
      const Eigen::VectorXd x = random_feasible(oracle, interior, rng);
      const auto e = evaluate(lp, x);
      pointwise(e);
      const auto r = check_bounds(e, params, true);
      record(atp, r.atp_inf, r.atp_bound * (1.0 + kBoundSlack));
      if ((lp.A() * x - b).cwiseAbs().maxCoeff() <= 1e-10 * (b_inf + 1.0))
        record(pf, e.P_f.cwiseAbs().maxCoeff(), 1e-8 * (x.cwiseAbs().maxCoeff() + 1.0));
    }
  }

  for (std::size_t s = 0; s < config.key_samples; ++s) {
    record(key, key_bound_ratio(lp, log_point(expo2)), params.D * (1.0 + kBoundSlack));
  }

  SuiteReport rep;
  rep.checks = {energy, by_flux, flux, split, gradient, qbound, atp, pf, key};
  return rep;
}

}  // namespace physarum::properties
