#include <doctest.h>

#include <cmath>

#include "physarum/error.hpp"
#include "physarum/flow.hpp"
#include "physarum/oracle.hpp"
#include "support.hpp"

using namespace physarum;
using namespace physarum::flow;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Index>(v.size()));
}

FlowTrace run(const ValidatedLP& lp, Eigen::VectorXd x0, double t_end) {
  FlowConfig cfg;
  cfg.x0 = std::move(x0);
  cfg.t_end = t_end;
  return integrate(lp, compute_params(lp, DMode::Exact), cfg);
}

}  // namespace

TEST_CASE("rhs_log") {
  const auto lp = testing::simple2();
  auto du = rhs_log(lp, vec({0.5, 0.5}).array().log().matrix());
  CHECK(du(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(du(1) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  du = rhs_log(lp, vec({1, 1}).array().log().matrix());
  CHECK(du(0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(du(1) == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
  du = rhs_log(testing::identity2(), vec({2, 3}).array().log().matrix());
  CHECK(du.cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("simple2 converges to the optimum") {
  const auto lp = testing::simple2();
  const auto tr = run(lp, vec({0.5, 0.5}), 30.0);
  const auto& last = tr.samples.back();
  CHECK(last.t == 30.0);
  CHECK(last.V >= 1.0 - 1e-9);
  CHECK(last.V - 1.0 <= 1e-3);
  CHECK(std::abs(last.x(0) - 1.0) <= 1e-3);
  CHECK(tr.samples.size() == 121);
  for (const auto& s : tr.samples) {
    CHECK(s.x.minCoeff() > 0.0);
    CHECK(s.feas_residual <= 100 * 1e-8 * 2);
    CHECK(s.xbound_ok);
  }
}

TEST_CASE("constant trajectory at a fixed point") {
  const auto tr = run(testing::identity2(), vec({2, 3}), 10.0);
  for (const auto& s : tr.samples) CHECK((s.x - vec({2, 3})).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("infeasible start keeps the shifted feasibility identity") {
  const auto tr = run(testing::simple2(), vec({2, 2}), 30.0);
  for (const auto& s : tr.samples) {
    CHECK(s.feas_residual <= 1e-6);
    CHECK(s.xbound_ok);
  }
  CHECK(tr.samples.back().V == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("boundedness on the triangle from a large start") {
  const auto tr = run(testing::triangle(), vec({50, 0.1, 20}), 20.0);
  for (const auto& s : tr.samples) {
    CHECK(s.xbound_ok);
    CHECK(s.feas_residual <= 100 * 1e-8 * 2);
  }
}

TEST_CASE("rate report on simple2") {
  const auto lp = testing::simple2();
  const auto params = compute_params(lp, DMode::Exact);
  const auto orc = oracle::enumerate(lp);
  const auto tr = run(lp, vec({0.5, 0.5}), 30.0);
  const auto rep = rate_report(lp, params, tr, orc);
  CHECK_FALSE(rep.degenerate_already_optimal);
  CHECK(rep.nu_bound == 1.0);
  // The linearization at (1, 0) has rate c_2 / c_2 - a_2'p / c_2 = 1 - 1/2.
  CHECK(rep.nu_hat == doctest::Approx(-0.5).epsilon(0.02));
  CHECK(rep.fit_samples > 10);
  CHECK(rep.xN_decay_ok);
  CHECK(rep.xN_slope < 0.0);
  CHECK(rep.xJ_floor > 0.5);
  CHECK(rep.limit_estimate.size() == 2);
}

TEST_CASE("rate report at a fixed point is degenerate") {
  const auto lp = testing::identity2();
  const auto tr = run(lp, vec({2, 3}), 12.0);
  const auto rep = rate_report(lp, compute_params(lp, DMode::Exact), tr, oracle::enumerate(lp));
  CHECK(rep.degenerate_already_optimal);
  CHECK(rep.fixed_point_residual <= 1e-12);
}

TEST_CASE("rate report on the triangle") {
  const auto lp = testing::triangle();
  const auto orc = oracle::enumerate(lp);
  const auto tr = run(lp, vec({1.0 / 3, 1.0 / 3, 2.0 / 3}), 40.0);
  const auto rep = rate_report(lp, compute_params(lp, DMode::Exact), tr, orc);
  CHECK(rep.xN_decay_ok);
  CHECK(rep.xN_slope < 0.0);
  CHECK(rep.xJ_floor > 0.0);
  CHECK(rep.limit_estimate(2) < 1e-3);
}

TEST_CASE("rate report needs a long enough trace") {
  const auto lp = testing::simple2();
  const auto tr = run(lp, vec({0.5, 0.5}), 5.0);
  try {
    rate_report(lp, compute_params(lp, DMode::Exact), tr, oracle::enumerate(lp));
    FAIL("expected InsufficientTrace");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientTrace);
  }
}

TEST_CASE("fit_slope") {
  CHECK(fit_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
  CHECK(fit_slope({0, 1, 2}, {4, 4, 4}) == doctest::Approx(0.0));
}
