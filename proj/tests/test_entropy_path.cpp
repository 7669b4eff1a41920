#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "physarum/entropy_path.hpp"
#include "physarum/error.hpp"
#include "support.hpp"

using namespace physarum;
using namespace physarum::entropy;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Index>(v.size()));
}

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("dual at the origin") {
  const auto lp = testing::simple2();
  const auto d = dual_value_and_derivatives(lp, vec({0.5, 0.5}), 0.0, Eigen::VectorXd::Zero(1));
  CHECK(d.grad.cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(d.hess(0, 0) == doctest::Approx(-0.75).epsilon(1e-15));
  CHECK(d.g == doctest::Approx(-(1 * 0.5 + 2 * 0.5)).epsilon(1e-15));
  CHECK((d.x - vec({0.5, 0.5})).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unit costs reduce to the plain entropy dual") {
  const auto lp = validate(testing::make_lp({{1, 0, 1}, {-1, 1, 0}}, {1, 0}, {1, 1, 1}));
  const auto s = vec({0.25, 0.25, 0.75});
  const auto y = vec({0.3, -0.7});
  const double mu = 1.3;
  const auto d = dual_value_and_derivatives(lp, s, mu, y);
  const Eigen::VectorXd ay = lp.A().transpose() * y;
  const double g = y.dot(lp.b()) - (s.array() * (ay.array() - mu).exp()).sum();
  CHECK(d.g == doctest::Approx(g).epsilon(1e-14));
  CHECK((d.x.array() - s.array() * (ay.array() - mu).exp()).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("finite differences of the dual") {
  const auto lp = testing::triangle();
  const auto s = vec({1.0 / 3, 1.0 / 3, 2.0 / 3});
  const auto y = vec({0.4, 0.9});
  const double mu = 0.8, d = 1e-6;
  const auto base = dual_value_and_derivatives(lp, s, mu, y);
  for (Index i = 0; i < 2; ++i) {
    Eigen::VectorXd yp = y, ym = y;
    yp(i) += d;
    ym(i) -= d;
    const auto gp = dual_value_and_derivatives(lp, s, mu, yp);
    const auto gm = dual_value_and_derivatives(lp, s, mu, ym);
    CHECK((gp.g - gm.g) / (2 * d) == doctest::Approx(base.grad(i)).epsilon(1e-7));
    CHECK(((gp.grad - gm.grad) / (2 * d) - base.hess.col(i)).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("hessian is the negated laplacian") {
  const auto lp = testing::triangle();
  const auto s = vec({1.0 / 3, 1.0 / 3, 2.0 / 3});
  const auto d = dual_value_and_derivatives(lp, s, 2.0, vec({0.1, -0.2}));
  const Eigen::MatrixXd L = lp.A() * (d.x.array() / lp.c().array()).matrix().asDiagonal() * lp.A().transpose();
  CHECK((d.hess + L).cwiseAbs().maxCoeff() <= 1e-12 * (1 + L.cwiseAbs().maxCoeff()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.hess);
  CHECK(es.eigenvalues().maxCoeff() < 0.0);
}

TEST_CASE("overflow guard") {
  const auto lp = testing::simple2();
  CHECK(code_of([&] { dual_value_and_derivatives(lp, vec({0.5, 0.5}), 0.0, vec({1000})); }) == ErrorCode::Overflow);
}

TEST_CASE("solve_point") {
  const auto lp = testing::simple2();
  const auto s = vec({0.5, 0.5});
  const auto p0 = solve_point(lp, s, 0.0, Eigen::VectorXd::Zero(1));
  CHECK((p0.x - s).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p0.y.cwiseAbs().maxCoeff() == 0.0);

  const auto p5 = solve_point(lp, s, 5.0, Eigen::VectorXd::Zero(1));
  CHECK(std::abs(p5.x.sum() - 1.0) <= 1e-8 * 2);
  flow::FlowConfig cfg;
  cfg.x0 = s;
  cfg.t_end = 5.0;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  const auto tr = flow::integrate(lp, compute_params(lp, DMode::Exact), cfg);
  CHECK((p5.x - tr.samples.back().x).cwiseAbs().maxCoeff() <= 1e-6);

  const auto id = testing::identity2();
  for (double mu : {0.0, 1.0, 7.5}) {
    const auto p = solve_point(id, vec({2, 3}), mu, Eigen::VectorXd::Zero(2));
    CHECK((p.x - vec({2, 3})).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("infeasible start is rejected") {
  const auto lp = testing::simple2();
  CHECK(code_of([&] { solve_point(lp, vec({2, 2}), 1.0, Eigen::VectorXd::Zero(1)); }) == ErrorCode::InfeasibleStart);
  CHECK(code_of([&] { solve_point(lp, vec({1, 0}), 1.0, Eigen::VectorXd::Zero(1)); }) == ErrorCode::InfeasibleStart);
}

TEST_CASE("follow_path on simple2") {
  const auto lp = testing::simple2();
  const auto path = follow_path(lp, vec({0.5, 0.5}), uniform_grid(10.0, 1.0));
  REQUIRE(path.points.size() == 11);
  CHECK(path.cost_monotone);
  CHECK(path.points.front().x.dot(lp.c()) == doctest::Approx(1.5));
  for (std::size_t j = 1; j < path.points.size(); ++j)
    CHECK(path.points[j].x.dot(lp.c()) < path.points[j - 1].x.dot(lp.c()));
  CHECK(path.points.back().x.dot(lp.c()) - 1.0 < 1e-2);
  CHECK(path.max_feas_residual <= 1e-8 * 2);
}

TEST_CASE("single point grid") {
  const auto lp = testing::simple2();
  const auto path = follow_path(lp, vec({0.5, 0.5}), {0.0});
  REQUIRE(path.points.size() == 1);
  CHECK((path.points[0].x - vec({0.5, 0.5})).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("triangle path reaches the shortest path cost") {
  const auto lp = testing::triangle();
  const auto path = follow_path(lp, vec({1.0 / 3, 1.0 / 3, 2.0 / 3}), uniform_grid(20.0, 5.0));
  const double V = path.points.back().x.dot(lp.c());
  CHECK(V >= 2.0);
  CHECK(V <= 2.01);
  CHECK(path.cost_monotone);
}

TEST_CASE("path matches the flow") {
  const auto lp = testing::simple2();
  const auto s = vec({0.5, 0.5});
  const auto grid = uniform_grid(10.0, 0.25);
  const auto path = follow_path(lp, s, grid);
  flow::FlowConfig cfg;
  cfg.x0 = s;
  cfg.t_end = 10.0;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  const auto tr = flow::integrate(lp, compute_params(lp, DMode::Exact), cfg);
  CHECK(path_flow_deviation(path, tr) <= 1e-5);
}

TEST_CASE("bad grids") {
  const auto lp = testing::simple2();
  const auto s = vec({0.5, 0.5});
  CHECK(code_of([&] { follow_path(lp, s, {}); }) == ErrorCode::BadGrid);
  CHECK(code_of([&] { follow_path(lp, s, {1.0, 2.0}); }) == ErrorCode::BadGrid);
  CHECK(code_of([&] { follow_path(lp, s, {0.0, 2.0, 1.0}); }) == ErrorCode::BadGrid);
  CHECK(code_of([&] { uniform_grid(1.0, 0.0); }) == ErrorCode::BadGrid);
  CHECK(uniform_grid(1.0, 0.25).size() == 5);
}
