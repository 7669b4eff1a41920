#include <doctest.h>

#include <random>

#include "physarum/error.hpp"
#include "physarum/linalg.hpp"

using namespace physarum;
using namespace physarum::linalg;

TEST_CASE("scalar spd solve") {
  Eigen::MatrixXd L(1, 1);
  L << 0.75;
  Eigen::VectorXd rhs(1);
  rhs << 1.0;
  CHECK(spd_solve(L, rhs)(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("identity spd solve") {
  Eigen::VectorXd rhs(2);
  rhs << 2.0, 3.0;
  const Eigen::VectorXd p = spd_solve(Eigen::MatrixXd::Identity(2, 2), rhs);
  CHECK(p(0) == 2.0);
  CHECK(p(1) == 3.0);
}

TEST_CASE("2x2 spd solve") {
  Eigen::MatrixXd L(2, 2);
  L << 2, 1, 1, 2;
  Eigen::VectorXd rhs(2);
  rhs << 3, 3;
  const Eigen::VectorXd p = spd_solve(L, rhs);
  CHECK(p(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fixed-size factorization agrees with dynamic") {
  Eigen::Matrix3d L;
  L << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const Eigen::Vector3d rhs(1, 2, 3);
  SpdFactorization<double, 3> fixed(L);
  SpdFactorization<double> dyn{Eigen::MatrixXd(L)};
  Eigen::Vector3d x, work;
  fixed.solve_to(rhs, x, work);
  CHECK((x - dyn.solve(Eigen::VectorXd(rhs))).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((L * x - rhs).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("indefinite and singular inputs are rejected") {
  Eigen::MatrixXd L(2, 2);
  L << 1, 2, 2, 1;
  CHECK_THROWS_AS(SpdFactorization<double>{L}, Error);
  L << 1, 1, 1, 1;
  try {
    SpdFactorization<double> f(L);
    FAIL("singular matrix accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
  // Pivot far below trace / m counts as a collapse.
  L << 1, 0, 0, 1e-14;
  CHECK_THROWS_AS(SpdFactorization<double>{L}, Error);
}

TEST_CASE("random spd: solve and reconstruct") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int t = 0; t < 50; ++t) {
    const Index m = 1 + t % 20;
    Eigen::MatrixXd B(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) B(i, j) = g(rng);
    const Eigen::MatrixXd L = B * B.transpose() + Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs(m);
    for (Index i = 0; i < m; ++i) rhs(i) = g(rng);
    SpdFactorization<double> f(L);
    const Eigen::VectorXd p = f.solve(rhs);
    const double L_inf = L.cwiseAbs().rowwise().sum().maxCoeff();
    CHECK((L * p - rhs).cwiseAbs().maxCoeff() <=
          1e-8 * (L_inf * p.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff()));
    CHECK((f.reconstruct() - L).cwiseAbs().maxCoeff() <= 1e-10 * L.cwiseAbs().maxCoeff());
    const Eigen::VectorXd back = f.solve(L * rhs);
    CHECK((back - rhs).cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + rhs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("long double instantiation") {
  Matrix<long double> L(2, 2);
  L << 2, 1, 1, 2;
  Vector<long double> rhs(2);
  rhs << 3, 3;
  const Vector<long double> p = SpdFactorization<long double>(L).solve(rhs);
  CHECK(static_cast<double>(std::abs(p(0) - 1.0L)) <= 1e-18);
}

TEST_CASE("kernel of a single row") {
  Eigen::MatrixXd A(1, 2);
  A << 1, 1;
  const Eigen::MatrixXd K = kernel_basis(A);
  REQUIRE(K.cols() == 1);
  CHECK(std::abs(std::abs(K(0, 0)) - 1.0 / std::sqrt(2.0)) <= 1e-15);
  CHECK(K(0, 0) == doctest::Approx(-K(1, 0)));
}

TEST_CASE("kernel of the identity is empty") {
  CHECK(kernel_basis(Eigen::MatrixXd::Identity(2, 2)).cols() == 0);
}

TEST_CASE("coordinate kernel") {
  Eigen::MatrixXd A(1, 3);
  A << 1, 0, 0;
  const Eigen::MatrixXd K = kernel_basis(A);
  REQUIRE(K.cols() == 2);
  CHECK(K.row(0).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((K.transpose() * K - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("random kernels are orthonormal and annihilated") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> e(-3, 3);
  for (int t = 0; t < 100; ++t) {
    const Index m = 1 + t % 3;
    const Index n = m + 1 + t % 4;
    Eigen::MatrixXd A(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) A(i, j) = e(rng);
    if (row_rank(A) < m) {
      CHECK_THROWS_AS(kernel_basis(A), Error);
      continue;
    }
    const Eigen::MatrixXd K = kernel_basis(A);
    REQUIRE(K.cols() == n - m);
    CHECK((K.transpose() * K - Eigen::MatrixXd::Identity(n - m, n - m)).cwiseAbs().maxCoeff() <= 1e-12);
    const double A_inf = A.cwiseAbs().rowwise().sum().maxCoeff();
    CHECK((A * K).cwiseAbs().maxCoeff() <= 1e-10 * A_inf);
  }
}

TEST_CASE("row rank") {
  Eigen::MatrixXd A(2, 3);
  A << 1, 2, 3, 2, 4, 6;
  CHECK(row_rank(A) == 1);
  try {
    kernel_basis(A);
    FAIL("rank deficient kernel accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}
