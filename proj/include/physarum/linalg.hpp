#pragma once

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "physarum/error.hpp"
#include "physarum/types.hpp"

namespace physarum::linalg {

/// Relative pivot floor: a Cholesky pivot at or below kPivotTol * trace(L)/m is
/// treated as a loss of definiteness (W has collapsed toward the boundary).
inline constexpr double kPivotTol = 1e-12;

/// Cholesky factor of a symmetric positive-definite m x m matrix, e.g. L = A W A'.
/// Rows fixes m at compile time for the small systems of the solver loops.
template <typename Scalar, int Rows = Eigen::Dynamic>
class SpdFactorization {
 public:
  SpdFactorization() = default;
  explicit SpdFactorization(Index m) : llt_(m), matrix_(m, m) {}

  template <typename Derived>
  explicit SpdFactorization(const Eigen::MatrixBase<Derived>& L) {
    compute(L);
  }

  template <typename Derived>
  SpdFactorization& compute(const Eigen::MatrixBase<Derived>& L) {
    matrix_ = L;
    const Index m = matrix_.rows();
    if (m == 0 || matrix_.cols() != m) throw Error(ErrorCode::DimensionMismatch, "spd matrix must be square and nonempty");
    llt_.compute(matrix_);
    const Scalar floor = Scalar(kPivotTol) * matrix_.trace() / Scalar(m);
    if (llt_.info() != Eigen::Success || !(floor > Scalar(0))) {
      throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization failed");
    }
    const auto diag = llt_.matrixLLT().diagonal();
    for (Index i = 0; i < m; ++i) {
      if (!(diag(i) * diag(i) > floor)) {
        throw Error(ErrorCode::NotPositiveDefinite, "pivot below relative tolerance");
      }
    }
    return *this;
  }

  Index size() const { return matrix_.rows(); }

  /// Solve with one step of iterative refinement.
  template <typename Derived>
  Vector<Scalar, Rows> solve(const Eigen::MatrixBase<Derived>& rhs) const {
    Vector<Scalar, Rows> x = llt_.solve(rhs);
    Vector<Scalar, Rows> r = rhs - matrix_ * x;
    x += llt_.solve(r);
    return x;
  }

  /// Allocation-free variant of solve() for hot loops; work holds the residual.
  template <typename Derived>
  void solve_to(const Eigen::MatrixBase<Derived>& rhs, Vector<Scalar, Rows>& x, Vector<Scalar, Rows>& work) const {
    x = rhs;
    llt_.solveInPlace(x);
    work = rhs;
    work.noalias() -= matrix_ * x;
    llt_.solveInPlace(work);
    x += work;
  }

  Matrix<Scalar, Rows, Rows> reconstruct() const { return llt_.reconstructedMatrix(); }

  const Matrix<Scalar, Rows, Rows>& matrix() const { return matrix_; }

 private:
  Eigen::LLT<Matrix<Scalar, Rows, Rows>> llt_;
  Matrix<Scalar, Rows, Rows> matrix_;
};

template <typename DerivedL, typename DerivedR>
auto spd_solve(const Eigen::MatrixBase<DerivedL>& L, const Eigen::MatrixBase<DerivedR>& rhs) {
  using Scalar = typename DerivedL::Scalar;
  return SpdFactorization<Scalar>(L).solve(rhs);
}

/// Numerical row rank via column-pivoted QR of A'.
template <typename Derived>
Index row_rank(const Eigen::MatrixBase<Derived>& A) {
  using Scalar = typename Derived::Scalar;
  Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(A.transpose());
  return qr.rank();
}

/// Orthonormal basis of ker A as the trailing n - m columns of Q in A' P = Q R.
template <typename Derived>
Matrix<typename Derived::Scalar> kernel_basis(const Eigen::MatrixBase<Derived>& A) {
  using Scalar = typename Derived::Scalar;
  const Index m = A.rows();
  const Index n = A.cols();
  Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(A.transpose());
  if (qr.rank() < m) throw Error(ErrorCode::RankDeficient, "kernel_basis requires full row rank");
  Matrix<Scalar> Q = qr.householderQ() * Matrix<Scalar>::Identity(n, n);
  return Q.rightCols(n - m);
}

}  // namespace physarum::linalg
