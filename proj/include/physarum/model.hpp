#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>

#include "physarum/types.hpp"

namespace physarum {

/// min c'x  s.t.  Ax = b, x >= 0, with integer data and strictly positive costs.
struct LinearProgram {
  IntMatrix A;
  IntVector b;
  IntVector c;
  std::string name;
  std::optional<Eigen::VectorXd> start;
};

/// A LinearProgram that passed validate(): consistent shapes, c >= 1, rank(A) = m.
class ValidatedLP {
 public:
  const LinearProgram& problem() const noexcept { return lp_; }

  Index m() const noexcept { return lp_.A.rows(); }
  Index n() const noexcept { return lp_.A.cols(); }

  const IntMatrix& A_int() const noexcept { return lp_.A; }
  const IntVector& b_int() const noexcept { return lp_.b; }
  const IntVector& c_int() const noexcept { return lp_.c; }

  template <typename Scalar = double>
  decltype(auto) A() const {
    if constexpr (std::is_same_v<Scalar, double>) return (A_);
    else return lp_.A.template cast<Scalar>();
  }
  template <typename Scalar = double>
  decltype(auto) b() const {
    if constexpr (std::is_same_v<Scalar, double>) return (b_);
    else return lp_.b.template cast<Scalar>();
  }
  template <typename Scalar = double>
  decltype(auto) c() const {
    if constexpr (std::is_same_v<Scalar, double>) return (c_);
    else return lp_.c.template cast<Scalar>();
  }

  bool zero_demand() const noexcept { return lp_.b.isZero(); }

 private:
  friend ValidatedLP validate(LinearProgram lp);
  explicit ValidatedLP(LinearProgram lp);

  LinearProgram lp_;
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::VectorXd c_;
};

/// Throws Error{DimensionMismatch | NonPositiveCost | RankDeficient}. Feasibility is not checked.
ValidatedLP validate(LinearProgram lp);

enum class DMode { Exact, Bound };

/// Instance constants that drive step sizes and every quantitative bound.
struct Params {
  std::int64_t cost_sum = 0;  // C_s
  double D = 1.0;             // max |subdeterminant|, or an upper bound on it
  bool d_exact = false;
  double p_max = 0.0;  // C_s * D + 1
  double beta = 0.0;   // D^2 * n * |b|_1
  Index m = 0;
  Index n = 0;
};

inline constexpr Index kExactSubdeterminantMaxCols = 14;

/// Hadamard-type bound max_k (sqrt(k) * max|A_ij|)^k over k = 1..m.
double subdeterminant_bound(const IntMatrix& A);

/// Exact mode enumerates every square submatrix and throws ExactTooLarge above max_cols.
Params compute_params(const ValidatedLP& lp, DMode mode, Index max_cols = kExactSubdeterminantMaxCols);

}  // namespace physarum
