#include "physarum/model.hpp"

#include <cmath>

#include "physarum/error.hpp"
#include "physarum/exact.hpp"

namespace physarum {

ValidatedLP::ValidatedLP(LinearProgram lp)
    : lp_(std::move(lp)),
      A_(lp_.A.cast<double>()),
      b_(lp_.b.cast<double>()),
      c_(lp_.c.cast<double>()) {}

ValidatedLP validate(LinearProgram lp) {
  const Index m = lp.A.rows();
  const Index n = lp.A.cols();
  if (m < 1 || n < 1) throw Error(ErrorCode::DimensionMismatch, "A must have at least one row and one column");
  if (m > n) throw Error(ErrorCode::DimensionMismatch, "A has more rows than columns");
  if (lp.b.size() != m) throw Error(ErrorCode::DimensionMismatch, "b has length " + std::to_string(lp.b.size()) + ", expected " + std::to_string(m));
  if (lp.c.size() != n) throw Error(ErrorCode::DimensionMismatch, "c has length " + std::to_string(lp.c.size()) + ", expected " + std::to_string(n));
  if (lp.start && lp.start->size() != n) throw Error(ErrorCode::DimensionMismatch, "start has wrong length");
  for (Index i = 0; i < n; ++i) {
    if (lp.c(i) < 1) throw Error(ErrorCode::NonPositiveCost, "c[" + std::to_string(i) + "] = " + std::to_string(lp.c(i)));
  }
  const Index r = exact::rank(lp.A);
  if (r < m) throw Error(ErrorCode::RankDeficient, "rank(A) = " + std::to_string(r) + " < m = " + std::to_string(m));
  return ValidatedLP(std::move(lp));
}

double subdeterminant_bound(const IntMatrix& A) {
  const double amax = static_cast<double>(A.cwiseAbs().maxCoeff());
  double best = 1.0;
  for (Index k = 1; k <= std::min(A.rows(), A.cols()); ++k) {
    best = std::max(best, std::pow(std::sqrt(static_cast<double>(k)) * amax, static_cast<double>(k)));
  }
  return best;
}

Params compute_params(const ValidatedLP& lp, DMode mode, Index max_cols) {
  Params p;
  p.m = lp.m();
  p.n = lp.n();
  p.cost_sum = lp.c_int().sum();
  if (mode == DMode::Exact) {
    if (lp.n() > max_cols) {
      throw Error(ErrorCode::ExactTooLarge, "exact D requested for n = " + std::to_string(lp.n()) + " > " + std::to_string(max_cols));
    }
    p.D = exact::to_double(exact::max_subdeterminant(lp.A_int()));
    p.d_exact = true;
  } else {
    p.D = subdeterminant_bound(lp.A_int());
    p.d_exact = false;
  }
  p.p_max = static_cast<double>(p.cost_sum) * p.D + 1.0;
  const double b1 = static_cast<double>(lp.b_int().cwiseAbs().sum());
  p.beta = p.D * p.D * static_cast<double>(p.n) * b1;
  return p;
}

}  // namespace physarum
