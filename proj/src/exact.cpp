#include "physarum/exact.hpp"

#include "physarum/combinations.hpp"

#include <algorithm>
#include <utility>

namespace physarum::exact {

namespace {

using BigMatrix = std::vector<std::vector<BigInt>>;

BigMatrix to_big(const IntMatrix& M) {
  BigMatrix out(static_cast<std::size_t>(M.rows()), std::vector<BigInt>(static_cast<std::size_t>(M.cols())));
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) out[i][j] = M(i, j);
  return out;
}

// In-place Bareiss elimination with row pivoting over all columns.
// Returns the rank; `sign` tracks row swaps, `last_pivot` the final leading minor.
Index bareiss(BigMatrix& a, std::size_t cols, int& sign, BigInt& last_pivot) {
  const std::size_t rows = a.size();
  sign = 1;
  BigInt prev = 1;
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows; ++col) {
    std::size_t piv = r;
    while (piv < rows && a[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    if (piv != r) {
      std::swap(a[piv], a[r]);
      sign = -sign;
    }
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        a[i][j] = (a[r][col] * a[i][j] - a[i][col] * a[r][j]) / prev;
      }
      a[i][col] = 0;
    }
    prev = a[r][col];
    ++r;
  }
  last_pivot = prev;
  return static_cast<Index>(r);
}

}  // namespace

BigInt determinant(const IntMatrix& M) {
  if (M.rows() != M.cols()) return 0;
  if (M.rows() == 0) return 1;
  BigMatrix a = to_big(M);
  int sign = 1;
  BigInt last;
  const Index r = bareiss(a, static_cast<std::size_t>(M.cols()), sign, last);
  if (r < M.rows()) return 0;
  return sign * last;
}

Index rank(const IntMatrix& M) {
  if (M.size() == 0) return 0;
  BigMatrix a = to_big(M);
  int sign = 1;
  BigInt last;
  return bareiss(a, static_cast<std::size_t>(M.cols()), sign, last);
}

std::optional<RationalVector> solve(const IntMatrix& B, const IntVector& rhs) {
  const auto k = static_cast<std::size_t>(B.rows());
  std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k + 1));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = B(static_cast<Index>(i), static_cast<Index>(j));
    a[i][k] = rhs(static_cast<Index>(i));
  }
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    while (piv < k && a[piv][col] == 0) ++piv;
    if (piv == k) return std::nullopt;
    std::swap(a[piv], a[col]);
    for (std::size_t i = 0; i < k; ++i) {
      if (i == col || a[i][col] == 0) continue;
      const Rational f = a[i][col] / a[col][col];
      for (std::size_t j = col; j <= k; ++j) a[i][j] -= f * a[col][j];
    }
  }
  RationalVector x(k);
  for (std::size_t i = 0; i < k; ++i) x[i] = a[i][k] / a[i][i];
  return x;
}

BigInt max_subdeterminant(const IntMatrix& A) {
  BigInt best = 0;
  for (Index k = 1; k <= std::min(A.rows(), A.cols()); ++k) {
    IntMatrix sub(k, k);
    for_each_combination(A.rows(), k, [&](const std::vector<Index>& rows) {
      for_each_combination(A.cols(), k, [&](const std::vector<Index>& cols) {
        for (Index i = 0; i < k; ++i)
          for (Index j = 0; j < k; ++j) sub(i, j) = A(rows[i], cols[j]);
        BigInt d = abs(determinant(sub));
        if (d > best) best = std::move(d);
      });
    });
  }
  return best;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

double to_double(const BigInt& z) { return z.convert_to<double>(); }

}  // namespace physarum::exact
