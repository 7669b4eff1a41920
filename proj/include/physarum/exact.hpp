#pragma once

#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "physarum/types.hpp"

namespace physarum::exact {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;

/// Determinant of a square integer matrix by fraction-free (Bareiss) elimination.
BigInt determinant(const IntMatrix& M);

/// Exact row rank.
Index rank(const IntMatrix& M);

/// Solves the square system B x = rhs over the rationals; nullopt when B is singular.
std::optional<RationalVector> solve(const IntMatrix& B, const IntVector& rhs);

/// Maximum |det| over all square submatrices of A, by enumeration.
BigInt max_subdeterminant(const IntMatrix& A);

double to_double(const Rational& r);
double to_double(const BigInt& z);

}  // namespace physarum::exact
