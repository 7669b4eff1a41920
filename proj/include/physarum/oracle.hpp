#pragma once

#include <optional>
#include <vector>

#include "physarum/exact.hpp"
#include "physarum/model.hpp"

namespace physarum::oracle {

/// Ground truth at desk scale: basic feasible solutions and normalized extreme rays.
struct OracleResult {
  enum class Status { Optimal, Infeasible };

  Status status = Status::Infeasible;
  std::vector<Eigen::VectorXd> vertices;  // V
  std::vector<Eigen::VectorXd> rays;      // R, each with sum 1
  // Exact coordinates, populated when the instance qualifies for rational arithmetic.
  bool exact = false;
  std::vector<exact::RationalVector> exact_vertices;
  std::vector<exact::RationalVector> exact_rays;

  double opt = 0.0;
  std::optional<exact::Rational> exact_opt;
  std::vector<std::size_t> optimal_vertices;     // indices into vertices (V_O)
  std::vector<std::size_t> nonoptimal_vertices;  // V_N
  std::vector<Index> J;                          // union of optimal supports
  std::vector<Index> N;                          // complement of J

  bool feasible() const { return status == Status::Optimal; }
  /// First optimal vertex; the x* used by the potential-function certificate.
  const Eigen::VectorXd& x_star() const;
};

struct OracleOptions {
  Index max_cols = 16;
  bool allow_exact = true;
  double dedup_tol = 1e-9;
};

inline constexpr std::int64_t kExactEntryLimit = std::int64_t{1} << 15;
inline constexpr Index kExactMaxRows = 8;

/// Throws TooLarge when n exceeds options.max_cols.
OracleResult enumerate(const ValidatedLP& lp, const OracleOptions& options = {});

/// mean(V) + delta * sum(R); throws NoInteriorPoint when some coordinate is zero on
/// every vertex and every ray. delta defaults to 0.1 * (smallest positive vertex entry).
Eigen::VectorXd interior_point(const OracleResult& result, std::optional<double> delta = {});

/// Exact enumeration (throws ExactTooLarge above max_cols) or the Hadamard bound.
double max_subdeterminant(const IntMatrix& A, DMode mode, Index max_cols = kExactSubdeterminantMaxCols);

/// Checks of the vertex/ray entry bounds and the cost gap between optimal and
/// non-optimal vertices. Exact comparisons when the result carries rationals.
struct StructureReport {
  bool exact = false;
  std::size_t vertex_lower_violations = 0;  // nonzero v_i < 1/D
  std::size_t vertex_upper_violations = 0;  // v_i > D |b|_1
  std::size_t ray_lower_violations = 0;     // nonzero r_i < 1/D
  std::size_t ray_upper_violations = 0;     // r_i > D
  std::size_t cost_gap_violations = 0;      // c'v - opt < 1/D^2 for v in V_N
  std::size_t basis_violations = 0;         // Av != b, v < 0, or support not independent
  double min_vertex_entry = 0.0;
  double min_ray_entry = 0.0;
  double min_cost_gap = 0.0;

  bool vertices_ok() const { return vertex_lower_violations == 0 && vertex_upper_violations == 0 && basis_violations == 0; }
  bool rays_ok() const { return ray_lower_violations == 0 && ray_upper_violations == 0; }
  bool cost_gap_ok() const { return cost_gap_violations == 0; }
};

StructureReport check_structure(const ValidatedLP& lp, const OracleResult& result, const exact::BigInt& D);

}  // namespace physarum::oracle
