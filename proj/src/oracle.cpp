#include "physarum/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/LU>

#include "physarum/combinations.hpp"
#include "physarum/error.hpp"

namespace physarum::oracle {

namespace {

bool qualifies_for_exact(const ValidatedLP& lp) {
  return lp.m() <= kExactMaxRows && lp.A_int().cwiseAbs().maxCoeff() <= kExactEntryLimit &&
         lp.b_int().cwiseAbs().maxCoeff() <= kExactEntryLimit;
}

IntMatrix columns(const IntMatrix& M, const std::vector<Index>& cols) {
  IntMatrix out(M.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = M.col(cols[j]);
  return out;
}

// Basic feasible solutions of {x : M x = rhs, x >= 0} with M of full row rank k.
struct BasicSolutions {
  std::vector<Eigen::VectorXd> points;
  std::vector<exact::RationalVector> exact_points;
};

BasicSolutions basic_solutions(const IntMatrix& M, const IntVector& rhs, bool use_exact, double dedup_tol) {
  const Index k = M.rows();
  const Index n = M.cols();
  BasicSolutions out;
  for_each_combination(n, k, [&](const std::vector<Index>& basis) {
    const IntMatrix B = columns(M, basis);
    if (use_exact) {
      auto sol = exact::solve(B, rhs);
      if (!sol) return;
      if (std::any_of(sol->begin(), sol->end(), [](const exact::Rational& v) { return v < 0; })) return;
      exact::RationalVector full(static_cast<std::size_t>(n), exact::Rational(0));
      for (Index j = 0; j < k; ++j) full[static_cast<std::size_t>(basis[j])] = (*sol)[static_cast<std::size_t>(j)];
      if (std::find(out.exact_points.begin(), out.exact_points.end(), full) != out.exact_points.end()) return;
      Eigen::VectorXd dense(n);
      for (Index i = 0; i < n; ++i) dense(i) = exact::to_double(full[static_cast<std::size_t>(i)]);
      out.exact_points.push_back(std::move(full));
      out.points.push_back(std::move(dense));
    } else {
      if (exact::determinant(B) == 0) return;
      const Eigen::MatrixXd Bd = B.cast<double>();
      const Eigen::VectorXd xb = Bd.partialPivLu().solve(rhs.cast<double>());
      const double scale = 1.0 + xb.cwiseAbs().maxCoeff();
      if ((xb.array() < -1e-12 * scale).any()) return;
      Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
      for (Index j = 0; j < k; ++j) full(basis[j]) = std::max(0.0, xb(j));
      for (const auto& p : out.points) {
        if ((p - full).cwiseAbs().maxCoeff() <= dedup_tol) return;
      }
      out.points.push_back(std::move(full));
    }
  });
  return out;
}

}  // namespace

const Eigen::VectorXd& OracleResult::x_star() const {
  if (optimal_vertices.empty()) throw Error(ErrorCode::Infeasible, "no optimal vertex");
  return vertices[optimal_vertices.front()];
}

OracleResult enumerate(const ValidatedLP& lp, const OracleOptions& options) {
  const Index m = lp.m();
  const Index n = lp.n();
  if (n > options.max_cols) {
    throw Error(ErrorCode::TooLarge, "vertex enumeration capped at n = " + std::to_string(options.max_cols));
  }
  OracleResult r;
  r.exact = options.allow_exact && qualifies_for_exact(lp);

  auto vs = basic_solutions(lp.A_int(), lp.b_int(), r.exact, options.dedup_tol);
  r.vertices = std::move(vs.points);
  r.exact_vertices = std::move(vs.exact_points);

  // Rays: vertices of {r : A r = 0, 1'r = 1, r >= 0}. When 1' lies in the row space
  // of A that polytope is empty.
  IntMatrix Ar(m + 1, n);
  Ar.topRows(m) = lp.A_int();
  Ar.row(m).setOnes();
  if (m + 1 <= n && exact::rank(Ar) == m + 1) {
    IntVector e = IntVector::Zero(m + 1);
    e(m) = 1;
    auto rs = basic_solutions(Ar, e, r.exact, options.dedup_tol);
    r.rays = std::move(rs.points);
    r.exact_rays = std::move(rs.exact_points);
  }

  if (r.vertices.empty()) {
    r.status = OracleResult::Status::Infeasible;
    r.J.clear();
    r.N.resize(static_cast<std::size_t>(n));
    std::iota(r.N.begin(), r.N.end(), Index{0});
    return r;
  }
  r.status = OracleResult::Status::Optimal;

  const Eigen::VectorXd c = lp.c();
  std::vector<bool> in_j(static_cast<std::size_t>(n), false);
  auto mark_support = [&](const Eigen::VectorXd& v) {
    for (Index i = 0; i < n; ++i)
      if (v(i) != 0.0) in_j[static_cast<std::size_t>(i)] = true;
  };

  if (r.exact) {
    std::vector<exact::Rational> costs;
    for (const auto& v : r.exact_vertices) {
      exact::Rational s = 0;
      for (Index i = 0; i < n; ++i) s += v[static_cast<std::size_t>(i)] * lp.c_int()(i);
      costs.push_back(s);
    }
    const exact::Rational best = *std::min_element(costs.begin(), costs.end());
    r.exact_opt = best;
    r.opt = exact::to_double(best);
    for (std::size_t k = 0; k < costs.size(); ++k) {
      (costs[k] == best ? r.optimal_vertices : r.nonoptimal_vertices).push_back(k);
    }
  } else {
    std::vector<double> costs;
    for (const auto& v : r.vertices) costs.push_back(c.dot(v));
    r.opt = *std::min_element(costs.begin(), costs.end());
    const double tol = 1e-9 * (1.0 + std::abs(r.opt));
    for (std::size_t k = 0; k < costs.size(); ++k) {
      (costs[k] - r.opt <= tol ? r.optimal_vertices : r.nonoptimal_vertices).push_back(k);
    }
  }
  for (std::size_t k : r.optimal_vertices) mark_support(r.vertices[k]);
  // Rays of zero cost extend the optimal face; with c > 0 there are none.
  for (const auto& ray : r.rays) {
    if (c.dot(ray) == 0.0) mark_support(ray);
  }
  for (Index i = 0; i < n; ++i) (in_j[static_cast<std::size_t>(i)] ? r.J : r.N).push_back(i);
  return r;
}

Eigen::VectorXd interior_point(const OracleResult& result, std::optional<double> delta) {
  if (result.vertices.empty()) throw Error(ErrorCode::NoInteriorPoint, "feasible region has no vertex");
  const Index n = result.vertices.front().size();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  double min_pos = std::numeric_limits<double>::infinity();
  for (const auto& v : result.vertices) {
    s += v;
    for (Index i = 0; i < n; ++i)
      if (v(i) > 0.0) min_pos = std::min(min_pos, v(i));
  }
  s /= static_cast<double>(result.vertices.size());
  const double d = delta.value_or(std::isfinite(min_pos) ? 0.1 * min_pos : 0.1);
  for (const auto& ray : result.rays) s += d * ray;
  for (Index i = 0; i < n; ++i) {
    if (!(s(i) > 0.0)) {
      throw Error(ErrorCode::NoInteriorPoint, "coordinate " + std::to_string(i) + " vanishes on every vertex and ray");
    }
  }
  return s;
}

double max_subdeterminant(const IntMatrix& A, DMode mode, Index max_cols) {
  if (mode == DMode::Bound) return subdeterminant_bound(A);
  if (A.cols() > max_cols) throw Error(ErrorCode::ExactTooLarge, "exact D capped at n = " + std::to_string(max_cols));
  return exact::to_double(exact::max_subdeterminant(A));
}

StructureReport check_structure(const ValidatedLP& lp, const OracleResult& result, const exact::BigInt& D) {
  StructureReport rep;
  rep.exact = result.exact;
  const Index n = lp.n();
  const double Dd = exact::to_double(D);
  const std::int64_t b1 = lp.b_int().cwiseAbs().sum();
  rep.min_vertex_entry = std::numeric_limits<double>::infinity();
  rep.min_ray_entry = std::numeric_limits<double>::infinity();
  rep.min_cost_gap = std::numeric_limits<double>::infinity();

  // Basis structure: Av = b, v >= 0, support columns independent (hence |supp| <= m).
  for (const auto& v : result.vertices) {
    std::vector<Index> supp;
    for (Index i = 0; i < n; ++i)
      if (v(i) != 0.0) supp.push_back(i);
    const double resid = (lp.A() * v - lp.b()).cwiseAbs().maxCoeff();
    const bool independent = supp.empty() || exact::rank(columns(lp.A_int(), supp)) == static_cast<Index>(supp.size());
    if (resid > 1e-10 * (1.0 + lp.b().cwiseAbs().maxCoeff()) || (v.array() < 0.0).any() || !independent) {
      ++rep.basis_violations;
    }
  }

  if (result.exact) {
    const exact::Rational lo(exact::BigInt(1), D);
    const exact::Rational vhi = exact::Rational(D * b1);
    const exact::Rational rhi = exact::Rational(D);
    for (const auto& v : result.exact_vertices) {
      for (const auto& vi : v) {
        if (vi == 0) continue;
        rep.min_vertex_entry = std::min(rep.min_vertex_entry, exact::to_double(vi));
        if (vi < lo) ++rep.vertex_lower_violations;
        if (vi > vhi) ++rep.vertex_upper_violations;
      }
    }
    for (const auto& r : result.exact_rays) {
      for (const auto& ri : r) {
        if (ri == 0) continue;
        rep.min_ray_entry = std::min(rep.min_ray_entry, exact::to_double(ri));
        if (ri < lo) ++rep.ray_lower_violations;
        if (ri > rhi) ++rep.ray_upper_violations;
      }
    }
    if (result.exact_opt) {
      const exact::Rational gap_floor(exact::BigInt(1), D * D);
      for (std::size_t k : result.nonoptimal_vertices) {
        exact::Rational cost = 0;
        for (Index i = 0; i < n; ++i) cost += result.exact_vertices[k][static_cast<std::size_t>(i)] * lp.c_int()(i);
        const exact::Rational gap = cost - *result.exact_opt;
        rep.min_cost_gap = std::min(rep.min_cost_gap, exact::to_double(gap));
        if (gap < gap_floor) ++rep.cost_gap_violations;
      }
    }
    return rep;
  }

  const double tol = 1e-9;
  for (const auto& v : result.vertices) {
    for (Index i = 0; i < n; ++i) {
      if (v(i) == 0.0) continue;
      rep.min_vertex_entry = std::min(rep.min_vertex_entry, v(i));
      if (v(i) < 1.0 / Dd - tol) ++rep.vertex_lower_violations;
      if (v(i) > Dd * static_cast<double>(b1) * (1 + tol)) ++rep.vertex_upper_violations;
    }
  }
  for (const auto& r : result.rays) {
    for (Index i = 0; i < n; ++i) {
      if (r(i) == 0.0) continue;
      rep.min_ray_entry = std::min(rep.min_ray_entry, r(i));
      if (r(i) < 1.0 / Dd - tol) ++rep.ray_lower_violations;
      if (r(i) > Dd * (1 + tol)) ++rep.ray_upper_violations;
    }
  }
  const Eigen::VectorXd c = lp.c();
  for (std::size_t k : result.nonoptimal_vertices) {
    const double gap = c.dot(result.vertices[k]) - result.opt;
    rep.min_cost_gap = std::min(rep.min_cost_gap, gap);
    if (gap < 1.0 / (Dd * Dd) - tol) ++rep.cost_gap_violations;
  }
  return rep;
}

}  // namespace physarum::oracle
