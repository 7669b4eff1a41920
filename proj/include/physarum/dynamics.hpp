#pragma once

#include <cmath>
#include <optional>

#include "physarum/error.hpp"
#include "physarum/linalg.hpp"
#include "physarum/model.hpp"

namespace physarum {

/// Every per-point quantity of the dynamics x' = q - x at a state x > 0.
template <typename Scalar>
struct DynamicsEval {
  Vector<Scalar> x;
  Vector<Scalar> w;    // x_i / c_i
  Vector<Scalar> p;    // potentials, (A W A') p = b
  Vector<Scalar> atp;  // A' p
  Vector<Scalar> q;    // flux W A' p
  Vector<Scalar> P;    // q - x
  Vector<Scalar> P_f;  // feasibility direction
  Vector<Scalar> P_o;  // optimization direction
  Scalar energy{};     // b'p
  Scalar cost{};       // c'x
  Scalar atp_inf{};    // |A'p|_inf
};

template <typename Derived>
bool strictly_positive(const Eigen::MatrixBase<Derived>& x) {
  for (Index i = 0; i < x.size(); ++i) {
    if (!(x(i) > 0) || !std::isfinite(static_cast<double>(x(i)))) return false;
  }
  return true;
}

/// Workspace for repeated flux computations on one instance. Only computes
/// w, L, p, A'p and q; the solver loops use this directly. Rows and Cols may fix
/// m and n at compile time.
template <typename Scalar, int Rows = Eigen::Dynamic, int Cols = Eigen::Dynamic>
class Evaluator {
 public:
  explicit Evaluator(const ValidatedLP& lp)
      : A_(lp.A<Scalar>()), b_(lp.b<Scalar>()), c_(lp.c<Scalar>()), AW_(lp.m(), lp.n()), L_(lp.m(), lp.m()) {}

  template <typename Derived>
  void flux(const Eigen::MatrixBase<Derived>& x) {
    if (!strictly_positive(x)) throw Error(ErrorCode::NonPositiveState, "state must be strictly positive");
    w_ = x.template cast<Scalar>().cwiseQuotient(c_);
    AW_.noalias() = A_ * w_.asDiagonal();
    L_.noalias() = AW_.lazyProduct(A_.transpose());
    chol_.compute(L_);
    chol_.solve_to(b_, p_, work_);
    atp_.noalias() = A_.transpose() * p_;
    q_ = w_.cwiseProduct(atp_);
  }

  const Vector<Scalar, Cols>& w() const { return w_; }
  const Vector<Scalar, Rows>& p() const { return p_; }
  const Vector<Scalar, Cols>& atp() const { return atp_; }
  const Vector<Scalar, Cols>& q() const { return q_; }
  Scalar energy() const { return b_.dot(p_); }
  const linalg::SpdFactorization<Scalar, Rows>& factorization() const { return chol_; }

  const Matrix<Scalar, Rows, Cols>& A() const { return A_; }
  const Vector<Scalar, Rows>& b() const { return b_; }
  const Vector<Scalar, Cols>& c() const { return c_; }

 private:
  Matrix<Scalar, Rows, Cols> A_;
  Vector<Scalar, Rows> b_;
  Vector<Scalar, Cols> c_;
  Matrix<Scalar, Rows, Cols> AW_;
  Matrix<Scalar, Rows, Rows> L_;
  linalg::SpdFactorization<Scalar, Rows> chol_;
  Vector<Scalar, Cols> w_, atp_, q_;
  Vector<Scalar, Rows> p_, work_;
};

template <typename Scalar = double, typename Derived>
DynamicsEval<Scalar> evaluate(const ValidatedLP& lp, const Eigen::MatrixBase<Derived>& x) {
  Evaluator<Scalar> ev(lp);
  ev.flux(x);
  DynamicsEval<Scalar> out;
  out.x = x.template cast<Scalar>();
  out.w = ev.w();
  out.p = ev.p();
  out.atp = ev.atp();
  out.q = ev.q();
  out.P = out.q - out.x;
  const Vector<Scalar> infeasibility = ev.b() - ev.A() * out.x;
  out.P_f = out.w.cwiseProduct(ev.A().transpose() * ev.factorization().solve(infeasibility));
  const Vector<Scalar> ax = ev.A() * out.x;
  out.P_o = out.w.cwiseProduct(ev.A().transpose() * ev.factorization().solve(ax) - ev.c());
  out.energy = ev.energy();
  out.cost = ev.c().dot(out.x);
  out.atp_inf = out.atp.cwiseAbs().maxCoeff();
  return out;
}

/// q' W^{-1} q, the second route to the energy.
template <typename Scalar>
Scalar energy_by_flux(const DynamicsEval<Scalar>& e) {
  return e.q.cwiseAbs2().cwiseQuotient(e.w).sum();
}

/// |sum_i y_i a_i'p - b'p| for any y with Ay = b.
template <typename Scalar, typename Derived>
Scalar energy_identity_residual(const DynamicsEval<Scalar>& e, const Eigen::MatrixBase<Derived>& y) {
  using std::abs;
  return abs(y.template cast<Scalar>().dot(e.atp) - e.energy);
}

/// Riemannian inner product <u, v>_x = u' diag(c/x) v.
template <typename DX, typename DC, typename DU, typename DV>
auto metric_inner(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DC>& c,
                  const Eigen::MatrixBase<DU>& u, const Eigen::MatrixBase<DV>& v) {
  return (u.cwiseProduct(c).cwiseQuotient(x)).dot(v);
}

/// F(x) = 2 sqrt(C x), the isometry onto the Euclidean y-space.
template <typename DX, typename DC>
auto embed(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DC>& c) {
  using Scalar = typename DX::Scalar;
  if (!strictly_positive(x)) throw Error(ErrorCode::NonPositiveState, "embed requires x > 0");
  Vector<Scalar> y = (c.template cast<Scalar>().cwiseProduct(x)).cwiseSqrt() * Scalar(2);
  return y;
}

/// Jacobian of F applied to a tangent vector: (C X^{-1})^{1/2} u.
template <typename DX, typename DC, typename DU>
auto embed_jacobian_apply(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DC>& c,
                          const Eigen::MatrixBase<DU>& u) {
  using Scalar = typename DX::Scalar;
  Vector<Scalar> out = c.template cast<Scalar>().cwiseQuotient(x).cwiseSqrt().cwiseProduct(u);
  return out;
}

/// |c'h + h' H(x) P(x)| with H(x) = diag(c/x). Since H P = A'p - c, this equals |(Ah)'p|,
/// zero up to rounding for every h in ker A: P is the descent direction of c'x in the metric.
template <typename Scalar, typename Derived>
Scalar gradient_identity_residual(const ValidatedLP& lp, const DynamicsEval<Scalar>& e,
                                  const Eigen::MatrixBase<Derived>& h) {
  using std::abs;
  const Matrix<Scalar> A = lp.A<Scalar>();
  const Vector<Scalar> hs = h.template cast<Scalar>();
  const Scalar h_inf = hs.size() ? hs.cwiseAbs().maxCoeff() : Scalar(0);
  const Scalar a_norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  const Scalar ah = (A * hs).cwiseAbs().maxCoeff();
  if (ah > Scalar(1e-10) * a_norm * h_inf) throw Error(ErrorCode::NotInKernel, "h is not in ker A");
  const Vector<Scalar> c = lp.c<Scalar>();
  return abs(c.dot(hs) + metric_inner(e.x, c, hs, e.P));
}

template <typename Scalar>
struct BoundReport {
  Scalar q_inf{};
  Scalar q_bound{};  // beta = D^2 n |b|_1
  bool q_bound_ok = false;
  Scalar atp_inf{};
  Scalar atp_bound{};               // D * C_s
  std::optional<bool> atp_bound_ok;  // asserted only at feasible points
};

inline constexpr double kBoundSlack = 1e-8;

template <typename Scalar>
BoundReport<Scalar> check_bounds(const DynamicsEval<Scalar>& e, const Params& params, bool feasible) {
  BoundReport<Scalar> r;
  r.q_inf = e.q.cwiseAbs().maxCoeff();
  r.q_bound = Scalar(params.beta);
  r.q_bound_ok = r.q_inf <= r.q_bound * Scalar(1 + kBoundSlack);
  r.atp_inf = e.atp_inf;
  r.atp_bound = Scalar(params.D * static_cast<double>(params.cost_sum));
  if (feasible) r.atp_bound_ok = r.atp_inf <= r.atp_bound * Scalar(1 + kBoundSlack);
  return r;
}

/// max_i w_i |A' L^{-1} a_i|_inf; bounded by D for every w > 0.
template <typename Scalar = double, typename Derived>
Scalar key_bound_ratio(const ValidatedLP& lp, const Eigen::MatrixBase<Derived>& w) {
  const Matrix<Scalar> A = lp.A<Scalar>();
  const Vector<Scalar> ws = w.template cast<Scalar>();
  if (!strictly_positive(ws)) throw Error(ErrorCode::NonPositiveState, "weights must be positive");
  const Matrix<Scalar> L = A * ws.asDiagonal() * A.transpose();
  linalg::SpdFactorization<Scalar> chol(L);
  Scalar worst(0);
  for (Index i = 0; i < lp.n(); ++i) {
    const Vector<Scalar> col = A.transpose() * chol.solve(A.col(i));
    worst = std::max(worst, ws(i) * col.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace physarum
