#pragma once

#include <cmath>
#include <string>

#include "linalg.hpp"

namespace lisr {

/* Family parameter for the symmetric Broyden class.  DFP is the tau = 1
   member, SR1 the tau = 0 member, and BFGS corresponds to the data-dependent
   value tau = u'Au / u'Gu resolved at update time. */
class BroydenParam {
 public:
  static BroydenParam numeric(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0))
      throw std::invalid_argument("broyden parameter must lie in [0, 1]");
    return BroydenParam(Kind::Numeric, tau);
  }
  static BroydenParam dfp() { return BroydenParam(Kind::Numeric, 1.0); }
  static BroydenParam sr1() { return BroydenParam(Kind::Numeric, 0.0); }
  static BroydenParam bfgs() { return BroydenParam(Kind::Bfgs, 0.0); }

  /* tau actually used for a concrete (G, A, u) triple. */
  double resolve(double uAu, double uGu) const {
    if (kind_ == Kind::Bfgs) return uAu / uGu;
    return tau_;
  }

 private:
  enum class Kind { Numeric, Bfgs };
  BroydenParam(Kind k, double t) : kind_(k), tau_(t) {}
  Kind kind_;
  double tau_;
};

namespace detail {

/* Relative fixed-point and denominator guards share this scale. */
inline double gap_scale(const Matrix& gap) { return gap.norm(); }

}  // namespace detail

/* One member of the symmetric Broyden family applied to estimator G with
   target Hessian A along direction u:

     tau * [ G - (A u u'G + G u u'A)/u'Au + (u'Gu/u'Au + 1) A u u'A / u'Au ]
   + (1 - tau) * [ G - (G-A) u u'(G-A) / u'(G-A)u ].

   Returns G unchanged when u is already a fixed-point direction, i.e.
   ||(G-A)u|| <= 1e-12 ||G-A|| ||u||, and likewise when the SR1 denominator
   is degenerate. */
inline SymMatrix broyden_update(const SymMatrix& G, const SymMatrix& A, const Vector& u,
                                const BroydenParam& param) {
  if (u.size() != G.dim() || A.dim() != G.dim())
    throw std::invalid_argument("broyden_update: size mismatch");
  const double unorm = u.norm();
  if (unorm == 0.0) throw ZeroDirection("broyden_update: zero direction");

  const Matrix gap = G.mat() - A.mat();
  const Vector gap_u = gap * u;
  const double scale = detail::gap_scale(gap);
  if (gap_u.norm() <= 1e-12 * scale * unorm) return G;

  const Vector Au = A.mat() * u;
  const Vector Gu = G.mat() * u;
  const double uAu = u.dot(Au);
  const double uGu = u.dot(Gu);
  if (uAu <= 0.0) throw std::invalid_argument("broyden_update: A is not positive definite along u");
  const double tau = param.resolve(uAu, uGu);

  Matrix result = Matrix::Zero(G.dim(), G.dim());
  if (tau > 0.0) {
    Matrix dfp = G.mat() - (Au * Gu.transpose() + Gu * Au.transpose()) / uAu +
                 (uGu / uAu + 1.0) * (Au * Au.transpose()) / uAu;
    result += tau * dfp;
  }
  if (tau < 1.0) {
    const double den = u.dot(gap_u);
    if (std::abs(den) <= 1e-12 * scale * unorm * unorm) return G;
    Matrix sr1 = G.mat() - (gap_u * gap_u.transpose()) / den;
    result += (1.0 - tau) * sr1;
  }
  return SymMatrix(result);
}

/* Symmetric rank-1 update toward A along u.  Returns G when the curvature
   denominator u'(G-A)u is below 1e-12 ||G-A|| ||u||^2. */
inline SymMatrix sr1_update(const SymMatrix& G, const SymMatrix& A, const Vector& u) {
  if (u.size() != G.dim() || A.dim() != G.dim())
    throw std::invalid_argument("sr1_update: size mismatch");
  const double unorm = u.norm();
  if (unorm == 0.0) throw ZeroDirection("sr1_update: zero direction");

  const Matrix gap = G.mat() - A.mat();
  const Vector v = gap * u;
  const double den = u.dot(v);
  if (std::abs(den) <= 1e-12 * detail::gap_scale(gap) * unorm * unorm) return G;
  return SymMatrix(G.mat() - (v * v.transpose()) / den);
}

/* Block symmetric rank-k update toward A along the direction block U:

     G - (G-A) U [U'(G-A)U]^+ U'(G-A).

   The bracketed k x k matrix is inverted through an eigenvalue pseudoinverse
   with relative cutoff 1e-12, so directions on which G already matches A
   drop out instead of poisoning the correction.  Returns G when GU = AU
   within tolerance. */
inline SymMatrix srk_update(const SymMatrix& G, const SymMatrix& A, const DirectionSet& U) {
  if (U.dim() != G.dim() || A.dim() != G.dim())
    throw std::invalid_argument("srk_update: size mismatch");
  if (!U.basis_indices()) {
    Eigen::ColPivHouseholderQR<Matrix> qr(U.columns());
    if (qr.rank() < U.count())
      throw RankDeficientDirections("srk_update: directions are not full column rank");
  }

  const Matrix gap = G.mat() - A.mat();
  const Matrix V = gap * U.columns();
  if (V.norm() <= 1e-12 * detail::gap_scale(gap) * U.columns().norm()) return G;

  const Matrix mid = U.columns().transpose() * V;
  const detail::SymPinv pinv = detail::sym_pinv(mid);
  if (pinv.kept_values.size() == 0) return G;
  return SymMatrix(G.mat() - V * pinv.pinv * V.transpose());
}

/* Greedy direction for a rank-1 step: the standard basis vector of the
   largest diagonal entry of G - A, ties to the lower index.  `exhausted`
   reports that every diagonal gap is at most 1e-12, i.e. there is nothing
   left for a diagonal greedy step to correct. */
struct GreedyDirection {
  Vector u;
  int index;
  bool exhausted;
};

inline GreedyDirection greedy_direction(const SymMatrix& G, const SymMatrix& A) {
  if (A.dim() != G.dim()) throw std::invalid_argument("greedy_direction: size mismatch");
  const Vector diag = G.diagonal() - A.diagonal();
  int best = 0;
  for (int i = 1; i < diag.size(); ++i)
    if (diag[i] > diag[best]) best = i;

  GreedyDirection out;
  out.exhausted = diag[best] <= 1e-12;
  out.index = out.exhausted ? 0 : best;
  out.u = Vector::Zero(G.dim());
  out.u[out.index] = 1.0;
  return out;
}

/* Greedy direction block for a rank-k step: basis vectors of the k largest
   diagonal entries of G - A. */
inline DirectionSet greedy_directions_k(const SymMatrix& G, const SymMatrix& A, int k) {
  if (A.dim() != G.dim()) throw std::invalid_argument("greedy_directions_k: size mismatch");
  return top_k_diagonal(SymMatrix(G.mat() - A.mat()), k);
}

/* Trace gap tr(G) - tr(A); contracts by (1 - k/d) per greedy rank-k step. */
inline double tau_measure(const SymMatrix& G, const SymMatrix& A) {
  if (A.dim() != G.dim()) throw std::invalid_argument("tau_measure: size mismatch");
  return G.trace() - A.trace();
}

/* Condition-scaled relative trace gap d * (L/mu) * (tr G - tr A) / tr A. */
inline double nu_measure(const SymMatrix& G, const SymMatrix& A, double mu, double L) {
  if (A.dim() != G.dim()) throw std::invalid_argument("nu_measure: size mismatch");
  if (!(mu > 0.0) || !(L > 0.0)) throw std::invalid_argument("nu_measure: constants must be positive");
  const double trA = A.trace();
  if (!(trA > 0.0)) throw std::invalid_argument("nu_measure: tr(A) must be positive");
  return static_cast<double>(A.dim()) * (L / mu) * (G.trace() - trA) / trA;
}

}  // namespace lisr
