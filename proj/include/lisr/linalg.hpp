#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace lisr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/* Dense symmetric matrix.  Construction mirrors the strict lower triangle
   from the average of the two halves, so stored matrices satisfy
   m(i,j) == m(j,i) exactly; every operation here preserves that. */
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(const Matrix& raw) : m_(raw.rows(), raw.cols()) {
    const int d = static_cast<int>(raw.rows());
    for (int i = 0; i < d; ++i) {
      m_(i, i) = raw(i, i);
      for (int j = 0; j < i; ++j) {
        const double v = 0.5 * (raw(i, j) + raw(j, i));
        m_(i, j) = v;
        m_(j, i) = v;
      }
    }
  }

  static SymMatrix identity(int d) { return SymMatrix(Matrix::Identity(d, d)); }

  static SymMatrix from_diagonal(const Vector& diag) {
    Matrix m = Matrix::Zero(diag.size(), diag.size());
    m.diagonal() = diag;
    return SymMatrix(m);
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  Vector diagonal() const { return m_.diagonal(); }
  double trace() const { return m_.trace(); }

  Vector apply(const Vector& v) const { return m_ * v; }

  /* Entrywise ops preserve exact symmetry, no re-mirroring needed. */
  SymMatrix scaled(double s) const {
    SymMatrix r;
    r.m_ = s * m_;
    return r;
  }
  SymMatrix operator+(const SymMatrix& o) const {
    SymMatrix r;
    r.m_ = m_ + o.m_;
    return r;
  }
  SymMatrix operator-(const SymMatrix& o) const {
    SymMatrix r;
    r.m_ = m_ - o.m_;
    return r;
  }

 private:
  Matrix m_;
};

/* A block of k update directions in R^d.  When the directions are standard
   basis vectors the defining indices are kept alongside the dense columns,
   which lets solvers read single matrix columns instead of forming full
   products. */
class DirectionSet {
 public:
  static DirectionSet basis(int dim, std::vector<int> indices) {
    DirectionSet s;
    s.cols_ = Matrix::Zero(dim, static_cast<int>(indices.size()));
    for (int c = 0; c < static_cast<int>(indices.size()); ++c) {
      const int idx = indices[c];
      if (idx < 0 || idx >= dim) throw std::invalid_argument("basis index out of range");
      for (int prev = 0; prev < c; ++prev)
        if (indices[prev] == idx) throw std::invalid_argument("repeated basis index");
      s.cols_(idx, c) = 1.0;
    }
    s.basis_ = std::move(indices);
    return s;
  }

  static DirectionSet dense(Matrix columns) {
    DirectionSet s;
    s.cols_ = std::move(columns);
    return s;
  }

  int dim() const { return static_cast<int>(cols_.rows()); }
  int count() const { return static_cast<int>(cols_.cols()); }
  const Matrix& columns() const { return cols_; }
  const std::optional<std::vector<int>>& basis_indices() const { return basis_; }

 private:
  Matrix cols_;
  std::optional<std::vector<int>> basis_;
};

namespace detail {

/* Indices of the k largest entries, ties broken toward the lower index.
   Sorting (value desc, index asc) makes the selection fully deterministic. */
inline std::vector<int> top_k_indices(const Vector& v, int k) {
  if (k < 1 || k > v.size()) throw std::invalid_argument("top_k_indices: k out of range");
  std::vector<int> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (v[a] != v[b]) return v[a] > v[b];
    return a < b;
  });
  order.resize(k);
  return order;
}

/* Eigendecomposition-based pseudoinverse of a small symmetric matrix.
   Eigenvalues with |lambda| <= rel_cutoff * max|lambda| are treated as zero.
   The kept eigenpairs are exposed so callers can work with the reduced
   factorization instead of the assembled pseudoinverse. */
struct SymPinv {
  Matrix pinv;
  Matrix kept_vectors;  // k x r
  Vector kept_values;   // r
};

inline SymPinv sym_pinv(const Matrix& W, double rel_cutoff = 1e-12) {
  const Matrix Wsym = 0.5 * (W + W.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(Wsym);
  const Vector& lam = es.eigenvalues();
  const double lmax = lam.cwiseAbs().maxCoeff();
  const double cutoff = rel_cutoff * lmax;

  std::vector<int> kept;
  for (int i = 0; i < lam.size(); ++i)
    if (std::abs(lam[i]) > cutoff) kept.push_back(i);

  SymPinv out;
  out.kept_vectors = Matrix(W.rows(), static_cast<int>(kept.size()));
  out.kept_values = Vector(static_cast<int>(kept.size()));
  for (int c = 0; c < static_cast<int>(kept.size()); ++c) {
    out.kept_vectors.col(c) = es.eigenvectors().col(kept[c]);
    out.kept_values[c] = lam[kept[c]];
  }
  out.pinv = out.kept_vectors * out.kept_values.cwiseInverse().asDiagonal() *
             out.kept_vectors.transpose();
  if (kept.empty()) out.pinv = Matrix::Zero(W.rows(), W.cols());
  return out;
}

}  // namespace detail

/* Solves A x = b for symmetric positive definite A by Cholesky. */
inline Vector spd_solve(const SymMatrix& A, const Vector& b) {
  if (A.dim() != b.size()) throw std::invalid_argument("spd_solve: size mismatch");
  Eigen::LLT<Matrix> llt(A.mat());
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("spd_solve: Cholesky factorization failed");
  return llt.solve(b);
}

/* Dense inverse of a symmetric positive definite matrix, symmetrized. */
inline SymMatrix spd_inverse(const SymMatrix& A) {
  Eigen::LLT<Matrix> llt(A.mat());
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("spd_inverse: Cholesky factorization failed");
  return SymMatrix(llt.solve(Matrix::Identity(A.dim(), A.dim())));
}

/* Low-rank inverse update: given A_inv = A^{-1}, returns the inverse of
   A - U W^{-1} V^T as

       A_inv + A_inv U (W - U^T A_inv V)^{-1} V^T A_inv.

   A zero correction block V returns A_inv unchanged.  The middle matrix is
   rejected as singular when its smallest singular value falls below 1e-12
   of its largest; that distinguishes a genuinely degenerate correction from
   an ill-conditioned but usable one. */
inline SymMatrix update_inverse(const SymMatrix& A_inv, const DirectionSet& U,
                                const Matrix& V, const Matrix& W) {
  const int d = A_inv.dim();
  const int k = U.count();
  if (U.dim() != d || V.rows() != d || V.cols() != k || W.rows() != k || W.cols() != k)
    throw std::invalid_argument("update_inverse: size mismatch");
  if (V.norm() == 0.0) return A_inv;

  const Matrix AiU = A_inv.mat() * U.columns();
  const Matrix AiV = A_inv.mat() * V;
  const Matrix mid = W - U.columns().transpose() * AiV;

  Eigen::JacobiSVD<Matrix> svd(mid, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(k - 1);
  if (smax == 0.0 || smin <= 1e-12 * smax)
    throw SingularCorrection("update_inverse: middle matrix is numerically singular");

  return SymMatrix(A_inv.mat() + AiU * svd.solve(AiV.transpose()));
}

/* Directions for a greedy rank-k step: the standard basis vectors carrying
   the k largest diagonal entries of A, ordered by descending entry. */
inline DirectionSet top_k_diagonal(const SymMatrix& A, int k) {
  if (k < 1 || k > A.dim()) throw std::invalid_argument("top_k_diagonal: k out of range");
  return DirectionSet::basis(A.dim(), detail::top_k_indices(A.diagonal(), k));
}

}  // namespace lisr
