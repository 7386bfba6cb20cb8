#pragma once

#include <Eigen/Dense>
#include <utility>

#include "lisr/lisr.hpp"

namespace test_support {

using lisr::Matrix;
using lisr::ObjectiveOracle;
using lisr::SplitMix64;
using lisr::SymMatrix;
using lisr::Vector;

inline Vector random_vector(SplitMix64& rng, int d, double lo = -1.0, double hi = 1.0) {
  Vector v(d);
  for (int j = 0; j < d; ++j) v[j] = rng.uniform(lo, hi);
  return v;
}

/* Random orthogonal factor from the QR decomposition of a matrix with
   uniform entries. */
inline Matrix random_orthogonal(SplitMix64& rng, int d) {
  Matrix m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = rng.uniform(-1.0, 1.0);
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(d, d);
}

inline SymMatrix random_spd(SplitMix64& rng, int d, double lo = 0.5, double hi = 2.0) {
  const Matrix q = random_orthogonal(rng, d);
  Vector eig(d);
  for (int j = 0; j < d; ++j) eig[j] = rng.uniform(lo, hi);
  return SymMatrix(q * eig.asDiagonal() * q.transpose());
}

/* Pair (A, G) with A SPD and A <= G <= up_to * A in the PSD order:
   G = A^{1/2} (I + C) A^{1/2} where C is PSD with eigenvalues in
   [0, up_to - 1] and an eigenbasis independent of A's. */
inline std::pair<SymMatrix, SymMatrix> random_dominated_pair(SplitMix64& rng, int d,
                                                             double up_to = 4.0) {
  const SymMatrix a = random_spd(rng, d);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat());
  const Matrix a_half =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  const Matrix q = random_orthogonal(rng, d);
  Vector c(d);
  for (int j = 0; j < d; ++j) c[j] = rng.uniform(0.0, up_to - 1.0);
  const Matrix mid = Matrix::Identity(d, d) + q * c.asDiagonal() * q.transpose();
  return {a, SymMatrix(a_half * mid * a_half)};
}

inline double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

inline Vector fd_gradient(const ObjectiveOracle& oracle, int i, const Vector& x,
                          double h = 1e-6) {
  Vector g(x.size());
  for (int j = 0; j < x.size(); ++j) {
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (oracle.value(i, xp) - oracle.value(i, xm)) / (2.0 * h);
  }
  return g;
}

/* Central difference of the analytic gradient; symmetrized. */
inline Matrix fd_hessian(const ObjectiveOracle& oracle, int i, const Vector& x,
                         double h = 1e-5) {
  const int d = static_cast<int>(x.size());
  Matrix m(d, d);
  for (int j = 0; j < d; ++j) {
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    m.col(j) = (oracle.gradient(i, xp) - oracle.gradient(i, xm)) / (2.0 * h);
  }
  return 0.5 * (m + m.transpose());
}

/* Forwards every oracle call to `inner` while tallying how often each entry
   point is hit.  Lets tests pin down the per-iteration access pattern. */
class CountingOracle final : public ObjectiveOracle {
 public:
  explicit CountingOracle(const ObjectiveOracle& inner) : inner_(inner) {}

  int component_count() const override { return inner_.component_count(); }
  int dim() const override { return inner_.dim(); }

  double value(int i, const Vector& x) const override {
    ++value_calls;
    return inner_.value(i, x);
  }
  Vector gradient(int i, const Vector& x) const override {
    ++gradient_calls;
    return inner_.gradient(i, x);
  }
  SymMatrix hessian(int i, const Vector& x) const override {
    ++hessian_calls;
    return inner_.hessian(i, x);
  }
  Vector hessian_column(int i, const Vector& x, int col) const override {
    ++hessian_column_calls;
    return inner_.hessian_column(i, x, col);
  }
  Vector hessian_diagonal(int i, const Vector& x) const override {
    ++hessian_diagonal_calls;
    return inner_.hessian_diagonal(i, x);
  }

  double strong_convexity() const override { return inner_.strong_convexity(); }
  double smoothness() const override { return inner_.smoothness(); }
  std::optional<double> hessian_lipschitz() const override { return inner_.hessian_lipschitz(); }
  std::optional<Vector> exact_optimum() const override { return inner_.exact_optimum(); }

  void reset() const {
    value_calls = gradient_calls = hessian_calls = 0;
    hessian_column_calls = hessian_diagonal_calls = 0;
  }

  mutable long value_calls = 0;
  mutable long gradient_calls = 0;
  mutable long hessian_calls = 0;
  mutable long hessian_column_calls = 0;
  mutable long hessian_diagonal_calls = 0;

 private:
  const ObjectiveOracle& inner_;
};

}  // namespace test_support
