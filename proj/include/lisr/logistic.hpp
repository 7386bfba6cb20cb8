#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "oracle.hpp"
#include "rng.hpp"

namespace lisr {

/* Binary labels in {-1, +1}, one dense feature row per component. */
struct LogisticProblem {
  Matrix features;  // n x d
  std::vector<int> labels;
  double lambda = 0.0;
};

namespace detail {

/* Overflow-safe logistic helpers. */
inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

inline double log_one_plus_exp(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

}  // namespace detail

/* f_i(x) = ln(1 + exp(-y_i <x, z_i>)) + (lambda/2) ||x||^2.

   Bounds: mu = lambda, L = lambda + max_i ||z_i||^2 / 4, and the Hessian
   Lipschitz constant uses max_i ||z_i||^3 / (6 sqrt 3): the third derivative
   of t -> ln(1 + e^t) is s(1-s)(1-2s), whose magnitude peaks at 1/(6 sqrt 3),
   and each <x, z_i> differentiation contributes one factor of ||z_i||. */
class LogisticOracle final : public ObjectiveOracle {
 public:
  explicit LogisticOracle(LogisticProblem problem) : p_(std::move(problem)) {
    const int n = static_cast<int>(p_.features.rows());
    if (n < 1 || p_.features.cols() < 1)
      throw std::invalid_argument("LogisticOracle: empty problem");
    if (static_cast<int>(p_.labels.size()) != n)
      throw std::invalid_argument("LogisticOracle: label count mismatch");
    for (int y : p_.labels)
      if (y != 1 && y != -1) throw std::invalid_argument("LogisticOracle: labels must be +-1");
    if (!(p_.lambda > 0.0))
      throw std::invalid_argument("LogisticOracle: need lambda > 0");
    max_row_norm_ = 0.0;
    for (int i = 0; i < n; ++i)
      max_row_norm_ = std::max(max_row_norm_, p_.features.row(i).norm());
  }

  const LogisticProblem& problem() const { return p_; }

  int component_count() const override { return static_cast<int>(p_.features.rows()); }
  int dim() const override { return static_cast<int>(p_.features.cols()); }

  double value(int i, const Vector& x) const override {
    const double m = -p_.labels[i] * p_.features.row(i).dot(x);
    return detail::log_one_plus_exp(m) + 0.5 * p_.lambda * x.squaredNorm();
  }

  Vector gradient(int i, const Vector& x) const override {
    const double m = -p_.labels[i] * p_.features.row(i).dot(x);
    const double s = detail::sigmoid(m);
    return (-p_.labels[i] * s) * p_.features.row(i).transpose() + p_.lambda * x;
  }

  SymMatrix hessian(int i, const Vector& x) const override {
    const int d = dim();
    Matrix h(d, d);
    for (int j = 0; j < d; ++j) h.col(j) = hessian_column(i, x, j);
    return SymMatrix(h);
  }

  /* The feature product is formed before the curvature factor so that
     entry (j, col) and entry (col, j) are computed by the same expression;
     hessian() then agrees with its columns bit for bit. */
  Vector hessian_column(int i, const Vector& x, int col) const override {
    const double cu = loss_curvature(i, x);
    const int d = dim();
    Vector c(d);
    for (int j = 0; j < d; ++j)
      c[j] = cu * (p_.features(i, j) * p_.features(i, col));
    c[col] += p_.lambda;
    return c;
  }

  Vector hessian_diagonal(int i, const Vector& x) const override {
    const double cu = loss_curvature(i, x);
    const int d = dim();
    Vector diag(d);
    for (int j = 0; j < d; ++j)
      diag[j] = cu * (p_.features(i, j) * p_.features(i, j)) + p_.lambda;
    return diag;
  }

  double strong_convexity() const override { return p_.lambda; }
  double smoothness() const override {
    return p_.lambda + max_row_norm_ * max_row_norm_ / 4.0;
  }
  std::optional<double> hessian_lipschitz() const override {
    return max_row_norm_ * max_row_norm_ * max_row_norm_ / (6.0 * std::sqrt(3.0));
  }

 private:
  double loss_curvature(int i, const Vector& x) const {
    const double s = detail::sigmoid(p_.labels[i] * p_.features.row(i).dot(x));
    return s * (1.0 - s);
  }

  LogisticProblem p_;
  double max_row_norm_;
};

/* Synthetic instance with feature rows bounded by ||z_i|| <= 2.  Draw order:
   stream 0 fills the feature matrix row by row with uniform [-1, 1] entries
   (scaled by 2/sqrt d), stream 1 draws a ground-truth weight vector, and
   stream 2 flips 10% of the sign labels to keep the problem from being
   separable. */
inline LogisticProblem synthetic_logistic(int n, int d, std::uint64_t seed, double lambda) {
  if (n < 1 || d < 1) throw InvalidDimension("synthetic_logistic: need n, d >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("synthetic_logistic: need lambda > 0");

  LogisticProblem p;
  p.lambda = lambda;
  p.features = Matrix(n, d);
  const double scale = 2.0 / std::sqrt(static_cast<double>(d));
  SplitMix64 feat = derive_stream(seed, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) p.features(i, j) = scale * feat.uniform(-1.0, 1.0);

  SplitMix64 wrng = derive_stream(seed, 1);
  Vector w(d);
  for (int j = 0; j < d; ++j) w[j] = wrng.uniform(-1.0, 1.0);

  SplitMix64 flip = derive_stream(seed, 2);
  p.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const double margin = p.features.row(i).dot(w);
    int y = margin >= 0.0 ? 1 : -1;
    if (flip.uniform01() < 0.1) y = -y;
    p.labels[i] = y;
  }
  return p;
}

}  // namespace lisr
