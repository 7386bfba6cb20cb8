#pragma once

#include <istream>
#include <memory>
#include <ostream>
#include <vector>

#include "oracle.hpp"
#include "rng.hpp"
#include "textio.hpp"

namespace lisr {

/* Finite sum of diagonal quadratics f_i(x) = 0.5 x'A_i x + b_i'x with
   A_i = diag(a[i]).  The half/half split of the diagonal ranges controls
   the condition number through xi. */
struct QuadraticProblem {
  int n = 0;
  int d = 0;
  double xi = 0.0;
  std::uint64_t seed = 0;
  std::vector<Vector> a;  // n diagonals, each of length d
  std::vector<Vector> b;  // n linear terms
};

/* Draw order, fixed for reproducibility: stream 0 yields the diagonal
   entries component by component, coordinate by coordinate; stream 1 yields
   the linear terms the same way.  The first half of each diagonal is
   uniform on [1, 10^{xi/2}], the second half on [10^{-xi/2}, 1], so every
   eigenvalue lies in [10^{-xi/2}, 10^{xi/2}]. */
inline QuadraticProblem generate_quadratic(int n, int d, double xi, std::uint64_t seed) {
  if (d < 2 || d % 2 != 0)
    throw InvalidDimension("generate_quadratic: dimension must be even and at least 2");
  if (n < 1) throw std::invalid_argument("generate_quadratic: need n >= 1");
  if (!(xi > 0.0)) throw std::invalid_argument("generate_quadratic: need xi > 0");

  QuadraticProblem p;
  p.n = n;
  p.d = d;
  p.xi = xi;
  p.seed = seed;
  const double hi = std::pow(10.0, xi / 2.0);
  const double lo = std::pow(10.0, -xi / 2.0);

  SplitMix64 diag_rng = derive_stream(seed, 0);
  p.a.resize(n);
  for (int i = 0; i < n; ++i) {
    p.a[i] = Vector(d);
    for (int j = 0; j < d / 2; ++j) p.a[i][j] = diag_rng.uniform(1.0, hi);
    for (int j = d / 2; j < d; ++j) p.a[i][j] = diag_rng.uniform(lo, 1.0);
  }

  SplitMix64 lin_rng = derive_stream(seed, 1);
  p.b.resize(n);
  for (int i = 0; i < n; ++i) {
    p.b[i] = Vector(d);
    for (int j = 0; j < d; ++j) p.b[i][j] = lin_rng.uniform(0.0, 1.0e3);
  }
  return p;
}

class QuadraticOracle final : public ObjectiveOracle {
 public:
  explicit QuadraticOracle(QuadraticProblem problem) : p_(std::move(problem)) {
    if (p_.n < 1 || static_cast<int>(p_.a.size()) != p_.n ||
        static_cast<int>(p_.b.size()) != p_.n)
      throw std::invalid_argument("QuadraticOracle: inconsistent problem");
    mu_ = p_.a[0][0];
    L_ = p_.a[0][0];
    for (const Vector& a : p_.a) {
      mu_ = std::min(mu_, a.minCoeff());
      L_ = std::max(L_, a.maxCoeff());
    }
    if (!(mu_ > 0.0))
      throw std::invalid_argument("QuadraticOracle: diagonals must be positive");
  }

  const QuadraticProblem& problem() const { return p_; }

  int component_count() const override { return p_.n; }
  int dim() const override { return p_.d; }

  double value(int i, const Vector& x) const override {
    return 0.5 * x.dot(p_.a[i].cwiseProduct(x)) + p_.b[i].dot(x);
  }

  Vector gradient(int i, const Vector& x) const override {
    return p_.a[i].cwiseProduct(x) + p_.b[i];
  }

  SymMatrix hessian(int i, const Vector& x) const override {
    Matrix h(p_.d, p_.d);
    for (int j = 0; j < p_.d; ++j) h.col(j) = hessian_column(i, x, j);
    return SymMatrix(h);
  }

  Vector hessian_column(int i, const Vector&, int col) const override {
    Vector c = Vector::Zero(p_.d);
    c[col] = p_.a[i][col];
    return c;
  }

  Vector hessian_diagonal(int i, const Vector&) const override { return p_.a[i]; }

  double strong_convexity() const override { return mu_; }
  double smoothness() const override { return L_; }
  std::optional<double> hessian_lipschitz() const override { return 0.0; }

  /* Minimizer of the average: componentwise -(sum a)^{-1} (sum b). */
  std::optional<Vector> exact_optimum() const override {
    Vector asum = Vector::Zero(p_.d);
    Vector bsum = Vector::Zero(p_.d);
    for (int i = 0; i < p_.n; ++i) {
      asum += p_.a[i];
      bsum += p_.b[i];
    }
    return Vector(-bsum.cwiseQuotient(asum));
  }

 private:
  QuadraticProblem p_;
  double mu_;
  double L_;
};

/* Text snapshot, hex floats, exact round trip. */
inline void save_quadratic(const QuadraticProblem& p, std::ostream& os) {
  os << "lisr-quadratic 1\n";
  os << p.n << ' ' << p.d << ' ' << detail::format_double_hex(p.xi) << ' ' << p.seed << '\n';
  for (int i = 0; i < p.n; ++i) {
    for (int j = 0; j < p.d; ++j) os << (j ? " " : "") << detail::format_double_hex(p.a[i][j]);
    os << '\n';
    for (int j = 0; j < p.d; ++j) os << (j ? " " : "") << detail::format_double_hex(p.b[i][j]);
    os << '\n';
  }
}

inline QuadraticProblem load_quadratic(std::istream& is) {
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (!is || magic != "lisr-quadratic" || version != 1)
    throw ParseError(1, "not a quadratic snapshot");
  QuadraticProblem p;
  std::string xi_tok;
  is >> p.n >> p.d >> xi_tok >> p.seed;
  if (!is || p.n < 1 || p.d < 1 || !detail::parse_double_hex(xi_tok, p.xi))
    throw ParseError(2, "bad quadratic snapshot header");
  p.a.resize(p.n);
  p.b.resize(p.n);
  std::string tok;
  for (int i = 0; i < p.n; ++i) {
    p.a[i] = Vector(p.d);
    p.b[i] = Vector(p.d);
    for (int j = 0; j < p.d; ++j) {
      is >> tok;
      if (!is || !detail::parse_double_hex(tok, p.a[i][j]))
        throw ParseError(3 + 2 * i, "bad diagonal entry");
    }
    for (int j = 0; j < p.d; ++j) {
      is >> tok;
      if (!is || !detail::parse_double_hex(tok, p.b[i][j]))
        throw ParseError(4 + 2 * i, "bad linear entry");
    }
  }
  return p;
}

}  // namespace lisr
