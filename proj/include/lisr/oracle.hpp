#pragma once

#include <cmath>
#include <optional>

#include "linalg.hpp"

namespace lisr {

/* Component-wise oracle for a finite-sum objective

     f(x) = (1/n) sum_i f_i(x),

   with every f_i strongly convex and smooth.  Solvers touch one component
   per iteration, so all accessors take the component index first.

   Implementations must compute hessian() by assembling hessian_column()
   for every column, and hessian_diagonal() entries must equal the matching
   column entries bit for bit.  The incremental solver reads only the
   diagonal plus k columns per step and the reference solver reads full
   matrices; the agreement keeps those two access paths interchangeable. */
class ObjectiveOracle {
 public:
  virtual ~ObjectiveOracle() = default;

  virtual int component_count() const = 0;
  virtual int dim() const = 0;

  virtual double value(int i, const Vector& x) const = 0;
  virtual Vector gradient(int i, const Vector& x) const = 0;
  virtual SymMatrix hessian(int i, const Vector& x) const = 0;
  virtual Vector hessian_column(int i, const Vector& x, int col) const = 0;
  virtual Vector hessian_diagonal(int i, const Vector& x) const = 0;

  /* Uniform bounds over all components. */
  virtual double strong_convexity() const = 0;               // mu
  virtual double smoothness() const = 0;                     // L
  virtual std::optional<double> hessian_lipschitz() const {  // L_tilde
    return std::nullopt;
  }

  /* Closed-form minimizer when the problem admits one. */
  virtual std::optional<Vector> exact_optimum() const { return std::nullopt; }

  double full_value(const Vector& x) const {
    double s = 0.0;
    for (int i = 0; i < component_count(); ++i) s += value(i, x);
    return s / component_count();
  }

  Vector full_gradient(const Vector& x) const {
    Vector s = Vector::Zero(dim());
    for (int i = 0; i < component_count(); ++i) s += gradient(i, x);
    return s / component_count();
  }

  SymMatrix full_hessian(const Vector& x) const {
    Matrix s = Matrix::Zero(dim(), dim());
    for (int i = 0; i < component_count(); ++i) s += hessian(i, x).mat();
    return SymMatrix(s / component_count());
  }
};

/* Constants the scaled solver needs, all derived from the oracle bounds:
   kappa = L / mu and M = L_tilde / mu^{3/2}. */
struct DerivedConstants {
  double mu;
  double L;
  double L_tilde;
  double kappa;
  double M;
};

inline DerivedConstants problem_constants(const ObjectiveOracle& oracle) {
  DerivedConstants c;
  c.mu = oracle.strong_convexity();
  c.L = oracle.smoothness();
  if (!(c.mu > 0.0) || !(c.L >= c.mu))
    throw std::invalid_argument("problem_constants: need 0 < mu <= L");
  const std::optional<double> lt = oracle.hessian_lipschitz();
  if (!lt)
    throw MissingConstants("problem_constants: oracle provides no Hessian Lipschitz bound");
  c.L_tilde = *lt;
  c.kappa = c.L / c.mu;
  c.M = c.L_tilde / (c.mu * std::sqrt(c.mu));
  return c;
}

}  // namespace lisr
