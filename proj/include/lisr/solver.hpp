#pragma once

#include <chrono>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "textio.hpp"
#include "updates.hpp"

namespace lisr {

/* End-of-cycle estimator inflation.  alpha(j) = M sqrt(L) r0 rho^j; the
   iterate-to-iterate factor omega(t) is (1 + alpha(t/n))^2 exactly when t is
   a positive multiple of n and 1 otherwise.  M = 0 (quadratics) or a
   disabled schedule make every factor 1. */
struct ScalingSchedule {
  bool enabled = false;
  double M = 0.0;
  double L = 1.0;
  double r0 = 1.0;
  double rho = 0.5;

  double alpha(long j) const {
    if (!enabled || M == 0.0) return 0.0;
    return M * std::sqrt(L) * r0 * std::pow(rho, static_cast<double>(j));
  }
};

inline double omega(long t, int n, const ScalingSchedule& s) {
  if (t < 1) throw std::invalid_argument("omega: t must be >= 1");
  if (n < 1) throw std::invalid_argument("omega: n must be >= 1");
  if (t % n != 0) return 1.0;
  const double a = s.alpha(t / n);
  return (1.0 + a) * (1.0 + a);
}

enum class Method { Lisr1, LisrK, Iqn };
enum class StepMode { Eager, Lazy };

/* Initial per-component estimator: L times the identity, or the component
   Hessian at the start point plus a 1e-8 L ridge. */
enum class EstimatorInit { SmoothnessIdentity, HessianAtStart };

struct SolverConfig {
  Method method = Method::Lisr1;
  int rank = 1;  // k, used by LisrK only
  StepMode mode = StepMode::Lazy;
  long max_passes = 40;
  double tolerance = 1e-10;
  ScalingSchedule schedule{};
  EstimatorInit init = EstimatorInit::SmoothnessIdentity;
};

inline int effective_rank(const SolverConfig& c) {
  return c.method == Method::LisrK ? c.rank : 1;
}

/* One component's slice of solver memory.  `b` holds the estimator as of
   the cycle it was last touched in; end-of-cycle scale factors accumulated
   since then are NOT folded in (that is the lazy part) and are recovered
   from scale_epoch on the next touch.  grad_z caches the component gradient
   at z so a step needs only one fresh gradient evaluation. */
struct EstimatorEntry {
  Vector z;
  SymMatrix b;
  Vector grad_z;
  long scale_epoch = 0;
};

struct HessianEstimatorBank {
  std::vector<EstimatorEntry> entries;
};

/* Aggregates carry the full scaling at all times:
   phi = sum_i B_i z_i,  g = sum_i grad f_i(z_i),  bbar_inv = (sum_i B_i)^{-1}. */
struct AggregateState {
  Vector phi;
  Vector g;
  SymMatrix bbar_inv;
};

/* Oracle work done by solver steps.  One "Hessian access" is one component
   touch per iteration, whether the step read the full matrix (eager) or the
   diagonal plus k columns (lazy).  Metric evaluations made by the run loop
   (full gradients for reporting) are not counted here. */
struct OracleCounters {
  long gradient_calls = 0;
  long hessian_accesses = 0;
};

struct SolverState {
  SolverConfig config;
  HessianEstimatorBank bank;
  AggregateState agg;
  Vector x;
  long t = 0;
  OracleCounters counters;
  long skipped_updates = 0;
};

/* Product of the end-of-cycle factors entry `e` has not yet absorbed, up to
   and including `cycle`.  Under cyclic touching this is at most one factor. */
inline double pending_scale(const EstimatorEntry& e, long cycle, const ScalingSchedule& s) {
  if (!s.enabled || s.M == 0.0) return 1.0;
  double f = 1.0;
  for (long l = e.scale_epoch + 1; l <= cycle; ++l) {
    const double a = s.alpha(l);
    f *= (1.0 + a) * (1.0 + a);
  }
  return f;
}

inline long pending_scale_exponent(const SolverState& st, int i) {
  const int n = static_cast<int>(st.bank.entries.size());
  return st.t / n - st.bank.entries[i].scale_epoch;
}

/* Estimator with all pending scale factors applied. */
inline SymMatrix effective_estimator(const SolverState& st, int i) {
  const int n = static_cast<int>(st.bank.entries.size());
  const EstimatorEntry& e = st.bank.entries[i];
  const double s = pending_scale(e, st.t / n, st.config.schedule);
  return s == 1.0 ? e.b : e.b.scaled(s);
}

/* Aggregates rebuilt from scratch; the reference against which the
   incrementally maintained ones are tested. */
inline AggregateState recompute_aggregates(const SolverState& st) {
  const int n = static_cast<int>(st.bank.entries.size());
  const int d = st.bank.entries[0].b.dim();
  Matrix bsum = Matrix::Zero(d, d);
  AggregateState agg;
  agg.phi = Vector::Zero(d);
  agg.g = Vector::Zero(d);
  for (int i = 0; i < n; ++i) {
    const SymMatrix be = effective_estimator(st, i);
    bsum += be.mat();
    agg.phi += be.apply(st.bank.entries[i].z);
    agg.g += st.bank.entries[i].grad_z;
  }
  agg.bbar_inv = spd_inverse(SymMatrix(bsum));
  return agg;
}

/* All components start at x0 with estimator (1 + alpha(0))^2 E_i.  Costs n
   gradient evaluations (cached into the bank) plus n Hessian evaluations
   under the HessianAtStart policy; these are setup costs and are not
   counted by the per-step counters. */
inline SolverState init_state(const ObjectiveOracle& oracle, const Vector& x0,
                              const SolverConfig& config) {
  const int n = oracle.component_count();
  const int d = oracle.dim();
  if (x0.size() != d) throw std::invalid_argument("init_state: x0 has wrong dimension");
  const int k = effective_rank(config);
  if (k < 1 || k > d)
    throw std::invalid_argument("init_state: rank must satisfy 1 <= k <= d");
  if (config.schedule.enabled) {
    const double limit = 1.0 - static_cast<double>(k) / d;
    if (!(config.schedule.rho > 0.0 && config.schedule.rho < limit))
      throw std::invalid_argument("init_state: rho must lie in (0, 1 - k/d)");
    if (!(config.schedule.r0 > 0.0) || !(config.schedule.L > 0.0) || config.schedule.M < 0.0)
      throw std::invalid_argument("init_state: bad scaling constants");
  }

  SolverState st;
  st.config = config;
  st.x = x0;
  st.t = 0;

  const double L = oracle.smoothness();
  const double a0 = config.schedule.alpha(0);
  const double inflate = (1.0 + a0) * (1.0 + a0);
  st.bank.entries.resize(n);
  for (int i = 0; i < n; ++i) {
    EstimatorEntry& e = st.bank.entries[i];
    e.z = x0;
    e.grad_z = oracle.gradient(i, x0);
    SymMatrix base = config.init == EstimatorInit::SmoothnessIdentity
                         ? SymMatrix::identity(d).scaled(L)
                         : oracle.hessian(i, x0) + SymMatrix::identity(d).scaled(1e-8 * L);
    e.b = inflate == 1.0 ? base : base.scaled(inflate);
    e.scale_epoch = 0;
  }
  st.agg = recompute_aggregates(st);
  return st;
}

namespace detail {

inline void check_bank(const SolverState& st, const ObjectiveOracle& oracle, const char* who) {
  if (st.bank.entries.size() != static_cast<std::size_t>(oracle.component_count()))
    throw std::invalid_argument(std::string(who) + ": bank does not match oracle");
}

/* Shared head of every step: the aggregate iterate from maintained state. */
inline Vector aggregate_iterate(const SolverState& st, const char* who) {
  Vector x = st.agg.bbar_inv.apply(st.agg.phi - st.agg.g);
  if (!x.allFinite())
    throw NotPositiveDefinite(std::string(who) + ": iterate is not finite");
  return x;
}

inline void check_inverse_definite(const SymMatrix& inv, const char* who) {
  if (!(inv.diagonal().array() > 0.0).all() || !inv.mat().allFinite())
    throw NotPositiveDefinite(std::string(who) + ": aggregate lost definiteness");
}

/* Restriction of a projected-gap eigendecomposition to its positive part.
   Under the scaling schedule the projected gap is positive semidefinite and
   this is exactly the pseudoinverse's support; without scaling the Hessian
   at the new point can exceed the estimator along some directions, and
   keeping a negative eigenpair would turn the correction into an addition
   that can destroy definiteness of the aggregate. */
inline SymPinv positive_part(SymPinv p) {
  int r = 0;
  for (int c = 0; c < p.kept_values.size(); ++c)
    if (p.kept_values[c] > 0.0) ++r;
  if (r == p.kept_values.size()) return p;

  Matrix vecs(p.kept_vectors.rows(), r);
  Vector vals(r);
  int out = 0;
  for (int c = 0; c < p.kept_values.size(); ++c)
    if (p.kept_values[c] > 0.0) {
      vecs.col(out) = p.kept_vectors.col(c);
      vals[out] = p.kept_values[c];
      ++out;
    }
  p.kept_vectors = vecs;
  p.kept_values = vals;
  p.pinv = r == 0 ? Matrix::Zero(vecs.rows(), vecs.rows())
                  : Matrix(vecs * vals.cwiseInverse().asDiagonal() * vecs.transpose());
  return p;
}

/* Greedy rank-k correction shared by the eager and lazy steps.  Directions
   are the k largest diagonal gap entries; the correction subtracts the
   positive reduced eigenfactors of the projected gap.  Skips when the
   largest diagonal gap is at most 1e-12 or no positive eigenpair survives
   the cutoff.  `hess_column(j)` must return column j of the component
   Hessian at the new iterate. */
struct GreedyCorrection {
  SymMatrix Q;  // corrected estimator; equals G when skipped
  Matrix P;     // d x r reduced factors, only valid when not skipped
  Vector lam;   // r positive eigenvalues of the projected gap
  bool skipped = false;
};

/* Definiteness test for the aggregate after subtracting P diag(lam)^{-1} P^T
   from the estimator sum B: by the Schur complement, B - P lam^{-1} P^T
   stays positive definite exactly when diag(lam) - P^T B^{-1} P does.
   `Binv_P` is B^{-1} P.  The relative cutoff matches update_inverse's
   singularity threshold, so a correction passing this test cannot trip
   SingularCorrection either. */
inline bool correction_keeps_definite(const Vector& lam, const Matrix& P,
                                      const Matrix& Binv_P) {
  const Matrix mid_raw = Matrix(lam.asDiagonal()) - P.transpose() * Binv_P;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (mid_raw + mid_raw.transpose()));
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax_abs = es.eigenvalues().cwiseAbs().maxCoeff();
  return lmax_abs > 0.0 && lmin > 1e-12 * lmax_abs;
}

template <typename ColumnFn>
inline GreedyCorrection greedy_correction(const SymMatrix& G, const Vector& hess_diag, int k,
                                          ColumnFn&& hess_column) {
  const Vector diag_gap = G.diagonal() - hess_diag;
  std::vector<int> idx = top_k_indices(diag_gap, k);
  /* Only coordinates with something left to correct join the block; a
     coordinate whose gap is nonpositive contributes no curvature
     information and destabilizes the projected gap's eigenstructure. */
  while (!idx.empty() && diag_gap[idx.back()] <= 1e-12) idx.pop_back();

  GreedyCorrection out;
  if (idx.empty()) {
    out.Q = G;
    out.skipped = true;
    return out;
  }

  const int d = G.dim();
  const int kb = static_cast<int>(idx.size());
  Matrix V(d, kb);
  for (int c = 0; c < kb; ++c) V.col(c) = G.mat().col(idx[c]) - hess_column(idx[c]);
  Matrix W(kb, kb);
  for (int r = 0; r < kb; ++r)
    for (int c = 0; c < kb; ++c) W(r, c) = V(idx[r], c);

  const SymPinv pinv = positive_part(sym_pinv(W));
  if (pinv.kept_values.size() == 0) {
    out.Q = G;
    out.skipped = true;
    return out;
  }
  out.P = V * pinv.kept_vectors;
  out.lam = pinv.kept_values;
  out.Q = SymMatrix(G.mat() - out.P * out.lam.cwiseInverse().asDiagonal() * out.P.transpose());
  return out;
}

/* Shrinks a correction until the aggregate stays definite.  Eigenvalues
   arrive in ascending order; the smallest carries the largest inverse
   weight and is dropped first.  Marks the correction skipped when nothing
   survives.  `Binv_P` is (estimator sum)^{-1} P for the full block. */
inline void enforce_definite(GreedyCorrection& corr, const SymMatrix& G, const Matrix& Binv_P) {
  if (corr.skipped) return;
  const int r = static_cast<int>(corr.lam.size());
  int drop = 0;
  while (drop < r &&
         !correction_keeps_definite(corr.lam.tail(r - drop), corr.P.rightCols(r - drop),
                                    Binv_P.rightCols(r - drop)))
    ++drop;
  if (drop == 0) return;
  if (drop == r) {
    corr.Q = G;
    corr.skipped = true;
    return;
  }
  corr.P = Matrix(corr.P.rightCols(r - drop));
  corr.lam = Vector(corr.lam.tail(r - drop));
  corr.Q = SymMatrix(G.mat() - corr.P * corr.lam.cwiseInverse().asDiagonal() * corr.P.transpose());
}

}  // namespace detail

/* Reference step: iterate by direct solve over the fully materialized bank,
   estimator update through the full-matrix update routines, scale factors
   folded in immediately.  O(n d^2 + d^3) per iteration; exists to pin down
   the semantics the lazy step must reproduce. */
inline void lisr_step_eager(SolverState& st, const ObjectiveOracle& oracle) {
  detail::check_bank(st, oracle, "lisr_step_eager");
  const int n = oracle.component_count();
  const int d = oracle.dim();
  const int i = static_cast<int>(st.t % n);

  Matrix bsum = Matrix::Zero(d, d);
  Vector phi = Vector::Zero(d);
  Vector g = Vector::Zero(d);
  for (const EstimatorEntry& e : st.bank.entries) {
    bsum += e.b.mat();
    phi += e.b.apply(e.z);
    g += e.grad_z;
  }
  Eigen::LLT<Matrix> llt(bsum);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("lisr_step_eager: estimator sum is not positive definite");
  const Vector x_new = llt.solve(phi - g);
  if (!x_new.allFinite())
    throw NotPositiveDefinite("lisr_step_eager: iterate is not finite");

  const SymMatrix H = oracle.hessian(i, x_new);
  st.counters.hessian_accesses += 1;

  EstimatorEntry& entry = st.bank.entries[i];
  const SymMatrix G = entry.b;
  detail::GreedyCorrection corr = detail::greedy_correction(
      G, H.diagonal(), effective_rank(st.config),
      [&H](int col) { return Vector(H.mat().col(col)); });
  if (!corr.skipped) detail::enforce_definite(corr, G, llt.solve(corr.P));
  if (corr.skipped) st.skipped_updates += 1;

  entry.z = x_new;
  entry.grad_z = oracle.gradient(i, x_new);
  st.counters.gradient_calls += 1;
  entry.b = corr.Q;

  const double w = omega(st.t + 1, n, st.config.schedule);
  if (w != 1.0) {
    const long next_cycle = (st.t + 1) / n;
    for (EstimatorEntry& e : st.bank.entries) {
      e.b = e.b.scaled(w);
      e.scale_epoch = next_cycle;
    }
  }

  st.x = x_new;
  st.t += 1;
  st.agg = recompute_aggregates(st);
}

/* Incremental step: iterate by matrix-vector product against the maintained
   inverse, greedy selection from the stored diagonal plus one oracle
   diagonal, correction built from k oracle Hessian columns, aggregates and
   the inverse updated through the low-rank identity.  O(k d^2) per
   iteration with O(d + k d) Hessian entries read. */
inline void lisr_step_lazy(SolverState& st, const ObjectiveOracle& oracle) {
  detail::check_bank(st, oracle, "lisr_step_lazy");
  const int n = oracle.component_count();
  const int i = static_cast<int>(st.t % n);
  const long cycle = st.t / n;
  const int k = effective_rank(st.config);

  const Vector x_new = detail::aggregate_iterate(st, "lisr_step_lazy");

  EstimatorEntry& entry = st.bank.entries[i];
  const double s = pending_scale(entry, cycle, st.config.schedule);
  const SymMatrix G = s == 1.0 ? entry.b : entry.b.scaled(s);

  const Vector hess_diag = oracle.hessian_diagonal(i, x_new);
  st.counters.hessian_accesses += 1;

  detail::GreedyCorrection corr = detail::greedy_correction(
      G, hess_diag, k,
      [&oracle, i, &x_new](int col) { return oracle.hessian_column(i, x_new, col); });

  SymMatrix new_inv;
  if (!corr.skipped)
    detail::enforce_definite(corr, G, Matrix(st.agg.bbar_inv.mat() * corr.P));
  if (!corr.skipped) {
    try {
      new_inv = update_inverse(st.agg.bbar_inv, DirectionSet::dense(corr.P), corr.P,
                               Matrix(corr.lam.asDiagonal()));
    } catch (const SingularCorrection&) {
      corr.Q = G;
      corr.skipped = true;
    }
  }
  if (corr.skipped) {
    new_inv = st.agg.bbar_inv;
    st.skipped_updates += 1;
  }
  const SymMatrix& Q = corr.Q;

  const Vector grad_new = oracle.gradient(i, x_new);
  st.counters.gradient_calls += 1;

  const double w = omega(st.t + 1, n, st.config.schedule);
  Vector phi = st.agg.phi - G.apply(entry.z) + Q.apply(x_new);
  st.agg.phi = w == 1.0 ? phi : Vector(w * phi);
  st.agg.g += grad_new - entry.grad_z;
  st.agg.bbar_inv = w == 1.0 ? new_inv : new_inv.scaled(1.0 / w);
  detail::check_inverse_definite(st.agg.bbar_inv, "lisr_step_lazy");

  /* Stored without the factor omega applies at this step's end; scale_epoch
     records which cycle the entry is current for. */
  entry.z = x_new;
  entry.grad_z = grad_new;
  entry.b = Q;
  entry.scale_epoch = cycle;

  st.x = x_new;
  st.t += 1;

  /* Inflation widens the spectrum the low-rank inverse updates must track,
     and their rounding error compounds across a cycle.  A from-scratch
     rebuild at each cycle boundary caps that drift; unscaled runs (omega
     identically 1) never take this branch, so they exercise the pure
     incremental chain.  Amortized over the n steps of a cycle this keeps
     the per-step cost within O(k d^2) for d <= n k. */
  if (w != 1.0) st.agg = recompute_aggregates(st);
}

/* Baseline step: same aggregate iterate, classical BFGS secant update on
   the touched component, no greedy directions and no scaling.  The update
   is skipped (estimator kept) when the curvature y's is not safely
   positive; zero-motion steps land in the same branch. */
inline void iqn_step(SolverState& st, const ObjectiveOracle& oracle) {
  detail::check_bank(st, oracle, "iqn_step");
  const int n = oracle.component_count();
  const int i = static_cast<int>(st.t % n);

  const Vector x_new = detail::aggregate_iterate(st, "iqn_step");
  const Vector grad_new = oracle.gradient(i, x_new);
  st.counters.gradient_calls += 1;

  EstimatorEntry& entry = st.bank.entries[i];
  const Vector sv = x_new - entry.z;
  const Vector y = grad_new - entry.grad_z;
  const double ys = y.dot(sv);

  SymMatrix B_new = entry.b;
  SymMatrix new_inv = st.agg.bbar_inv;
  bool updated = ys > 1e-12 * sv.squaredNorm();
  if (updated) {
    const Vector Bs = entry.b.apply(sv);
    const double sBs = sv.dot(Bs);
    try {
      Matrix w1(1, 1), w2(1, 1);
      w1(0, 0) = sBs;
      w2(0, 0) = -ys;
      const SymMatrix inv1 =
          update_inverse(st.agg.bbar_inv, DirectionSet::dense(Bs), Bs, w1);
      new_inv = update_inverse(inv1, DirectionSet::dense(y), y, w2);
      B_new = SymMatrix(entry.b.mat() - (Bs * Bs.transpose()) / sBs +
                        (y * y.transpose()) / ys);
    } catch (const SingularCorrection&) {
      B_new = entry.b;
      new_inv = st.agg.bbar_inv;
      updated = false;
    }
  }
  if (!updated) st.skipped_updates += 1;

  st.agg.phi += B_new.apply(x_new) - entry.b.apply(entry.z);
  st.agg.g += y;
  st.agg.bbar_inv = new_inv;
  detail::check_inverse_definite(st.agg.bbar_inv, "iqn_step");

  entry.z = x_new;
  entry.grad_z = grad_new;
  entry.b = B_new;

  st.x = x_new;
  st.t += 1;
}

inline void step(SolverState& st, const ObjectiveOracle& oracle) {
  if (st.config.method == Method::Iqn)
    iqn_step(st, oracle);
  else if (st.config.mode == StepMode::Eager)
    lisr_step_eager(st, oracle);
  else
    lisr_step_lazy(st, oracle);
}

/* Minimizer of the average objective.  Uses the oracle's closed form when
   there is one, otherwise damped Newton with Armijo backtracking, capped at
   200 iterations.  The default tolerance scales with the gradient at the
   start point, so a restart from the solution returns immediately. */
inline Vector newton_reference(const ObjectiveOracle& oracle, const Vector& x0,
                               std::optional<double> tol = std::nullopt) {
  if (const std::optional<Vector> exact = oracle.exact_optimum()) return *exact;

  Vector x = x0;
  Vector grad = oracle.full_gradient(x);
  const double tolerance = tol ? *tol : 1e-13 * oracle.component_count();
  for (int it = 0; it < 200; ++it) {
    if (grad.norm() <= tolerance) return x;
    const Vector p = spd_solve(oracle.full_hessian(x), Vector(-grad));
    const double f0 = oracle.full_value(x);
    const double slope = grad.dot(p);
    double step_len = 1.0;
    while (step_len > 1e-16 &&
           oracle.full_value(x + step_len * p) > f0 + 1e-4 * step_len * slope)
      step_len *= 0.5;
    x += step_len * p;
    grad = oracle.full_gradient(x);
  }
  if (grad.norm() <= tolerance) return x;
  throw NonConvergence("newton_reference: no convergence in 200 iterations");
}

/* One row per effective pass (n iterations); pass 0 is the start point, so
   its normalized error is 1 by definition. */
struct RunRecord {
  long pass = 0;
  double normalized_error = 0.0;
  double grad_norm = 0.0;
  double wall_seconds = 0.0;
  long grad_calls = 0;
  long hess_calls = 0;
  long skipped_updates = 0;
};

inline std::vector<RunRecord> run(const ObjectiveOracle& oracle, const SolverConfig& config,
                                  const Vector& x0,
                                  std::optional<Vector> x_star = std::nullopt) {
  const Vector star = x_star ? *x_star : newton_reference(oracle, x0);
  const double denom = (x0 - star).norm();

  SolverState st = init_state(oracle, x0, config);
  const int n = oracle.component_count();
  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  std::vector<RunRecord> records;
  RunRecord start;
  start.pass = 0;
  start.normalized_error = 1.0;
  start.grad_norm = oracle.full_gradient(x0).norm();
  start.wall_seconds = elapsed();
  records.push_back(start);

  for (long pass = 1; pass <= config.max_passes; ++pass) {
    for (int j = 0; j < n; ++j) step(st, oracle);
    RunRecord r;
    r.pass = pass;
    const double err = (st.x - star).norm();
    r.normalized_error = denom > 0.0 ? err / denom : err;
    r.grad_norm = oracle.full_gradient(st.x).norm();
    r.wall_seconds = elapsed();
    r.grad_calls = st.counters.gradient_calls;
    r.hess_calls = st.counters.hessian_accesses;
    r.skipped_updates = st.skipped_updates;
    records.push_back(r);
    /* A non-finite tolerance means "run to the pass cap"; comparing against
       it would otherwise stop after the first pass. */
    if (std::isfinite(config.tolerance) && r.normalized_error <= config.tolerance) break;
  }
  return records;
}

namespace detail {

inline void write_vector(std::ostream& os, const Vector& v) {
  for (int j = 0; j < v.size(); ++j) os << (j ? " " : "") << format_double_hex(v[j]);
  os << '\n';
}

inline Vector read_vector(std::istream& is, int d, const char* what) {
  Vector v(d);
  std::string tok;
  for (int j = 0; j < d; ++j) {
    is >> tok;
    if (!is || !parse_double_hex(tok, v[j]))
      throw std::runtime_error(std::string("checkpoint: bad ") + what);
  }
  return v;
}

inline void write_matrix(std::ostream& os, const Matrix& m) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c)
      os << (c ? " " : "") << format_double_hex(m(r, c));
    os << '\n';
  }
}

inline Matrix read_matrix(std::istream& is, int d, const char* what) {
  Matrix m(d, d);
  std::string tok;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      is >> tok;
      if (!is || !parse_double_hex(tok, m(r, c)))
        throw std::runtime_error(std::string("checkpoint: bad ") + what);
    }
  return m;
}

}  // namespace detail

/* Versioned text snapshot of bank + aggregates + iteration counter.  Hex
   floats make the round trip exact, so a reloaded state continues bit for
   bit like the original. */
inline void save_checkpoint(const SolverState& st, std::ostream& os) {
  const int n = static_cast<int>(st.bank.entries.size());
  const int d = static_cast<int>(st.x.size());
  os << "lisr-checkpoint 1\n";
  os << n << ' ' << d << ' ' << st.t << ' ' << st.counters.gradient_calls << ' '
     << st.counters.hessian_accesses << ' ' << st.skipped_updates << '\n';
  detail::write_vector(os, st.x);
  detail::write_vector(os, st.agg.phi);
  detail::write_vector(os, st.agg.g);
  detail::write_matrix(os, st.agg.bbar_inv.mat());
  for (const EstimatorEntry& e : st.bank.entries) {
    os << e.scale_epoch << '\n';
    detail::write_vector(os, e.z);
    detail::write_vector(os, e.grad_z);
    detail::write_matrix(os, e.b.mat());
  }
}

inline SolverState load_checkpoint(std::istream& is, const SolverConfig& config) {
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (!is || magic != "lisr-checkpoint" || version != 1)
    throw std::runtime_error("checkpoint: unrecognized header");
  SolverState st;
  st.config = config;
  int n = 0, d = 0;
  is >> n >> d >> st.t >> st.counters.gradient_calls >> st.counters.hessian_accesses >>
      st.skipped_updates;
  if (!is || n < 1 || d < 1) throw std::runtime_error("checkpoint: bad sizes");
  st.x = detail::read_vector(is, d, "iterate");
  st.agg.phi = detail::read_vector(is, d, "phi");
  st.agg.g = detail::read_vector(is, d, "g");
  st.agg.bbar_inv = SymMatrix(detail::read_matrix(is, d, "aggregate inverse"));
  st.bank.entries.resize(n);
  for (EstimatorEntry& e : st.bank.entries) {
    is >> e.scale_epoch;
    if (!is) throw std::runtime_error("checkpoint: bad scale epoch");
    e.z = detail::read_vector(is, d, "z");
    e.grad_z = detail::read_vector(is, d, "cached gradient");
    e.b = SymMatrix(detail::read_matrix(is, d, "estimator"));
  }
  return st;
}

}  // namespace lisr
