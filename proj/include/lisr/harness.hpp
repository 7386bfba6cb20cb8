#pragma once

#include <algorithm>
#include <fstream>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "libsvm.hpp"
#include "quadratic.hpp"
#include "solver.hpp"

namespace lisr {

struct MethodSpec {
  Method method = Method::Lisr1;
  int rank = 1;

  std::string label() const {
    switch (method) {
      case Method::Lisr1:
        return "lisr1";
      case Method::LisrK:
        return "lisrk";
      case Method::Iqn:
        return "iqn";
    }
    return "?";
  }
};

struct QuadraticSpec {
  int n = 50;
  int d = 20;
  double xi = 4.0;
  std::uint64_t seed = 42;
};

struct SyntheticLogisticSpec {
  int n = 200;
  int d = 30;
  std::uint64_t seed = 42;
  double lambda = 1e-3;
};

struct LogisticFileSpec {
  std::string path;
  double lambda = 1e-3;
  int dim_override = 0;
};

using ProblemSpec = std::variant<QuadraticSpec, SyntheticLogisticSpec, LogisticFileSpec>;

enum class StartPoint { Zero, Random };

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<MethodSpec> methods;
  StepMode mode = StepMode::Lazy;
  long max_passes = 40;
  double tolerance = 1e-10;
  EstimatorInit init = EstimatorInit::SmoothnessIdentity;
  StartPoint start = StartPoint::Zero;
  std::uint64_t x0_seed = 0;  // stream seed for the random start point
  bool scaling = false;
  std::optional<double> r0;   // default ||x0|| + 1
  std::optional<double> rho;  // default (1 - k/d)/2, per method rank
  bool record_wall_time = true;
};

struct MethodRun {
  std::string method;
  std::vector<RunRecord> records;
};

inline std::unique_ptr<ObjectiveOracle> make_oracle(const ProblemSpec& spec) {
  struct Builder {
    std::unique_ptr<ObjectiveOracle> operator()(const QuadraticSpec& q) const {
      return std::make_unique<QuadraticOracle>(generate_quadratic(q.n, q.d, q.xi, q.seed));
    }
    std::unique_ptr<ObjectiveOracle> operator()(const SyntheticLogisticSpec& s) const {
      return std::make_unique<LogisticOracle>(
          synthetic_logistic(s.n, s.d, s.seed, s.lambda));
    }
    std::unique_ptr<ObjectiveOracle> operator()(const LogisticFileSpec& f) const {
      return std::make_unique<LogisticOracle>(
          to_logistic(parse_libsvm_file(f.path), f.lambda, f.dim_override));
    }
  };
  return std::visit(Builder{}, spec);
}

/* Runs every configured method against the same problem, start point and
   reference solution.  The random start point draws from stream 100 of
   x0_seed, uniform [-1, 1] per coordinate. */
inline std::vector<MethodRun> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.methods.empty()) throw std::invalid_argument("run_experiment: no methods");
  for (std::size_t a = 0; a < cfg.methods.size(); ++a)
    for (std::size_t b = a + 1; b < cfg.methods.size(); ++b)
      if (cfg.methods[a].label() == cfg.methods[b].label())
        throw std::invalid_argument("run_experiment: duplicate method " + cfg.methods[a].label());

  const std::unique_ptr<ObjectiveOracle> oracle = make_oracle(cfg.problem);
  const int d = oracle->dim();
  for (const MethodSpec& m : cfg.methods)
    if (m.method == Method::LisrK && (m.rank < 1 || m.rank >= d))
      throw std::invalid_argument("run_experiment: rank-k block size must satisfy 1 <= k < d");

  Vector x0 = Vector::Zero(d);
  if (cfg.start == StartPoint::Random) {
    SplitMix64 rng = derive_stream(cfg.x0_seed, 100);
    for (int j = 0; j < d; ++j) x0[j] = rng.uniform(-1.0, 1.0);
  }
  const Vector star = newton_reference(*oracle, x0);

  std::vector<MethodRun> out;
  for (const MethodSpec& m : cfg.methods) {
    SolverConfig sc;
    sc.method = m.method;
    sc.rank = m.rank;
    sc.mode = cfg.mode;
    sc.max_passes = cfg.max_passes;
    sc.tolerance = cfg.tolerance;
    sc.init = cfg.init;
    if (cfg.scaling && m.method != Method::Iqn) {
      const DerivedConstants c = problem_constants(*oracle);
      sc.schedule.enabled = true;
      sc.schedule.M = c.M;
      sc.schedule.L = c.L;
      sc.schedule.r0 = cfg.r0 ? *cfg.r0 : x0.norm() + 1.0;
      sc.schedule.rho =
          cfg.rho ? *cfg.rho : 0.5 * (1.0 - static_cast<double>(effective_rank(sc)) / d);
    }
    try {
      MethodRun mr;
      mr.method = m.label();
      mr.records = run(*oracle, sc, x0, star);
      if (!cfg.record_wall_time)
        for (RunRecord& r : mr.records) r.wall_seconds = 0.0;
      out.push_back(std::move(mr));
    } catch (const std::exception& e) {
      throw std::runtime_error("method " + m.label() + ": " + e.what());
    }
  }
  return out;
}

/* Fixed column set, shortest round-trip decimals, rows sorted by method
   label then pass so identical runs produce identical bytes. */
inline void emit_csv(std::vector<MethodRun> runs, const std::string& path) {
  std::sort(runs.begin(), runs.end(),
            [](const MethodRun& a, const MethodRun& b) { return a.method < b.method; });
  std::ofstream os(path);
  if (!os) throw std::runtime_error("emit_csv: cannot write " + path);
  os << "method,pass,normalized_error,grad_norm,wall_seconds,grad_calls,hess_calls,"
        "skipped_updates\n";
  for (const MethodRun& mr : runs)
    for (const RunRecord& r : mr.records)
      os << mr.method << ',' << r.pass << ',' << detail::format_double(r.normalized_error)
         << ',' << detail::format_double(r.grad_norm) << ','
         << detail::format_double(r.wall_seconds) << ',' << r.grad_calls << ','
         << r.hess_calls << ',' << r.skipped_updates << '\n';
}

/* Gnuplot script drawing one normalized-error series per method on a log
   y axis.  Output depends only on the arguments, so regenerating it is
   byte-stable. */
inline void emit_plot_script(const std::string& csv_path, const std::string& out_path,
                             std::vector<std::string> methods = {"iqn", "lisr1", "lisrk"}) {
  std::sort(methods.begin(), methods.end());
  std::ofstream os(out_path);
  if (!os) throw std::runtime_error("emit_plot_script: cannot write " + out_path);
  os << "# Convergence curves from " << csv_path << "\n";
  os << "set datafile separator ','\n";
  os << "set logscale y\n";
  os << "set xlabel 'effective passes'\n";
  os << "set ylabel 'normalized error'\n";
  os << "set key top right\n";
  os << "set grid\n";
  os << "plot \\\n";
  for (std::size_t m = 0; m < methods.size(); ++m)
    os << "  '" << csv_path << "' using 2:(strcol(1) eq '" << methods[m]
       << "' ? column(3) : NaN) with linespoints title '" << methods[m] << "'"
       << (m + 1 < methods.size() ? ", \\\n" : "\n");
}

}  // namespace lisr
