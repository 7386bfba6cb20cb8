#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lisr/harness.hpp"

namespace {

struct CommonOpts {
  std::string methods = "lisr1,lisrk,iqn";
  int k = 5;
  std::string mode = "lazy";
  long max_passes = 40;
  double tol = 1e-10;
  std::string out;
  std::string plot;
  std::string x0 = "zero";
  std::string scaling = "off";
  std::optional<double> r0;
  std::optional<double> rho;
  std::string timing = "on";
  std::string init = "identity";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--methods", o.methods,
                  "Comma-separated subset of lisr1,lisrk,iqn")
      ->capture_default_str();
  cmd->add_option("--k", o.k, "Update rank for lisrk")->capture_default_str();
  cmd->add_option("--mode", o.mode, "Step implementation")
      ->check(CLI::IsMember({"eager", "lazy"}))
      ->capture_default_str();
  cmd->add_option("--max-passes", o.max_passes, "Effective-pass cap")->capture_default_str();
  cmd->add_option("--tol", o.tol, "Stop when the normalized error falls below this")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "CSV output path");
  cmd->add_option("--plot", o.plot, "Gnuplot script output path (needs --out)");
  cmd->add_option("--x0", o.x0, "Start point")
      ->check(CLI::IsMember({"zero", "random"}))
      ->capture_default_str();
  cmd->add_option("--scaling", o.scaling, "End-of-cycle estimator scaling")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  cmd->add_option("--r0", o.r0, "Scaling radius constant (default ||x0|| + 1)");
  cmd->add_option("--rho", o.rho, "Scaling decay constant (default (1 - k/d)/2)");
  cmd->add_option("--timing", o.timing, "Record wall time in the CSV")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  cmd->add_option("--init", o.init, "Initial estimator")
      ->check(CLI::IsMember({"identity", "hessian"}))
      ->capture_default_str();
}

std::vector<lisr::MethodSpec> parse_methods(const std::string& text, int k) {
  std::vector<lisr::MethodSpec> specs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (tok == "lisr1")
      specs.push_back({lisr::Method::Lisr1, 1});
    else if (tok == "lisrk")
      specs.push_back({lisr::Method::LisrK, k});
    else if (tok == "iqn")
      specs.push_back({lisr::Method::Iqn, 1});
    else
      throw CLI::ValidationError("--methods", "unknown method '" + tok + "'");
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return specs;
}

void apply_common(lisr::ExperimentConfig& cfg, const CommonOpts& o, std::uint64_t seed) {
  cfg.methods = parse_methods(o.methods, o.k);
  cfg.mode = o.mode == "eager" ? lisr::StepMode::Eager : lisr::StepMode::Lazy;
  cfg.max_passes = o.max_passes;
  cfg.tolerance = o.tol;
  cfg.init = o.init == "hessian" ? lisr::EstimatorInit::HessianAtStart
                                 : lisr::EstimatorInit::SmoothnessIdentity;
  cfg.start = o.x0 == "random" ? lisr::StartPoint::Random : lisr::StartPoint::Zero;
  cfg.x0_seed = seed;
  cfg.scaling = o.scaling == "on";
  cfg.r0 = o.r0;
  cfg.rho = o.rho;
  cfg.record_wall_time = o.timing == "on";
}

int run_and_report(const lisr::ExperimentConfig& cfg, const CommonOpts& o) {
  if (!o.plot.empty() && o.out.empty())
    throw CLI::ValidationError("--plot", "requires --out");

  const std::vector<lisr::MethodRun> runs = lisr::run_experiment(cfg);
  for (const lisr::MethodRun& mr : runs) {
    const lisr::RunRecord& last = mr.records.back();
    std::printf("%-6s  passes %3ld  normalized error %.3e  grad calls %ld  skipped %ld\n",
                mr.method.c_str(), last.pass, last.normalized_error, last.grad_calls,
                last.skipped_updates);
  }
  if (!o.out.empty()) lisr::emit_csv(runs, o.out);
  if (!o.plot.empty()) {
    std::vector<std::string> labels;
    for (const lisr::MethodRun& mr : runs) labels.push_back(mr.method);
    lisr::emit_plot_script(o.out, o.plot, labels);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental quasi-Newton experiment runner"};
  app.require_subcommand(1);

  auto* quad = app.add_subcommand("quadratic", "Synthetic diagonal quadratic finite sum");
  int qn = 50, qd = 20;
  double qxi = 4.0;
  std::uint64_t qseed = 42;
  quad->add_option("--n", qn, "Number of components")->capture_default_str();
  quad->add_option("--d", qd, "Dimension (even)")->capture_default_str();
  quad->add_option("--xi", qxi, "Conditioning exponent")->capture_default_str();
  quad->add_option("--seed", qseed, "Generator seed")->capture_default_str();
  CommonOpts qopts;
  add_common(quad, qopts);

  auto* logi = app.add_subcommand("logistic", "Regularized logistic regression");
  int ln = 200, ld = 30, ldim_override = 0;
  double llambda = 1e-3;
  std::uint64_t lseed = 42;
  std::string ldata;
  logi->add_option("--data", ldata, "LIBSVM-format input (omit for a synthetic instance)");
  logi->add_option("--n", ln, "Synthetic instance: number of samples")->capture_default_str();
  logi->add_option("--d", ld, "Synthetic instance: dimension")->capture_default_str();
  logi->add_option("--seed", lseed, "Synthetic generator seed")->capture_default_str();
  logi->add_option("--lambda", llambda, "L2 regularization strength")->capture_default_str();
  logi->add_option("--dim-override", ldim_override,
                   "Feature dimension when the data's max index understates it");
  CommonOpts lopts;
  add_common(logi, lopts);

  CLI11_PARSE(app, argc, argv);

  try {
    lisr::ExperimentConfig cfg;
    if (quad->parsed()) {
      cfg.problem = lisr::QuadraticSpec{qn, qd, qxi, qseed};
      apply_common(cfg, qopts, qseed);
      return run_and_report(cfg, qopts);
    }
    if (ldata.empty())
      cfg.problem = lisr::SyntheticLogisticSpec{ln, ld, lseed, llambda};
    else
      cfg.problem = lisr::LogisticFileSpec{ldata, llambda, ldim_override};
    apply_common(cfg, lopts, lseed);
    return run_and_report(cfg, lopts);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
