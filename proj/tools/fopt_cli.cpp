// Command-line driver: experiment configs in, CSV tables out.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fopt/experiment.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<std::string> out;
  std::optional<std::string> convention;
  std::optional<std::string> sum_convention;
  std::optional<double> tolerance;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("--seed", o.seed, "override config seed");
  cmd->add_option("--paths", o.paths, "override config n_paths");
  cmd->add_option("--out", o.out, "override output CSV path");
  cmd->add_option("--convention", o.convention,
                  "crossing-index convention: proof|statement");
  cmd->add_option("--sum-convention", o.sum_convention,
                  "empty-sum convention: standard|paper");
  cmd->add_option("--tolerance", o.tolerance, "compare |z| tolerance");
  cmd->add_option("--threads", o.threads, "worker threads (0 = auto)");
}

int run(fopt::RunMode mode, const CliOverrides& o) {
  fopt::ExperimentConfig cfg = fopt::load_config(o.config_path);
  cfg.mode = mode;
  if (o.seed) cfg.seed = *o.seed;
  if (o.paths) cfg.n_paths = *o.paths;
  if (o.out) cfg.output = *o.out;
  if (o.threads) cfg.threads = *o.threads;
  if (o.tolerance) {
    if (*o.tolerance <= 0) throw fopt::ConfigError("tolerance: must be > 0");
    cfg.tolerance = *o.tolerance;
  }
  if (o.convention) {
    if (*o.convention == "proof") cfg.convention = fopt::IndexConvention::Proof;
    else if (*o.convention == "statement")
      cfg.convention = fopt::IndexConvention::Statement;
    else throw fopt::ConfigError("convention: expected 'proof' or 'statement'");
  }
  if (o.sum_convention) {
    if (*o.sum_convention == "standard")
      cfg.sum_convention = fopt::SumConvention::Standard;
    else if (*o.sum_convention == "paper")
      cfg.sum_convention = fopt::SumConvention::Paper;
    else throw fopt::ConfigError("sum_convention: expected 'standard' or 'paper'");
  }
  int code = fopt::run_config(cfg);
  if (mode == fopt::RunMode::ValidateConfig) {
    std::cout << "config ok\n";
  } else {
    std::cout << "wrote " << cfg.output << "\n";
    if (code == fopt::kCompareFailed)
      std::cerr << "comparison failed: |z| above tolerance, see "
                << cfg.output << "\n";
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first-observed-passage toolkit for cumulative network damage"};
  app.require_subcommand(1);

  CliOverrides o;
  auto* sim = app.add_subcommand("simulate", "aggregate path statistics");
  auto* ev = app.add_subcommand("eval", "analytic evaluation of a query");
  auto* cmp = app.add_subcommand("compare", "analytic vs Monte Carlo with z-scores");
  auto* swp = app.add_subcommand("sweep", "Monte Carlo sweep over a parameter grid");
  auto* val = app.add_subcommand("validate-config", "check a config and exit");
  for (auto* c : {sim, ev, cmp, swp, val}) add_common(c, o);

  CLI11_PARSE(app, argc, argv);

  fopt::RunMode mode = fopt::RunMode::Simulate;
  if (app.got_subcommand(ev)) mode = fopt::RunMode::Eval;
  else if (app.got_subcommand(cmp)) mode = fopt::RunMode::Compare;
  else if (app.got_subcommand(swp)) mode = fopt::RunMode::Sweep;
  else if (app.got_subcommand(val)) mode = fopt::RunMode::ValidateConfig;

  try {
    return run(mode, o);
  } catch (const fopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return fopt::kConfigError;
  } catch (const fopt::NotReachedError& e) {
    std::cerr << "simulation horizon error: " << e.what() << "\n";
    return fopt::kHorizonError;
  } catch (const fopt::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return fopt::kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fopt::kNumericError;
  }
}
