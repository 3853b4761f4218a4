// fedlinucb command line: run, sweep, bias-demo, check.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedlinucb/experiment.hpp"

namespace {

std::optional<fedlinucb::ExperimentConfig> load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  try {
    auto cfg = fedlinucb::ExperimentConfig::load(path);
    if (seed) {
      cfg.instance.seed = *seed;
      cfg.schedule.seed = *seed;
    }
    return cfg;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return std::nullopt;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fedlinucb;
  CLI::App app{"Asynchronous federated linear bandit simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int parallel = 1;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "experiment config (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override instance and schedule seeds");
    sub->add_option("--parallel", parallel, "worker threads for replications")->check(CLI::PositiveNumber);
  };

  auto* run = app.add_subcommand("run", "single experiment: trace CSV and summary JSON");
  add_common(run, true);

  auto* sweep = app.add_subcommand("sweep", "vary one axis and aggregate replications");
  add_common(sweep, true);
  std::string axis;
  std::vector<double> values;
  bool baseline = false;
  sweep->add_option("--axis", axis, "T, M, alpha or d");
  sweep->add_option("--values", values, "comma-separated axis values")->delimiter(',');
  sweep->add_flag("--baseline", baseline, "also run independent single-agent learners");

  auto* demo = app.add_subcommand("bias-demo", "predicted reward of arm A under eager and lazy estimates");
  BiasDemoRequest req;
  demo->add_option("--agents", req.agents, "number of two-round agents")->check(CLI::NonNegativeNumber);
  demo->add_option("--beta", req.beta, "fixed confidence radius, below 1");
  demo->add_option("--alpha", req.alpha, "criterion threshold in [10, 18)");
  demo->add_option("--seed", req.seed, "noise seed");
  demo->add_option("--out", out_dir, "output directory");

  auto* check = app.add_subcommand("check", "run every trace invariant and report worst slacks");
  add_common(check, true);
  std::string trace_path;
  check->add_option("--trace", trace_path, "check this trace CSV instead of a fresh run")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*demo) return cmd_bias_demo(req, out_dir, std::cout);

  const auto cfg = load_config(config_path, seed);
  if (!cfg) return kExitConfig;

  if (*run) return cmd_run(*cfg, out_dir, parallel, std::cout);
  if (*sweep) {
    SweepConfig sw = cfg->sweep.value_or(SweepConfig{});
    if (!axis.empty()) sw.axis = axis;
    if (!values.empty()) sw.values = values;
    if (baseline) sw.baseline = true;
    return cmd_sweep(*cfg, sw, out_dir, parallel, std::cout);
  }
  std::optional<std::filesystem::path> trace;
  if (!trace_path.empty()) trace = trace_path;
  return cmd_check(*cfg, trace, out_dir, std::cout);
}
