#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedlinucb/analysis.hpp"
#include "fedlinucb/config.hpp"

namespace fedlinucb {

/// Column header of the per-round trace CSV.
inline constexpr const char* kTraceCsvHeader = "t,agent,arm_index,reward,inst_regret,cum_regret,comm,det_server";

void write_trace_csv(std::ostream& os, const SimulationTrace& trace);

/// Rebuilds a trace from its CSV; arms are regenerated from the instance.
SimulationTrace read_trace_csv(std::istream& in, const ProblemInstance& inst, const Schedule& schedule,
                               const HyperParams& hp);

/// Summary document with keys total_regret, comm_count, switch_count,
/// beta_used, bound_regret, bound_comm, epoch_starts, config_echo.
nlohmann::ordered_json summary_json(const ExperimentConfig& cfg, const ProblemInstance& inst,
                                    const SimulationTrace& trace);

/// Runs `jobs` indices on up to `parallel` threads; `work(i)` must only touch slot i.
void parallel_for(std::size_t jobs, int parallel, const std::function<void(std::size_t)>& work);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Exit codes shared by the subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAssertion = 3;

int cmd_run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, int parallel, std::ostream& log);

int cmd_sweep(const ExperimentConfig& cfg, const SweepConfig& sweep, const std::filesystem::path& out_dir,
              int parallel, std::ostream& log);

struct BiasDemoRequest {
  long agents = 10000;
  double beta = 0.5;
  double alpha = 10.5;
  std::uint64_t seed = 7;
};

int cmd_bias_demo(const BiasDemoRequest& req, const std::filesystem::path& out_dir, std::ostream& log);

/// Runs every invariant on a fresh run of `cfg`, or on the trace CSV at
/// `trace_path` when given.
int cmd_check(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& trace_path,
              const std::filesystem::path& out_dir, std::ostream& log);

/// Config with one sweep axis set to `value` (alpha default follows M when unset).
ExperimentConfig apply_axis(const ExperimentConfig& cfg, const std::string& axis, double value);

}  // namespace fedlinucb
