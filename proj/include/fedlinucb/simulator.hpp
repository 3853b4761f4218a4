#pragma once

#include <vector>

#include "fedlinucb/environment.hpp"
#include "fedlinucb/protocol.hpp"

namespace fedlinucb {

struct RunOptions {
  /// Keep full upload/download payloads in the event log.
  bool record_payloads = false;
};

struct SimulationTrace {
  std::vector<RoundRecord> records;
  std::vector<double> cum_regret;
  long comm_count = 0;
  long switch_count = 0;
  std::vector<long> epoch_starts;
  double beta_used = 0.0;
  HyperParams params;
  int num_agents = 1;
  int dim = 1;
  std::vector<CommEvent> events;

  [[nodiscard]] long horizon() const { return static_cast<long>(records.size()); }
  [[nodiscard]] double total_regret() const { return cum_regret.empty() ? 0.0 : cum_regret.back(); }
  [[nodiscard]] bool has_payloads() const;
};

struct Epoch {
  long index = 0;
  long start = 0;  // tau_i
};

/// Asynchronous federated LinUCB over the given activation order.
SimulationTrace run_fedlinucb(const ProblemInstance& inst, const Schedule& schedule, const HyperParams& hp,
                              const RunOptions& opts = {});

/// Episodic form: each participation set is processed in its given order and
/// mapped onto consecutive global rounds.
SimulationTrace run_episodic(const ProblemInstance& inst, const std::vector<std::vector<int>>& participation_sets,
                             int num_agents, const HyperParams& hp, const RunOptions& opts = {});

/// Baseline: every agent runs its own single-agent learner on its own rounds.
SimulationTrace run_independent_oful(const ProblemInstance& inst, const Schedule& schedule, const HyperParams& hp,
                                     const RunOptions& opts = {});

/// Every realized epoch index with its first round (tau_0 = 1).
std::vector<Epoch> epoch_boundaries(const SimulationTrace& trace, double lambda, int dim);

/// Flattened activation order of a sequence of participation sets.
std::vector<int> flatten_participation(const std::vector<std::vector<int>>& participation_sets, int num_agents);

/// Fills cum_regret, comm/switch counts and epoch starts from the records.
void finalize_trace(SimulationTrace& trace);

}  // namespace fedlinucb
