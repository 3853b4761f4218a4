#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fedlinucb/simulator.hpp"

namespace fedlinucb {

struct BoundReport {
  std::string name;
  double empirical = 0.0;
  double bound = 0.0;
  bool satisfied = true;  // empirical <= bound
  double slack = 0.0;     // bound - empirical

  static BoundReport make(std::string name, double empirical, double bound);
};

/// max_{x in D_t} <x, theta*> - <x_t, theta*>, clamped at 0 against roundoff.
double instantaneous_regret(const ProblemInstance& inst, const DecisionSet& d_set, std::size_t chosen);
/// Same, for an arm given by value; throws if `chosen` is not in the set.
double instantaneous_regret(const ProblemInstance& inst, const DecisionSet& d_set, const Vector& chosen);

double theoretical_regret_bound(const ProblemInstance& inst, const HyperParams& hp, int num_agents, long horizon,
                                double beta);

double theoretical_comm_bound(int dim, int num_agents, double alpha, double lambda, double L, long horizon);

/// Largest number of syncs allowed in one epoch, M + 1/alpha.
double epoch_sync_bound(int num_agents, double alpha);

/// Communications (0/2 per round) summed inside each epoch [tau_i, tau_{i+1}).
/// Epochs whose start coincides with the next one are empty and reported as 0.
std::vector<long> epoch_comm_counts(const SimulationTrace& trace);

/// State reconstructed from a trace after round `rec.t`.
struct ReplayView {
  const RoundRecord& rec;
  const Matrix& sigma_select;  // agent's synced Gram used for selection in this round
  const std::vector<Matrix>& agent_sigma;
  const std::vector<Matrix>& agent_loc;
  const std::vector<Matrix>& agent_up;  // sum of that agent's uploaded Grams
  const Matrix& server_sigma;
  const Vector& server_b;
  const Matrix& uploaded;   // Gram sent to the server this round (zero without communication)
  const Matrix& sigma_all;  // lambda I + sum_{i<=t} x_i x_i^T
  const Vector& b_all;
  bool criterion_fired;  // determinant criterion recomputed from the replayed buffers
  long last_sync_of_agent;
};

/// Walks the trace, rebuilding every agent, server and global matrix from the
/// recorded arms, rewards and communication flags.
void replay_trace(const SimulationTrace& trace, const std::function<void(const ReplayView&)>& visit);

/// Per-round noise and the global / uploaded / local noise-weighted sums.
struct NoiseLedger {
  std::vector<double> eta;
  std::vector<Vector> u_all;
  std::vector<Vector> u_up;   // per agent, at the end of the trace
  std::vector<Vector> u_loc;  // per agent, at the end of the trace
  double max_decomposition_residual = 0.0;
};

NoiseLedger build_noise_ledger(const SimulationTrace& trace, const ProblemInstance& inst);

/// Sum_t ||x_t||^2_{(Sigma^all_t)^{-1}} against 2 d ln(1 + T L^2 / lambda).
BoundReport elliptical_potential(const SimulationTrace& trace, double L);

struct CoverageReport {
  long local_checks = 0;
  long local_violations = 0;
  double worst_local_ratio = 0.0;  // max ||theta* - theta_hat||_Sigma / beta
  long global_checks = 0;
  long global_violations = 0;
  double worst_global_ratio = 0.0;

  [[nodiscard]] double local_violation_fraction() const;
  [[nodiscard]] double global_violation_fraction() const;
};

/// Requires a trace recorded with payloads; throws std::invalid_argument otherwise.
CoverageReport confidence_coverage(const SimulationTrace& trace, const ProblemInstance& inst, double beta);

struct CovarianceReport {
  BoundReport first;   // lambda I + sum Sigma^up >= Sigma^loc / alpha, every agent, every round
  BoundReport second;  // Sigma_{m,t} >= Sigma^all_t / (1 + M alpha) inside single-agent windows
  double worst_min_eig_first = 0.0;
  double worst_min_eig_second = 0.0;
  long first_checks = 0;
  long second_checks = 0;
};

/// Eigenvalue checks with tolerance `tol` times max(1, ||Sigma^ser||).
CovarianceReport covariance_comparison_check(const SimulationTrace& trace, double alpha, int num_agents,
                                             double tol = 1e-8);

struct BiasDemoResult {
  double predicted_reward_a = 0.0;  // <x_A, Sigma^ser^{-1} b^ser>
  long agents = 0;
  long uploads = 0;
  double upload_fraction = 0.0;
};

/// Two-round agents on the two-arm instance; each uploads only when its
/// criterion fires. `mode` selects eager or lazy selection statistics.
BiasDemoResult bias_demo(long num_agents, double beta, double alpha, std::uint64_t seed,
                         EstimateMode mode = EstimateMode::eager);

struct CheckResult {
  std::string name;
  bool passed = true;
  double worst_slack = 0.0;
  std::string detail;
};

/// Runs every trace invariant. Coverage checks run only when payloads exist.
std::vector<CheckResult> run_invariant_suite(const SimulationTrace& trace, const ProblemInstance& inst);

}  // namespace fedlinucb
