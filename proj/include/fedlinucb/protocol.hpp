#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "fedlinucb/bandit.hpp"

namespace fedlinucb {

/// Per-agent state. `sigma`/`b` hold the last downloaded server data, the
/// `_loc` buffers hold observations not yet uploaded.
struct AgentState {
  int id = 1;
  SpdMatrix sigma;
  Vector b;
  Matrix sigma_loc;
  Vector b_loc;
  Vector theta_hat;
  long last_sync_round = 0;

  static AgentState initial(int id, int dim, double lambda);
  [[nodiscard]] int dim() const { return static_cast<int>(sigma.dim()); }
};

struct ServerState {
  SpdMatrix sigma;
  Vector b;
  long upload_count = 0;

  static ServerState initial(int dim, double lambda);
};

/// Full payload of one sync, kept only when debug payloads are requested.
struct SyncPayload {
  Matrix gram;         // uploaded sigma_loc
  Vector target;       // uploaded b_loc
  Matrix sigma_after;  // downloaded server Gram
  Vector theta_after;  // refreshed estimate
};

struct CommEvent {
  long round = 0;
  int agent = 0;
  double det_before = 0.0;  // det(sigma) before the criterion fired
  double det_after = 0.0;   // det(sigma + sigma_loc)
  double payload_checksum = 0.0;
  std::optional<SyncPayload> payload;
};

/// One simulated round as seen from the trace.
struct RoundRecord {
  long t = 0;
  int agent = 0;
  std::size_t arm_index = 0;
  Vector arm;
  double reward = 0.0;
  double inst_regret = 0.0;
  int comm = 0;  // 0 or 2 (one upload plus one download)
  double det_server = 0.0;
};

/// Sum of all Gram and target entries of a payload.
double payload_checksum(const Matrix& gram, const Vector& target);

AgentState local_update(AgentState a, const Vector& x, double r);

/// det(sigma + sigma_loc) > (1 + alpha) det(sigma).
bool should_sync(const AgentState& a, double alpha);

struct SyncResult {
  AgentState agent;
  ServerState server;
  CommEvent event;
};

SyncResult sync(AgentState a, ServerState s, long round, bool keep_payload = false);

using RewardFn = std::function<double(const Vector&)>;

struct StepResult {
  AgentState agent;
  ServerState server;
  RoundRecord record;  // inst_regret is left for the caller
  std::optional<CommEvent> event;
};

/// One round of the active agent: select, observe, accumulate, maybe sync.
StepResult step_agent(AgentState a, ServerState s, const DecisionSet& d_set, const RewardFn& reward_fn,
                      const HyperParams& hp, double beta, long round, bool keep_payload = false);

}  // namespace fedlinucb
