#include "fedlinucb/protocol.hpp"

#include <stdexcept>

namespace fedlinucb {

AgentState AgentState::initial(int id, int dim, double lambda) {
  return AgentState{
      .id = id,
      .sigma = SpdMatrix::scaled_identity(dim, lambda),
      .b = Vector::Zero(dim),
      .sigma_loc = Matrix::Zero(dim, dim),
      .b_loc = Vector::Zero(dim),
      .theta_hat = Vector::Zero(dim),
      .last_sync_round = 0,
  };
}

ServerState ServerState::initial(int dim, double lambda) {
  return ServerState{.sigma = SpdMatrix::scaled_identity(dim, lambda), .b = Vector::Zero(dim), .upload_count = 0};
}

double payload_checksum(const Matrix& gram, const Vector& target) { return gram.sum() + target.sum(); }

AgentState local_update(AgentState a, const Vector& x, double r) {
  require_dim(x, a.dim(), "local_update");
  a.sigma_loc.noalias() += x * x.transpose();
  a.b_loc.noalias() += r * x;
  return a;
}

bool should_sync(const AgentState& a, double alpha) {
  const double det_synced = a.sigma.det();
  const double det_combined = SpdMatrix(a.sigma.matrix() + a.sigma_loc).det();
  return det_combined > (1.0 + alpha) * det_synced;
}

SyncResult sync(AgentState a, ServerState s, long round, bool keep_payload) {
  CommEvent ev;
  ev.round = round;
  ev.agent = a.id;
  ev.det_before = a.sigma.det();
  ev.det_after = SpdMatrix(a.sigma.matrix() + a.sigma_loc).det();
  ev.payload_checksum = payload_checksum(a.sigma_loc, a.b_loc);

  // Upload and global update.
  s.sigma = SpdMatrix(s.sigma.matrix() + a.sigma_loc);
  s.b += a.b_loc;
  ++s.upload_count;

  if (keep_payload) {
    ev.payload = SyncPayload{.gram = a.sigma_loc, .target = a.b_loc, .sigma_after = {}, .theta_after = {}};
  }

  // Reset the local buffers, download, refresh the estimate.
  a.sigma_loc.setZero();
  a.b_loc.setZero();
  a.sigma = s.sigma;
  a.b = s.b;
  a.theta_hat = solve_estimate(a.sigma, a.b);
  a.last_sync_round = round;

  if (ev.payload) {
    ev.payload->sigma_after = a.sigma.matrix();
    ev.payload->theta_after = a.theta_hat;
  }
  return SyncResult{std::move(a), std::move(s), std::move(ev)};
}

StepResult step_agent(AgentState a, ServerState s, const DecisionSet& d_set, const RewardFn& reward_fn,
                      const HyperParams& hp, double beta, long round, bool keep_payload) {
  if (d_set.empty()) throw std::invalid_argument("step_agent: empty decision set");

  std::size_t choice = 0;
  if (hp.estimate_mode == EstimateMode::lazy) {
    choice = ucb_select(a.theta_hat, a.sigma, beta, d_set);
  } else {
    const SpdMatrix combined(a.sigma.matrix() + a.sigma_loc);
    const Vector theta = solve_estimate(combined, a.b + a.b_loc);
    choice = ucb_select(theta, combined, beta, d_set);
  }

  const Vector& x = d_set.arms[choice];
  const double r = reward_fn(x);
  a = local_update(std::move(a), x, r);

  RoundRecord rec;
  rec.t = round;
  rec.agent = a.id;
  rec.arm_index = choice;
  rec.arm = x;
  rec.reward = r;

  std::optional<CommEvent> event;
  if (should_sync(a, hp.alpha)) {
    auto res = sync(std::move(a), std::move(s), round, keep_payload);
    a = std::move(res.agent);
    s = std::move(res.server);
    event = std::move(res.event);
    rec.comm = 2;
  }
  rec.det_server = s.sigma.det();
  return StepResult{std::move(a), std::move(s), std::move(rec), std::move(event)};
}

}  // namespace fedlinucb
