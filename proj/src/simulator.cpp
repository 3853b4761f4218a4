#include "fedlinucb/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "fedlinucb/analysis.hpp"

namespace fedlinucb {

namespace {

struct Activation {
  long round;  // global round index, drives the environment streams
  int agent;   // 1-based agent id
};

SimulationTrace run_core(const ProblemInstance& inst, const std::vector<Activation>& order, int num_agents,
                         const HyperParams& hp, double beta, const RunOptions& opts) {
  hp.validate();
  SimulationTrace trace;
  trace.params = hp;
  trace.num_agents = num_agents;
  trace.dim = inst.dim;
  trace.beta_used = beta;
  trace.records.reserve(order.size());

  std::vector<AgentState> agents;
  agents.reserve(num_agents);
  for (int m = 1; m <= num_agents; ++m) agents.push_back(AgentState::initial(m, inst.dim, hp.lambda));
  ServerState server = ServerState::initial(inst.dim, hp.lambda);

  for (const Activation& act : order) {
    if (act.agent < 1 || act.agent > num_agents) {
      throw std::invalid_argument("run: agent id " + std::to_string(act.agent) + " outside [1, M]");
    }
    const DecisionSet d_set = sample_decision_set(inst, act.round);
    const long round = act.round;
    const RewardFn reward = [&inst, round](const Vector& x) { return sample_reward(inst, round, x); };

    AgentState& slot = agents[act.agent - 1];
    StepResult res = step_agent(std::move(slot), std::move(server), d_set, reward, hp, beta, act.round,
                                opts.record_payloads);
    slot = std::move(res.agent);
    server = std::move(res.server);
    res.record.inst_regret = instantaneous_regret(inst, d_set, res.record.arm_index);
    trace.records.push_back(std::move(res.record));
    if (res.event) trace.events.push_back(std::move(*res.event));
  }
  finalize_trace(trace);
  return trace;
}

}  // namespace

bool SimulationTrace::has_payloads() const {
  if (static_cast<long>(events.size()) * 2 != comm_count) return false;
  return std::all_of(events.begin(), events.end(), [](const CommEvent& e) { return e.payload.has_value(); });
}

void finalize_trace(SimulationTrace& trace) {
  trace.cum_regret.resize(trace.records.size());
  double acc = 0.0;
  long comm = 0;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    acc += trace.records[i].inst_regret;
    trace.cum_regret[i] = acc;
    comm += trace.records[i].comm;
  }
  trace.comm_count = comm;
  trace.switch_count = comm / 2;
  trace.epoch_starts.clear();
  for (const Epoch& e : epoch_boundaries(trace, trace.params.lambda, trace.dim)) trace.epoch_starts.push_back(e.start);
}

SimulationTrace run_fedlinucb(const ProblemInstance& inst, const Schedule& schedule, const HyperParams& hp,
                              const RunOptions& opts) {
  schedule.validate();
  std::vector<Activation> order;
  order.reserve(schedule.agents.size());
  for (std::size_t i = 0; i < schedule.agents.size(); ++i) {
    order.push_back({static_cast<long>(i) + 1, schedule.agents[i]});
  }
  const double beta = compute_beta(inst, hp, schedule.num_agents, std::max<long>(1, schedule.horizon()));
  return run_core(inst, order, schedule.num_agents, hp, beta, opts);
}

std::vector<int> flatten_participation(const std::vector<std::vector<int>>& participation_sets, int num_agents) {
  std::vector<int> flat;
  std::vector<char> seen(static_cast<std::size_t>(num_agents) + 1);
  for (std::size_t k = 0; k < participation_sets.size(); ++k) {
    std::fill(seen.begin(), seen.end(), 0);
    for (int m : participation_sets[k]) {
      if (m < 1 || m > num_agents) {
        throw std::invalid_argument("participation set " + std::to_string(k + 1) + " names agent " +
                                    std::to_string(m) + " outside [1, M]");
      }
      if (seen[m]) {
        throw std::invalid_argument("participation set " + std::to_string(k + 1) + " lists agent " +
                                    std::to_string(m) + " twice");
      }
      seen[m] = 1;
      flat.push_back(m);
    }
  }
  return flat;
}

SimulationTrace run_episodic(const ProblemInstance& inst, const std::vector<std::vector<int>>& participation_sets,
                             int num_agents, const HyperParams& hp, const RunOptions& opts) {
  if (num_agents < 1) throw std::invalid_argument("run_episodic: M must be >= 1");
  hp.validate();
  const std::vector<int> flat = flatten_participation(participation_sets, num_agents);
  const long horizon = static_cast<long>(flat.size());
  const double beta = compute_beta(inst, hp, num_agents, std::max<long>(1, horizon));

  SimulationTrace trace;
  trace.params = hp;
  trace.num_agents = num_agents;
  trace.dim = inst.dim;
  trace.beta_used = beta;
  trace.records.reserve(flat.size());

  std::vector<AgentState> agents;
  agents.reserve(num_agents);
  for (int m = 1; m <= num_agents; ++m) agents.push_back(AgentState::initial(m, inst.dim, hp.lambda));
  ServerState server = ServerState::initial(inst.dim, hp.lambda);

  // Episode k visits the agents of P_k in order; agents outside P_k keep their state.
  long round = 0;
  for (const auto& members : participation_sets) {
    for (int m : members) {
      ++round;
      const DecisionSet d_set = sample_decision_set(inst, round);
      const RewardFn reward = [&inst, round](const Vector& x) { return sample_reward(inst, round, x); };
      AgentState& slot = agents[m - 1];
      StepResult res =
          step_agent(std::move(slot), std::move(server), d_set, reward, hp, beta, round, opts.record_payloads);
      slot = std::move(res.agent);
      server = std::move(res.server);
      res.record.inst_regret = instantaneous_regret(inst, d_set, res.record.arm_index);
      trace.records.push_back(std::move(res.record));
      if (res.event) trace.events.push_back(std::move(*res.event));
    }
  }
  finalize_trace(trace);
  return trace;
}

SimulationTrace run_independent_oful(const ProblemInstance& inst, const Schedule& schedule, const HyperParams& hp,
                                     const RunOptions& opts) {
  schedule.validate();
  hp.validate();
  SimulationTrace merged;
  merged.params = hp;
  merged.num_agents = schedule.num_agents;
  merged.dim = inst.dim;
  merged.records.resize(schedule.agents.size());

  for (int m = 1; m <= schedule.num_agents; ++m) {
    std::vector<Activation> own;
    for (std::size_t i = 0; i < schedule.agents.size(); ++i) {
      if (schedule.agents[i] == m) own.push_back({static_cast<long>(i) + 1, 1});
    }
    if (own.empty()) continue;
    const double beta = compute_beta(inst, hp, 1, static_cast<long>(own.size()));
    SimulationTrace solo = run_core(inst, own, 1, hp, beta, opts);
    merged.beta_used = std::max(merged.beta_used, beta);
    for (RoundRecord& rec : solo.records) {
      rec.agent = m;
      rec.comm = 0;  // no server; policy refreshes stay on the agent
      merged.records[rec.t - 1] = std::move(rec);
    }
  }
  finalize_trace(merged);
  return merged;
}

std::vector<Epoch> epoch_boundaries(const SimulationTrace& trace, double lambda, int dim) {
  std::vector<Epoch> out;
  if (trace.records.empty()) return out;
  const double base = std::pow(lambda, dim);
  long reached = -1;
  for (const RoundRecord& rec : trace.records) {
    long level = 0;
    if (rec.det_server > base) {
      level = static_cast<long>(std::floor(std::log2(rec.det_server / base)));
      while (std::ldexp(base, static_cast<int>(level + 1)) <= rec.det_server) ++level;
      while (level > 0 && std::ldexp(base, static_cast<int>(level)) > rec.det_server) --level;
    }
    for (long i = reached + 1; i <= level; ++i) out.push_back({i, rec.t});
    reached = std::max(reached, level);
  }
  return out;
}

}  // namespace fedlinucb
