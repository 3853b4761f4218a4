#include "fedlinucb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fedlinucb {

BoundReport BoundReport::make(std::string name, double empirical, double bound) {
  return BoundReport{std::move(name), empirical, bound, empirical <= bound, bound - empirical};
}

double instantaneous_regret(const ProblemInstance& inst, const DecisionSet& d_set, std::size_t chosen) {
  if (chosen >= d_set.size()) throw std::invalid_argument("instantaneous_regret: chosen arm not in decision set");
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& x : d_set.arms) best = std::max(best, x.dot(inst.theta_star));
  return std::max(0.0, best - d_set.arms[chosen].dot(inst.theta_star));
}

double instantaneous_regret(const ProblemInstance& inst, const DecisionSet& d_set, const Vector& chosen) {
  for (std::size_t i = 0; i < d_set.size(); ++i) {
    if (d_set.arms[i].size() == chosen.size() && d_set.arms[i] == chosen) return instantaneous_regret(inst, d_set, i);
  }
  throw std::invalid_argument("instantaneous_regret: chosen arm not in decision set");
}

double theoretical_regret_bound(const ProblemInstance& inst, const HyperParams& hp, int num_agents, long horizon,
                                double beta) {
  if (horizon < 1) throw std::invalid_argument("theoretical_regret_bound: T must be >= 1");
  const double d = inst.dim;
  const double T = static_cast<double>(horizon);
  const double M = num_agents;
  const double log_term = std::log(1.0 + T * inst.L * inst.L / hp.lambda);
  return 2.0 * d * inst.S * inst.L * M * log_term +
         2.0 * std::sqrt(2.0 * (1.0 + M * hp.alpha)) * beta * std::sqrt(2.0 * d * T * log_term);
}

double theoretical_comm_bound(int dim, int num_agents, double alpha, double lambda, double L, long horizon) {
  if (dim < 1 || num_agents < 1 || !(alpha > 0.0) || !(lambda > 0.0) || !(L > 0.0) || horizon < 0) {
    throw std::invalid_argument("theoretical_comm_bound: arguments must be positive");
  }
  const double d = dim;
  const double T = static_cast<double>(horizon);
  return 2.0 * std::numbers::ln2 * d * (num_agents + 1.0 / alpha) * std::log(1.0 + T * L * L / (lambda * d));
}

double epoch_sync_bound(int num_agents, double alpha) { return num_agents + 1.0 / alpha; }

std::vector<long> epoch_comm_counts(const SimulationTrace& trace) {
  const auto epochs = epoch_boundaries(trace, trace.params.lambda, trace.dim);
  std::vector<long> counts(epochs.size(), 0);
  if (epochs.empty()) return counts;
  std::size_t e = 0;
  for (const RoundRecord& rec : trace.records) {
    // Advance to the last epoch that has started by this round.
    while (e + 1 < epochs.size() && epochs[e + 1].start <= rec.t) ++e;
    counts[e] += rec.comm;
  }
  return counts;
}

void replay_trace(const SimulationTrace& trace, const std::function<void(const ReplayView&)>& visit) {
  const int d = trace.dim;
  const int M = trace.num_agents;
  const double lambda = trace.params.lambda;
  const double alpha = trace.params.alpha;
  const Matrix lambda_i = Matrix::Identity(d, d) * lambda;

  std::vector<Matrix> agent_sigma(M, lambda_i);
  std::vector<Matrix> agent_loc(M, Matrix::Zero(d, d));
  std::vector<Matrix> agent_up(M, Matrix::Zero(d, d));
  std::vector<Vector> agent_b_loc(M, Vector::Zero(d));
  std::vector<long> last_sync(M, 0);
  Matrix server = lambda_i;
  Vector server_b = Vector::Zero(d);
  Matrix sigma_all = lambda_i;
  Vector b_all = Vector::Zero(d);
  Matrix sigma_select;
  Matrix uploaded = Matrix::Zero(d, d);

  for (const RoundRecord& rec : trace.records) {
    if (rec.agent < 1 || rec.agent > M) throw std::invalid_argument("replay: agent id outside [1, M]");
    require_dim(rec.arm, d, "replay");
    const int m = rec.agent - 1;
    sigma_select = agent_sigma[m];
    const Matrix outer = rec.arm * rec.arm.transpose();
    agent_loc[m] += outer;
    agent_b_loc[m] += rec.reward * rec.arm;
    sigma_all += outer;
    b_all += rec.reward * rec.arm;

    const double det_synced = SpdMatrix(agent_sigma[m]).det();
    const double det_combined = SpdMatrix(agent_sigma[m] + agent_loc[m]).det();
    const bool fired = det_combined > (1.0 + alpha) * det_synced;

    uploaded.setZero();
    if (rec.comm != 0) {
      uploaded = agent_loc[m];
      server += agent_loc[m];
      server_b += agent_b_loc[m];
      agent_up[m] += agent_loc[m];
      agent_loc[m].setZero();
      agent_b_loc[m].setZero();
      agent_sigma[m] = server;
      last_sync[m] = rec.t;
    }
    visit(ReplayView{rec, sigma_select, agent_sigma, agent_loc, agent_up, server, server_b, uploaded, sigma_all, b_all, fired,
                     last_sync[m]});
  }
}

NoiseLedger build_noise_ledger(const SimulationTrace& trace, const ProblemInstance& inst) {
  const int d = inst.dim;
  NoiseLedger ledger;
  ledger.u_up.assign(trace.num_agents, Vector::Zero(d));
  ledger.u_loc.assign(trace.num_agents, Vector::Zero(d));
  Vector u_all = Vector::Zero(d);
  for (const RoundRecord& rec : trace.records) {
    const int m = rec.agent - 1;
    const double eta = rec.reward - rec.arm.dot(inst.theta_star);
    ledger.eta.push_back(eta);
    u_all += eta * rec.arm;
    ledger.u_loc[m] += eta * rec.arm;
    if (rec.comm != 0) {
      ledger.u_up[m] += ledger.u_loc[m];
      ledger.u_loc[m].setZero();
    }
    Vector parts = Vector::Zero(d);
    for (int k = 0; k < trace.num_agents; ++k) parts += ledger.u_up[k] + ledger.u_loc[k];
    const double resid = (u_all - parts).norm() / std::max(1.0, u_all.norm());
    ledger.max_decomposition_residual = std::max(ledger.max_decomposition_residual, resid);
    ledger.u_all.push_back(u_all);
  }
  return ledger;
}

BoundReport elliptical_potential(const SimulationTrace& trace, double L) {
  double total = 0.0;
  replay_trace(trace, [&](const ReplayView& v) {
    const double n = SpdMatrix(v.sigma_all).inv_norm(v.rec.arm);
    total += n * n;
  });
  const double T = static_cast<double>(trace.horizon());
  const double bound = 2.0 * trace.dim * std::log(1.0 + T * L * L / trace.params.lambda);
  return BoundReport::make("elliptical_potential", total, bound);
}

double CoverageReport::local_violation_fraction() const {
  return local_checks == 0 ? 0.0 : static_cast<double>(local_violations) / static_cast<double>(local_checks);
}

double CoverageReport::global_violation_fraction() const {
  return global_checks == 0 ? 0.0 : static_cast<double>(global_violations) / static_cast<double>(global_checks);
}

CoverageReport confidence_coverage(const SimulationTrace& trace, const ProblemInstance& inst, double beta) {
  if (!trace.has_payloads()) {
    throw std::invalid_argument("confidence_coverage: trace was recorded without debug payloads");
  }
  CoverageReport rep;
  if (trace.records.empty()) return rep;

  auto local = [&](const Matrix& sigma, const Vector& theta) {
    const Vector err = inst.theta_star - theta;
    const double n = std::sqrt(std::max(0.0, err.dot(sigma * err)));
    ++rep.local_checks;
    if (n > beta) ++rep.local_violations;
    rep.worst_local_ratio = std::max(rep.worst_local_ratio, beta > 0.0 ? n / beta : (n > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));
  };
  // Initial estimates theta = 0 against lambda I, then every refreshed estimate.
  const Matrix lambda_i = Matrix::Identity(inst.dim, inst.dim) * trace.params.lambda;
  for (int m = 0; m < trace.num_agents; ++m) local(lambda_i, Vector::Zero(inst.dim));
  for (const CommEvent& ev : trace.events) local(ev.payload->sigma_after, ev.payload->theta_after);

  const double T = static_cast<double>(trace.horizon());
  const double radius =
      inst.R * std::sqrt(inst.dim * std::log((1.0 + T * inst.L * inst.L / trace.params.lambda) / trace.params.delta)) +
      std::sqrt(trace.params.lambda) * inst.S;
  replay_trace(trace, [&](const ReplayView& v) {
    const SpdMatrix all(v.sigma_all);
    const Vector err = all.solve(v.b_all) - inst.theta_star;
    const double n = std::sqrt(std::max(0.0, err.dot(v.sigma_all * err)));
    ++rep.global_checks;
    if (n > radius) ++rep.global_violations;
    rep.worst_global_ratio = std::max(rep.worst_global_ratio, n / radius);
  });
  return rep;
}

CovarianceReport covariance_comparison_check(const SimulationTrace& trace, double alpha, int num_agents,
                                             double tol) {
  CovarianceReport rep;
  double worst_first = std::numeric_limits<double>::infinity();
  double worst_second = std::numeric_limits<double>::infinity();
  double worst_first_scaled = 0.0;
  double worst_second_scaled = 0.0;
  const double shrink = 1.0 / (1.0 + num_agents * alpha);
  int window_agent = 0;

  replay_trace(trace, [&](const ReplayView& v) {
    const double scale = std::max(1.0, v.server_sigma.norm());
    for (const Matrix& loc : v.agent_loc) {
      const double e = min_eigenvalue(v.server_sigma - loc / alpha);
      worst_first = std::min(worst_first, e);
      worst_first_scaled = std::max(worst_first_scaled, -e / scale);
      ++rep.first_checks;
    }
    // Single-agent window: the agent synced at t1, has been the only active
    // agent since, and has not synced again.
    if (v.rec.agent == window_agent && v.rec.comm == 0) {
      const double e = min_eigenvalue(v.sigma_select - shrink * v.sigma_all);
      worst_second = std::min(worst_second, e);
      worst_second_scaled = std::max(worst_second_scaled, -e / std::max(1.0, v.sigma_all.norm()));
      ++rep.second_checks;
    }
    if (v.rec.comm != 0) {
      window_agent = v.rec.agent;
    } else if (v.rec.agent != window_agent) {
      window_agent = 0;
    }
  });

  rep.worst_min_eig_first = rep.first_checks ? worst_first : 0.0;
  rep.worst_min_eig_second = rep.second_checks ? worst_second : 0.0;
  rep.first = BoundReport::make("covariance_comparison", worst_first_scaled, tol);
  rep.second = BoundReport::make("covariance_window", worst_second_scaled, tol);
  return rep;
}

BiasDemoResult bias_demo(long num_agents, double beta, double alpha, std::uint64_t seed, EstimateMode mode) {
  if (num_agents < 0) throw std::invalid_argument("bias_demo: number of agents must be >= 0");
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("bias_demo: beta must lie in [0, 1)");
  // One pull of A gives det 10, A then B gives 11, A twice gives 19: only the
  // last may exceed 1 + alpha.
  if (!(alpha >= 10.0 && alpha < 18.0)) throw std::invalid_argument("bias_demo: alpha must lie in [10, 18)");

  InstanceRequest req;
  req.kind = ArmKind::bias_demo_pair;
  req.seed = seed;
  const ProblemInstance inst = gen_instance(req);

  BiasDemoResult out;
  out.agents = num_agents;
  if (num_agents == 0) return out;

  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(2 * num_agents));
  for (long m = 1; m <= num_agents; ++m) {
    order.push_back(static_cast<int>(m));
    order.push_back(static_cast<int>(m));
  }
  const Schedule sched = gen_schedule(ScheduleKind::explicit_list, static_cast<int>(num_agents),
                                      static_cast<long>(order.size()), seed, std::move(order));
  HyperParams hp;
  hp.lambda = 1.0;
  hp.alpha = alpha;
  hp.delta = 0.5;
  hp.fixed_beta = beta;
  hp.estimate_mode = mode;
  const SimulationTrace trace = run_fedlinucb(inst, sched, hp);

  Matrix server = Matrix::Identity(2, 2);
  Vector server_b = Vector::Zero(2);
  replay_trace(trace, [&](const ReplayView& v) {
    server = v.server_sigma;
    server_b = v.server_b;
  });
  const Vector theta = solve_estimate(SpdMatrix(server), server_b);
  out.predicted_reward_a = inst.arms.fixed_rounds[0][0].dot(theta);
  out.uploads = trace.switch_count;
  out.upload_fraction = static_cast<double>(out.uploads) / static_cast<double>(num_agents);
  return out;
}

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(const SimulationTrace& trace, const ProblemInstance& inst) {
  std::vector<CheckResult> out;
  const auto& hp = trace.params;
  const int M = trace.num_agents;
  const long T = trace.horizon();

  // Communication accounting.
  {
    long recount = 0;
    bool fields_ok = true;
    for (const RoundRecord& r : trace.records) {
      recount += r.comm;
      fields_ok = fields_ok && (r.comm == 0 || r.comm == 2);
    }
    const bool ok = fields_ok && recount == trace.comm_count && 2 * trace.switch_count == trace.comm_count;
    out.push_back({"switch_identity", ok, static_cast<double>(trace.comm_count - 2 * trace.switch_count),
                   "comm_count=" + std::to_string(trace.comm_count) + " switch_count=" +
                       std::to_string(trace.switch_count) + " recount=" + std::to_string(recount)});
  }
  {
    const double bound = theoretical_comm_bound(inst.dim, M, hp.alpha, hp.lambda, inst.L, T);
    const auto r = BoundReport::make("comm_bound", static_cast<double>(trace.comm_count), bound);
    out.push_back({r.name, r.satisfied, r.slack,
                   "comm_count=" + std::to_string(trace.comm_count) + " bound=" + fmt_num(bound)});
  }
  {
    const double bound = 2.0 * epoch_sync_bound(M, hp.alpha);
    long worst = 0;
    const auto counts = epoch_comm_counts(trace);
    for (long c : counts) worst = std::max(worst, c);
    const auto r = BoundReport::make("epoch_comm", static_cast<double>(worst), bound);
    out.push_back({r.name, r.satisfied, r.slack,
                   "epochs=" + std::to_string(counts.size()) + " worst_epoch_comm=" + std::to_string(worst) +
                       " bound=" + fmt_num(bound)});
  }

  // Replay-based protocol checks.
  {
    long trigger_mismatch = 0;
    long first_mismatch = 0;
    long empty_syncs = 0;
    double worst_det_rel = 0.0;
    long det_round = 0;
    double max_arm_norm = 0.0;
    replay_trace(trace, [&](const ReplayView& v) {
      const bool synced = v.rec.comm != 0;
      if (synced != v.criterion_fired) {
        if (!trigger_mismatch) first_mismatch = v.rec.t;
        ++trigger_mismatch;
      }
      if (synced && v.uploaded.isZero(0.0)) ++empty_syncs;
      const double det = SpdMatrix(v.server_sigma).det();
      const double rel = std::abs(det - v.rec.det_server) / std::max(1.0, std::abs(det));
      if (rel > worst_det_rel) {
        worst_det_rel = rel;
        det_round = v.rec.t;
      }
      max_arm_norm = std::max(max_arm_norm, v.rec.arm.norm());
    });
    out.push_back({"trigger_criterion", trigger_mismatch == 0, -static_cast<double>(trigger_mismatch),
                   trigger_mismatch ? "mismatches=" + std::to_string(trigger_mismatch) + " first_round=" +
                                          std::to_string(first_mismatch)
                                    : "communication happens exactly when the determinant criterion fires"});
    out.push_back({"no_empty_sync", empty_syncs == 0, -static_cast<double>(empty_syncs),
                   "empty_syncs=" + std::to_string(empty_syncs)});
    out.push_back({"conservation", worst_det_rel <= 1e-8, 1e-8 - worst_det_rel,
                   "worst relative det_server error=" + fmt_num(worst_det_rel) +
                       (det_round ? " at round " + std::to_string(det_round) : "")});
    out.push_back({"arm_norm", max_arm_norm <= inst.L * (1.0 + 1e-12), inst.L - max_arm_norm,
                   "max ||x_t||=" + fmt_num(max_arm_norm)});
  }
  {
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (const CommEvent& ev : trace.events) {
      const double s = ev.det_after - (1.0 + hp.alpha) * ev.det_before;
      worst = std::min(worst, s);
      ok = ok && s > 0.0;
    }
    out.push_back({"event_criterion", ok, trace.events.empty() ? 0.0 : worst,
                   "events=" + std::to_string(trace.events.size())});
  }
  {
    bool ok = true;
    double worst = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
      worst = std::min(worst, trace.records[i].inst_regret);
      if (trace.records[i].inst_regret < 0.0 || trace.cum_regret[i] < prev) ok = false;
      prev = trace.cum_regret[i];
    }
    out.push_back({"nonnegative_regret", ok, worst, "cumulative regret is nondecreasing"});
  }
  {
    const auto r = elliptical_potential(trace, inst.L);
    out.push_back({r.name, r.empirical <= r.bound + 1e-6, r.slack,
                   "sum=" + fmt_num(r.empirical) + " bound=" + fmt_num(r.bound)});
  }
  {
    const auto c = covariance_comparison_check(trace, hp.alpha, M);
    out.push_back({c.first.name, c.first.satisfied, c.worst_min_eig_first,
                   "checks=" + std::to_string(c.first_checks) + " worst_min_eig=" + fmt_num(c.worst_min_eig_first)});
    out.push_back({c.second.name, c.second.satisfied, c.worst_min_eig_second,
                   "checks=" + std::to_string(c.second_checks) + " worst_min_eig=" +
                       fmt_num(c.worst_min_eig_second)});
  }
  {
    const auto ledger = build_noise_ledger(trace, inst);
    out.push_back({"noise_ledger", ledger.max_decomposition_residual <= 1e-9,
                   1e-9 - ledger.max_decomposition_residual,
                   "max residual=" + fmt_num(ledger.max_decomposition_residual)});
  }

  const bool auto_beta = !hp.fixed_beta.has_value();
  if (auto_beta && T > 0) {
    const double bound = theoretical_regret_bound(inst, hp, M, T, trace.beta_used);
    const auto r = BoundReport::make("regret_bound", trace.total_regret(), bound);
    out.push_back({r.name, r.satisfied, r.slack,
                   "regret=" + fmt_num(r.empirical) + " bound=" + fmt_num(bound)});
  }
  if (auto_beta && trace.has_payloads()) {
    const auto cov = confidence_coverage(trace, inst, trace.beta_used);
    out.push_back({"local_confidence", cov.local_violations == 0, 1.0 - cov.worst_local_ratio,
                   "checks=" + std::to_string(cov.local_checks) + " violations=" +
                       std::to_string(cov.local_violations) + " worst_ratio=" + fmt_num(cov.worst_local_ratio)});
    out.push_back({"global_confidence", cov.global_violations == 0, 1.0 - cov.worst_global_ratio,
                   "checks=" + std::to_string(cov.global_checks) + " violations=" +
                       std::to_string(cov.global_violations) + " worst_ratio=" + fmt_num(cov.worst_global_ratio)});
  }
  return out;
}

}  // namespace fedlinucb
