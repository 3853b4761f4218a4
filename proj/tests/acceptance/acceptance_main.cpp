// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fedlinucb/analysis.hpp"
#include "fedlinucb/experiment.hpp"
#include "fedlinucb/rng.hpp"

using namespace fedlinucb;

namespace {

using Clock = std::chrono::steady_clock;

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ProblemInstance sphere(int d, int k, std::uint64_t seed) {
  InstanceRequest r;
  r.kind = ArmKind::random_sphere;
  r.dim = d;
  r.arms_per_round = k;
  r.S = r.L = r.R = 1.0;
  r.seed = seed;
  return gen_instance(r);
}

int failures = 0;
std::map<int, std::string> lines;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  lines[id] = std::string(pass ? "[PASS]" : "[FAIL]") + " criterion " + std::to_string(id) + " " + name + ": " + detail;
  if (!pass) ++failures;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Shared tallies for the trace-wide criteria 3 and 6.
struct TraceTally {
  std::mutex mu;
  long traces = 0;
  long switch_violations = 0;
  long potential_violations = 0;
  double worst_potential_slack = INFINITY;

  void add(const SimulationTrace& tr, double L) {
    const bool sw = 2 * tr.switch_count == tr.comm_count;
    const auto ep = elliptical_potential(tr, L);
    std::lock_guard lock(mu);
    ++traces;
    switch_violations += !sw;
    potential_violations += ep.empirical > ep.bound + 1e-6;
    worst_potential_slack = std::min(worst_potential_slack, ep.slack);
  }
} tally;

bool identical(const SimulationTrace& a, const SimulationTrace& b) {
  if (a.horizon() != b.horizon() || a.events.size() != b.events.size()) return false;
  for (long i = 0; i < a.horizon(); ++i) {
    const RoundRecord &x = a.records[i], &y = b.records[i];
    if (x.t != y.t || x.agent != y.agent || x.arm_index != y.arm_index || x.arm != y.arm || x.reward != y.reward ||
        x.inst_regret != y.inst_regret || x.comm != y.comm || x.det_server != y.det_server)
      return false;
  }
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const CommEvent &x = a.events[i], &y = b.events[i];
    if (x.round != y.round || x.agent != y.agent || x.det_before != y.det_before || x.det_after != y.det_after ||
        x.payload_checksum != y.payload_checksum)
      return false;
  }
  return a.cum_regret == b.cum_regret && a.comm_count == b.comm_count && a.epoch_starts == b.epoch_starts &&
         a.beta_used == b.beta_used;
}

void communication_grid() {
  struct Run {
    int d, M;
    long T;
    ScheduleKind kind;
    std::uint64_t seed;
    long comm = 0;
    double bound = 0;
    long worst_epoch = 0;
    double epoch_bound = 0;
  };
  std::vector<Run> runs;
  // Two iid-uniform draws per cell; block schedules need M | T, which fails for M = 16, T = 1000.
  const ScheduleKind kinds[] = {ScheduleKind::round_robin, ScheduleKind::iid_uniform, ScheduleKind::iid_uniform};
  std::uint64_t seed = 100;
  for (int d : {2, 8})
    for (int M : {1, 4, 16})
      for (long T : {1000L, 10000L})
        for (ScheduleKind k : kinds) runs.push_back({d, M, T, k, seed++});

  std::vector<double> cell_seconds(runs.size());
  const auto t0 = Clock::now();
  parallel_for(runs.size(), threads(), [&](std::size_t i) {
    const auto start = Clock::now();
    Run& r = runs[i];
    const ProblemInstance inst = sphere(r.d, 10, r.seed);
    HyperParams hp;
    hp.lambda = 1.0;
    hp.alpha = 1.0 / (static_cast<double>(r.M) * r.M);
    hp.delta = 0.01;
    const Schedule sched = gen_schedule(r.kind, r.M, r.T, r.seed);
    const SimulationTrace tr = run_fedlinucb(inst, sched, hp);
    r.comm = tr.comm_count;
    r.bound = theoretical_comm_bound(r.d, r.M, hp.alpha, hp.lambda, inst.L, r.T);
    for (long c : epoch_comm_counts(tr)) r.worst_epoch = std::max(r.worst_epoch, c);
    r.epoch_bound = 2.0 * epoch_sync_bound(r.M, hp.alpha);
    tally.add(tr, inst.L);
    cell_seconds[i] = seconds_since(start);
  });

  long comm_violations = 0, epoch_violations = 0;
  double worst_ratio = 0, worst_epoch_ratio = 0, slowest = 0;
  std::string worst_cell;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Run& r = runs[i];
    const double ratio = static_cast<double>(r.comm) / r.bound;
    if (static_cast<double>(r.comm) > r.bound) {
      ++comm_violations;
      std::printf("  comm bound exceeded: d=%d M=%d T=%ld schedule=%s comm=%ld bound=%s\n", r.d, r.M, r.T,
                  std::string(to_string(r.kind)).c_str(), r.comm, num(r.bound).c_str());
    }
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_cell = "d=" + std::to_string(r.d) + " M=" + std::to_string(r.M) + " T=" + std::to_string(r.T) + " " +
                   std::string(to_string(r.kind));
    }
    epoch_violations += static_cast<double>(r.worst_epoch) > r.epoch_bound;
    worst_epoch_ratio = std::max(worst_epoch_ratio, static_cast<double>(r.worst_epoch) / r.epoch_bound);
    slowest = std::max(slowest, cell_seconds[i]);
  }
  // A grid cell is one (d, M, T) triple covering three schedules.
  const double cell_time_bound = 60.0;
  const double slowest_cell = slowest * 3;
  report(1, "communication bound", comm_violations == 0 && slowest_cell < cell_time_bound,
         std::to_string(runs.size()) + " runs, violations=" + std::to_string(comm_violations) +
             ", worst comm/bound=" + num(worst_ratio) + " (" + worst_cell + "), slowest cell <= " +
             num(slowest_cell) + " s, grid wall time " + num(seconds_since(t0)) + " s");
  report(2, "per-epoch communication", epoch_violations == 0,
         std::to_string(runs.size()) + " runs, violations=" + std::to_string(epoch_violations) +
             ", worst epoch comm/bound=" + num(worst_epoch_ratio));
}

void coverage_and_regret() {
  const int reps = 200;
  const int d = 4, M = 4;
  const long T = 2000;
  std::vector<char> covered(reps), within(reps);
  std::vector<double> worst_ratio(reps);
  const auto t0 = Clock::now();
  parallel_for(reps, threads(), [&](std::size_t i) {
    const std::uint64_t seed = rng::replication_seed(4242, i);
    const ProblemInstance inst = sphere(d, 10, seed);
    HyperParams hp = HyperParams::defaults_for(M, inst.S);
    hp.delta = 0.1;
    RunOptions opts;
    opts.record_payloads = true;
    const SimulationTrace tr =
        run_fedlinucb(inst, gen_schedule(ScheduleKind::iid_uniform, M, T, seed), hp, opts);
    const CoverageReport cov = confidence_coverage(tr, inst, tr.beta_used);
    covered[i] = cov.local_violations == 0;
    worst_ratio[i] = cov.worst_local_ratio;
    within[i] = tr.total_regret() <= theoretical_regret_bound(inst, hp, M, T, tr.beta_used);
    tally.add(tr, inst.L);
  });
  const double elapsed = seconds_since(t0);
  const long bad_runs = std::count(covered.begin(), covered.end(), 0);
  const double frac = static_cast<double>(bad_runs) / reps;
  report(4, "confidence coverage", frac <= 0.15 && elapsed < 300,
         "runs with a violation " + std::to_string(bad_runs) + "/200 (fraction " + num(frac) +
             " <= 0.15), worst ||theta*-theta_hat||/beta=" +
             num(*std::max_element(worst_ratio.begin(), worst_ratio.end())) + ", " + num(elapsed) + " s");

  const long ok_runs = std::count(within.begin(), within.end(), 1);
  const double ok_frac = static_cast<double>(ok_runs) / reps;

  const std::vector<long> horizons{1000, 4000, 16000};
  const int slope_reps = 30;
  std::vector<double> regret(horizons.size() * slope_reps);
  parallel_for(regret.size(), threads(), [&](std::size_t j) {
    const long Th = horizons[j / slope_reps];
    const std::uint64_t seed = rng::replication_seed(777, j % slope_reps);
    const ProblemInstance inst = sphere(d, 10, seed);
    HyperParams hp = HyperParams::defaults_for(M, inst.S);
    hp.delta = 0.1;
    const SimulationTrace tr = run_fedlinucb(inst, gen_schedule(ScheduleKind::iid_uniform, M, Th, seed), hp);
    regret[j] = tr.total_regret();
    tally.add(tr, inst.L);
  });
  std::vector<double> xs, ys;
  std::string means;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    double m = 0;
    for (int r = 0; r < slope_reps; ++r) m += regret[h * slope_reps + r] / slope_reps;
    xs.push_back(static_cast<double>(horizons[h]));
    ys.push_back(m);
    means += (h ? ", " : "") + std::string("T=") + std::to_string(horizons[h]) + ":" + num(m);
  }
  const double slope = loglog_slope(xs, ys);
  report(5, "regret bound and scaling", ok_frac >= 0.85 && slope >= 0.4 && slope <= 0.65,
         "within bound " + std::to_string(ok_runs) + "/200 (" + num(ok_frac) + " >= 0.85); mean regret " + means +
             "; log-log slope " + num(slope) + " in [0.4, 0.65]");
}

void covariance_block() {
  const int reps = 10;
  std::vector<double> worst(reps);
  std::vector<long> checks(reps);
  std::vector<char> ok(reps);
  parallel_for(reps, threads(), [&](std::size_t i) {
    const std::uint64_t seed = rng::replication_seed(9090, i);
    const ProblemInstance inst = sphere(4, 10, seed);
    const HyperParams hp = HyperParams::defaults_for(4, inst.S);
    RunOptions opts;
    opts.record_payloads = true;
    const SimulationTrace tr = run_fedlinucb(inst, gen_schedule(ScheduleKind::block, 4, 4000, seed), hp, opts);
    const CovarianceReport c = covariance_comparison_check(tr, hp.alpha, 4, 1e-8);
    worst[i] = c.worst_min_eig_first;
    checks[i] = c.first_checks;
    ok[i] = c.worst_min_eig_first >= -1e-8;
    tally.add(tr, inst.L);
  });
  const long violations = std::count(ok.begin(), ok.end(), 0);
  long total_checks = 0;
  for (long c : checks) total_checks += c;
  report(7, "covariance comparison", violations == 0,
         "10 block-schedule runs, " + std::to_string(total_checks) + " (agent, round) checks, worst min eigenvalue " +
             num(*std::min_element(worst.begin(), worst.end())) + " >= -1e-8");
}

void bias() {
  const auto t0 = Clock::now();
  const BiasDemoResult eager = bias_demo(10000, 0.5, 10.5, 7, EstimateMode::eager);
  const BiasDemoResult lazy = bias_demo(10000, 0.5, 10.5, 7, EstimateMode::lazy);
  const double elapsed = seconds_since(t0);
  const bool pass =
      std::abs(eager.predicted_reward_a - 0.5) <= 0.05 && std::abs(lazy.predicted_reward_a) <= 0.05 && elapsed < 30;
  report(8, "bias demonstration", pass,
         "eager " + num(eager.predicted_reward_a) + " (upload fraction " + num(eager.upload_fraction) + "), lazy " +
             num(lazy.predicted_reward_a) + " (upload fraction " + num(lazy.upload_fraction) + "), " + num(elapsed) +
             " s");
}

void equivalence() {
  int matched = 0;
  for (std::uint64_t c = 0; c < 5; ++c) {
    rng::CounterStream s(2718, rng::Stream::replication, c);
    const int d = 1 + static_cast<int>(s.below(6));
    const int M = 1 + static_cast<int>(s.below(8));
    const long T = 200 + static_cast<long>(s.below(1500));
    const ProblemInstance inst = sphere(d, 2 + static_cast<int>(s.below(10)), s.next_u64());
    HyperParams hp = HyperParams::defaults_for(M, 1.0);
    hp.alpha = 0.02 + s.uniform();
    const Schedule sched = gen_schedule(ScheduleKind::iid_uniform, M, T, s.next_u64());
    std::vector<std::vector<int>> sets;
    for (int m : sched.agents) sets.push_back({m});
    RunOptions opts;
    opts.record_payloads = true;
    const SimulationTrace a = run_episodic(inst, sets, M, hp, opts);
    const SimulationTrace b = run_fedlinucb(inst, sched, hp, opts);
    matched += identical(a, b);
    tally.add(a, inst.L);
  }
  report(9, "algorithm equivalence", matched == 5, std::to_string(matched) + "/5 random configurations bit-identical");
}

void baseline() {
  const int reps = 20;
  std::vector<double> fed(reps), solo(reps);
  parallel_for(reps, threads(), [&](std::size_t i) {
    const std::uint64_t seed = rng::replication_seed(31337, i);
    const ProblemInstance inst = sphere(4, 10, seed);
    const HyperParams hp = HyperParams::defaults_for(8, inst.S);
    const Schedule sched = gen_schedule(ScheduleKind::iid_uniform, 8, 8000, seed);
    const SimulationTrace f = run_fedlinucb(inst, sched, hp);
    const SimulationTrace o = run_independent_oful(inst, sched, hp);
    fed[i] = f.total_regret();
    solo[i] = o.total_regret();
    tally.add(f, inst.L);
    tally.add(o, inst.L);
  });
  double mf = 0, mo = 0;
  for (int i = 0; i < reps; ++i) {
    mf += fed[i] / reps;
    mo += solo[i] / reps;
  }
  report(10, "baseline separation", mf < mo,
         "mean regret FedLinUCB " + num(mf) + " vs independent " + num(mo) + ", gap " + num(mo - mf) + " (" +
             num(100.0 * (mo - mf) / mo) + "% of independent)");
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  communication_grid();
  coverage_and_regret();
  covariance_block();
  bias();
  equivalence();
  baseline();
  report(3, "switching identity", tally.switch_violations == 0,
         std::to_string(tally.traces) + " traces, violations=" + std::to_string(tally.switch_violations));
  report(6, "elliptical potential", tally.potential_violations == 0,
         std::to_string(tally.traces) + " traces, violations=" + std::to_string(tally.potential_violations) +
             ", smallest slack " + num(tally.worst_potential_slack));
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("acceptance: %d failing criteria, %s s\n", failures, num(seconds_since(t0)).c_str());
  return failures == 0 ? 0 : 1;
}
