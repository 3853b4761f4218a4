#include "fedlinucb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fedlinucb/numfmt.hpp"

namespace fedlinucb {

namespace fs = std::filesystem;

namespace {

struct RunOutput {
  ProblemInstance inst;
  SimulationTrace trace;
};

RunOutput run_replication(const ExperimentConfig& cfg, int rep, bool payloads = false) {
  ProblemInstance inst = cfg.build_instance(rep);
  const Schedule sched = cfg.build_schedule(rep);
  RunOptions opts;
  opts.record_payloads = payloads;
  SimulationTrace trace = run_fedlinucb(inst, sched, cfg.resolved_params(), opts);
  return {std::move(inst), std::move(trace)};
}

double bound_comm_of(const ProblemInstance& inst, const SimulationTrace& trace) {
  return theoretical_comm_bound(inst.dim, trace.num_agents, trace.params.alpha, trace.params.lambda, inst.L,
                                trace.horizon());
}

double bound_regret_of(const ProblemInstance& inst, const SimulationTrace& trace) {
  if (trace.horizon() < 1) return 0.0;
  return theoretical_regret_bound(inst, trace.params, trace.num_agents, trace.horizon(), trace.beta_used);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void prepare_out_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
}

fs::path numbered(const std::string& name, int rep, int reps) {
  if (reps == 1) return name;
  const fs::path p(name);
  return p.stem().string() + "_" + std::to_string(rep) + p.extension().string();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  return out;
}

std::string axis_value(const std::string& axis, double v) {
  return axis == "alpha" ? format_number(v) : std::to_string(std::llround(v));
}

template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    log << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace

void write_trace_csv(std::ostream& os, const SimulationTrace& trace) {
  os << kTraceCsvHeader << '\n';
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const RoundRecord& r = trace.records[i];
    os << r.t << ',' << r.agent << ',' << r.arm_index << ',' << format_number(r.reward) << ','
       << format_number(r.inst_regret) << ',' << format_number(trace.cum_regret[i]) << ',' << r.comm << ','
       << format_number(r.det_server) << '\n';
  }
}

SimulationTrace read_trace_csv(std::istream& in, const ProblemInstance& inst, const Schedule& schedule,
                               const HyperParams& hp) {
  SimulationTrace trace;
  trace.params = hp;
  trace.num_agents = schedule.num_agents;
  trace.dim = inst.dim;
  trace.beta_used = compute_beta(inst, hp, schedule.num_agents, std::max<long>(1, schedule.horizon()));

  std::string line;
  if (!std::getline(in, line) || line != kTraceCsvHeader) {
    throw std::invalid_argument("trace csv: missing or unexpected header");
  }
  long expected_t = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 8) throw std::invalid_argument("trace csv row " + std::to_string(expected_t) + ": expected 8 columns");
    RoundRecord rec;
    try {
      rec.t = std::stol(cells[0]);
      rec.agent = std::stoi(cells[1]);
      rec.arm_index = static_cast<std::size_t>(std::stoul(cells[2]));
      rec.reward = std::stod(cells[3]);
      rec.inst_regret = std::stod(cells[4]);
      rec.comm = std::stoi(cells[6]);
      rec.det_server = std::stod(cells[7]);
    } catch (const std::exception&) {
      throw std::invalid_argument("trace csv row " + std::to_string(expected_t) + ": malformed value");
    }
    if (rec.t != expected_t) throw std::invalid_argument("trace csv: rounds must be consecutive from 1");
    if (rec.agent < 1 || rec.agent > schedule.num_agents) {
      throw std::invalid_argument("trace csv row " + std::to_string(rec.t) + ": agent outside [1, M]");
    }
    const DecisionSet d_set = sample_decision_set(inst, rec.t);
    if (rec.arm_index >= d_set.size()) {
      throw std::invalid_argument("trace csv row " + std::to_string(rec.t) + ": arm index out of range");
    }
    rec.arm = d_set.arms[rec.arm_index];
    trace.records.push_back(std::move(rec));
    ++expected_t;
  }
  if (trace.horizon() != schedule.horizon()) {
    throw std::invalid_argument("trace csv: " + std::to_string(trace.horizon()) + " rows, schedule has T = " +
                                std::to_string(schedule.horizon()));
  }
  finalize_trace(trace);
  return trace;
}

nlohmann::ordered_json summary_json(const ExperimentConfig& cfg, const ProblemInstance& inst,
                                    const SimulationTrace& trace) {
  nlohmann::ordered_json j;
  j["total_regret"] = trace.total_regret();
  j["comm_count"] = trace.comm_count;
  j["switch_count"] = trace.switch_count;
  j["beta_used"] = trace.beta_used;
  j["bound_regret"] = bound_regret_of(inst, trace);
  j["bound_comm"] = bound_comm_of(inst, trace);
  j["epoch_starts"] = trace.epoch_starts;
  j["config_echo"] = cfg.echo();
  return j;
}

void parallel_for(std::size_t jobs, int parallel, const std::function<void(std::size_t)>& work) {
  const std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, parallel)), 1, std::max<std::size_t>(1, jobs));
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t k = 0; k < threads; ++k) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) {
        try {
          work(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 paired points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("loglog_slope: x values must differ");
  return sxy / sxx;
}

ExperimentConfig apply_axis(const ExperimentConfig& cfg, const std::string& axis, double value) {
  ExperimentConfig c = cfg;
  c.sweep.reset();
  if (axis == "T") {
    c.schedule.T = static_cast<long>(std::llround(value));
  } else if (axis == "M") {
    c.schedule.M = static_cast<int>(std::llround(value));
  } else if (axis == "alpha") {
    c.params.alpha = value;
  } else if (axis == "d") {
    c.instance.d = static_cast<int>(std::llround(value));
  } else {
    throw ConfigError("unknown sweep axis: " + axis);
  }
  return c;
}

int cmd_run(const ExperimentConfig& cfg, const fs::path& out_dir, int parallel, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    prepare_out_dir(out_dir);
    const int reps = cfg.replications;
    std::vector<std::string> traces(reps), summaries(reps);
    std::vector<bool> comm_ok(reps, true);
    std::vector<std::string> lines(reps);
    parallel_for(static_cast<std::size_t>(reps), parallel, [&](std::size_t i) {
      const int rep = static_cast<int>(i);
      const RunOutput run = run_replication(cfg, rep);
      std::ostringstream csv;
      write_trace_csv(csv, run.trace);
      traces[i] = csv.str();
      summaries[i] = to_json_string(summary_json(cfg, run.inst, run.trace));
      const double bound = bound_comm_of(run.inst, run.trace);
      comm_ok[i] = static_cast<double>(run.trace.comm_count) <= bound;
      std::ostringstream os;
      os << "replication " << rep << ": total_regret=" << format_number(run.trace.total_regret())
         << " comm_count=" << run.trace.comm_count << " bound_comm=" << format_number(bound);
      lines[i] = os.str();
    });
    int status = kExitOk;
    for (int rep = 0; rep < reps; ++rep) {
      write_file(out_dir / numbered(cfg.output.trace, rep, reps), traces[rep]);
      write_file(out_dir / numbered(cfg.output.summary, rep, reps), summaries[rep]);
      log << lines[rep] << '\n';
      if (!comm_ok[rep]) {
        log << "assertion failed: communication bound violated in replication " << rep << '\n';
        status = kExitAssertion;
      }
    }
    return status;
  });
}

int cmd_sweep(const ExperimentConfig& cfg, const SweepConfig& sweep, const fs::path& out_dir, int parallel,
              std::ostream& log) {
  return guarded(log, [&] {
    ExperimentConfig base = cfg;
    base.sweep = sweep;
    base.validate();
    std::vector<ExperimentConfig> cells;
    for (double v : sweep.values) {
      cells.push_back(apply_axis(base, sweep.axis, v));
      cells.back().validate();
    }
    prepare_out_dir(out_dir);

    struct Row {
      double total = 0, max_inst = 0, bound_regret = 0, bound_comm = 0;
      long comm = 0, switches = 0, T = 0;
      double base_total = 0, base_max_inst = 0;
      long base_comm = 0;
      bool comm_ok = true;
    };
    const std::size_t reps = static_cast<std::size_t>(cfg.replications);
    std::vector<Row> rows(cells.size() * reps);
    parallel_for(rows.size(), parallel, [&](std::size_t job) {
      const ExperimentConfig& c = cells[job / reps];
      const int rep = static_cast<int>(job % reps);
      const ProblemInstance inst = c.build_instance(rep);
      const Schedule sched = c.build_schedule(rep);
      const HyperParams hp = c.resolved_params();
      const SimulationTrace tr = run_fedlinucb(inst, sched, hp);
      Row& r = rows[job];
      r.T = tr.horizon();
      r.total = tr.total_regret();
      for (const auto& rec : tr.records) r.max_inst = std::max(r.max_inst, rec.inst_regret);
      r.comm = tr.comm_count;
      r.switches = tr.switch_count;
      r.bound_regret = bound_regret_of(inst, tr);
      r.bound_comm = bound_comm_of(inst, tr);
      r.comm_ok = static_cast<double>(r.comm) <= r.bound_comm;
      if (sweep.baseline) {
        const SimulationTrace b = run_independent_oful(inst, sched, hp);
        r.base_total = b.total_regret();
        for (const auto& rec : b.records) r.base_max_inst = std::max(r.base_max_inst, rec.inst_regret);
        r.base_comm = b.comm_count;
      }
    });

    std::ostringstream csv;
    csv << "axis,value,replication,T,M,d,alpha,total_regret,mean_regret,max_inst_regret,comm_count,switch_count,"
           "bound_regret,bound_comm";
    if (sweep.baseline) csv << ",baseline_total_regret,baseline_mean_regret,baseline_max_inst_regret,baseline_comm_count";
    csv << '\n';
    nlohmann::ordered_json summary;
    summary["axis"] = sweep.axis;
    summary["replications"] = cfg.replications;
    summary["cells"] = nlohmann::ordered_json::array();
    std::vector<double> xs, ys;
    int status = kExitOk;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      const ExperimentConfig& c = cells[ci];
      const HyperParams hp = c.resolved_params();
      double mean_total = 0, mean_comm = 0, mean_base = 0, max_total = 0;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const Row& r = rows[ci * reps + rep];
        const double per_round = r.T > 0 ? r.total / static_cast<double>(r.T) : 0.0;
        csv << sweep.axis << ',' << axis_value(sweep.axis, sweep.values[ci]) << ',' << rep << ',' << r.T << ','
            << c.schedule.M << ',' << c.instance.d << ',' << format_number(hp.alpha) << ','
            << format_number(r.total) << ',' << format_number(per_round) << ',' << format_number(r.max_inst) << ','
            << r.comm << ',' << r.switches << ',' << format_number(r.bound_regret) << ','
            << format_number(r.bound_comm);
        if (sweep.baseline) {
          const double base_per_round = r.T > 0 ? r.base_total / static_cast<double>(r.T) : 0.0;
          csv << ',' << format_number(r.base_total) << ',' << format_number(base_per_round) << ','
              << format_number(r.base_max_inst) << ',' << r.base_comm;
        }
        csv << '\n';
        mean_total += r.total / static_cast<double>(reps);
        mean_comm += static_cast<double>(r.comm) / static_cast<double>(reps);
        mean_base += r.base_total / static_cast<double>(reps);
        max_total = std::max(max_total, r.total);
        if (!r.comm_ok) {
          log << "assertion failed: communication bound violated at " << sweep.axis << "="
              << axis_value(sweep.axis, sweep.values[ci]) << " replication " << rep << '\n';
          status = kExitAssertion;
        }
      }
      nlohmann::ordered_json cell;
      cell["value"] = sweep.values[ci];
      cell["mean_total_regret"] = mean_total;
      cell["max_total_regret"] = max_total;
      cell["mean_comm_count"] = mean_comm;
      if (sweep.baseline) cell["mean_baseline_total_regret"] = mean_base;
      summary["cells"].push_back(cell);
      log << sweep.axis << "=" << axis_value(sweep.axis, sweep.values[ci]) << " mean_regret=" << format_number(mean_total)
          << " mean_comm=" << format_number(mean_comm);
      if (sweep.baseline) log << " mean_baseline_regret=" << format_number(mean_base);
      log << '\n';
      xs.push_back(sweep.values[ci]);
      ys.push_back(mean_total);
    }
    if (sweep.axis == "T" && xs.size() >= 2 && std::all_of(ys.begin(), ys.end(), [](double y) { return y > 0; })) {
      const double slope = loglog_slope(xs, ys);
      summary["loglog_slope"] = slope;
      log << "log-log slope of mean regret vs T: " << format_number(slope) << '\n';
    }
    write_file(out_dir / "sweep.csv", csv.str());
    write_file(out_dir / "sweep_summary.json", to_json_string(summary));
    return status;
  });
}

int cmd_bias_demo(const BiasDemoRequest& req, const fs::path& out_dir, std::ostream& log) {
  return guarded(log, [&] {
    const BiasDemoResult eager = bias_demo(req.agents, req.beta, req.alpha, req.seed, EstimateMode::eager);
    const BiasDemoResult lazy = bias_demo(req.agents, req.beta, req.alpha, req.seed, EstimateMode::lazy);
    log << "eager: predicted reward of arm A = " << format_number(eager.predicted_reward_a)
        << " (upload fraction " << format_number(eager.upload_fraction) << ")\n";
    log << "lazy:  predicted reward of arm A = " << format_number(lazy.predicted_reward_a) << " (upload fraction "
        << format_number(lazy.upload_fraction) << ")\n";
    if (!out_dir.empty()) {
      prepare_out_dir(out_dir);
      nlohmann::ordered_json j;
      j["agents"] = req.agents;
      j["beta"] = req.beta;
      j["alpha"] = req.alpha;
      j["seed"] = req.seed;
      for (const auto& [name, r] : {std::pair{"eager", eager}, std::pair{"lazy", lazy}}) {
        j[name] = {{"predicted_reward_a", r.predicted_reward_a},
                   {"uploads", r.uploads},
                   {"upload_fraction", r.upload_fraction}};
      }
      write_file(out_dir / "bias_demo.json", to_json_string(j));
    }
    return kExitOk;
  });
}

int cmd_check(const ExperimentConfig& cfg, const std::optional<fs::path>& trace_path, const fs::path& out_dir,
              std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    const ProblemInstance inst = cfg.build_instance(0);
    SimulationTrace trace;
    if (trace_path) {
      std::ifstream in(*trace_path);
      if (!in) throw std::runtime_error("cannot open trace " + trace_path->string());
      trace = read_trace_csv(in, inst, cfg.build_schedule(0), cfg.resolved_params());
    } else {
      RunOptions opts;
      opts.record_payloads = true;
      trace = run_fedlinucb(inst, cfg.build_schedule(0), cfg.resolved_params(), opts);
    }
    const auto results = run_invariant_suite(trace, inst);
    nlohmann::ordered_json report;
    report["checks"] = nlohmann::ordered_json::array();
    bool all = true;
    for (const CheckResult& r : results) {
      log << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
      all = all && r.passed;
      report["checks"].push_back(
          {{"name", r.name}, {"passed", r.passed}, {"worst_slack", r.worst_slack}, {"detail", r.detail}});
    }
    report["passed"] = all;
    if (!out_dir.empty()) {
      prepare_out_dir(out_dir);
      write_file(out_dir / "check_report.json", to_json_string(report));
    }
    return all ? kExitOk : kExitAssertion;
  });
}

}  // namespace fedlinucb
