#include "fedlinucb/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "fedlinucb/rng.hpp"

namespace fedlinucb {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

const json& object_at(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing block '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
  return v;
}

template <class T>
void read(const json& obj, const std::string& where, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void read_number(const json& obj, const std::string& where, const char* key, double& out) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
  out = obj.at(key).get<double>();
}

void read_optional_number(const json& obj, const std::string& where, const char* key, std::optional<double>& out) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  if (!obj.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
  out = obj.at(key).get<double>();
}

void read_seed(const json& obj, const std::string& where, std::uint64_t& out) {
  if (!obj.contains("seed")) return;
  const json& v = obj.at("seed");
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    throw ConfigError(where + ".seed: expected a nonnegative integer");
  }
  out = v.get<std::uint64_t>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

double effective_S(const InstanceConfig& c) { return c.kind == "bias-demo" ? 1.0 : c.S; }

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j, std::filesystem::path base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, "config", {"instance", "params", "schedule", "replications", "output", "sweep"});
  ExperimentConfig c;
  c.base_dir = std::move(base_dir);

  const json& inst = object_at(j, "instance");
  reject_unknown(inst, "instance", {"kind", "d", "K", "S", "L", "R", "seed", "noise", "arms_file"});
  read(inst, "instance", "kind", c.instance.kind);
  read(inst, "instance", "d", c.instance.d);
  read(inst, "instance", "K", c.instance.K);
  read_number(inst, "instance", "S", c.instance.S);
  read_number(inst, "instance", "L", c.instance.L);
  read_number(inst, "instance", "R", c.instance.R);
  read_seed(inst, "instance", c.instance.seed);
  read(inst, "instance", "noise", c.instance.noise);
  read(inst, "instance", "arms_file", c.instance.arms_file);

  if (j.contains("params")) {
    const json& p = object_at(j, "params");
    reject_unknown(p, "params", {"lambda", "alpha", "beta", "delta", "estimate_mode"});
    read_optional_number(p, "params", "lambda", c.params.lambda);
    read_optional_number(p, "params", "alpha", c.params.alpha);
    if (p.contains("beta")) {
      const json& b = p.at("beta");
      if (b.is_string()) {
        if (b.get<std::string>() != "auto") throw ConfigError("params.beta: expected \"auto\" or a number");
      } else if (b.is_number()) {
        c.params.beta = b.get<double>();
      } else if (!b.is_null()) {
        throw ConfigError("params.beta: expected \"auto\" or a number");
      }
    }
    read_number(p, "params", "delta", c.params.delta);
    read(p, "params", "estimate_mode", c.params.estimate_mode);
  }

  const json& s = object_at(j, "schedule");
  reject_unknown(s, "schedule", {"kind", "M", "T", "seed", "file"});
  read(s, "schedule", "kind", c.schedule.kind);
  read(s, "schedule", "M", c.schedule.M);
  read(s, "schedule", "T", c.schedule.T);
  read_seed(s, "schedule", c.schedule.seed);
  read(s, "schedule", "file", c.schedule.file);

  read(j, "config", "replications", c.replications);

  if (j.contains("output")) {
    const json& o = object_at(j, "output");
    reject_unknown(o, "output", {"trace", "summary"});
    read(o, "output", "trace", c.output.trace);
    read(o, "output", "summary", c.output.summary);
  }

  if (j.contains("sweep")) {
    const json& w = object_at(j, "sweep");
    reject_unknown(w, "sweep", {"axis", "values", "baseline"});
    SweepConfig sw;
    read(w, "sweep", "axis", sw.axis);
    read(w, "sweep", "values", sw.values);
    read(w, "sweep", "baseline", sw.baseline);
    c.sweep = std::move(sw);
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

void ExperimentConfig::validate() const {
  try {
    const ArmKind kind = parse_arm_kind(instance.kind);
    parse_noise_kind(instance.noise);
    parse_estimate_mode(params.estimate_mode);
    const ScheduleKind skind = parse_schedule_kind(schedule.kind);

    if (kind != ArmKind::bias_demo_pair) {
      if (instance.d < 1) throw ConfigError("instance.d must be >= 1");
      if (instance.K < 1) throw ConfigError("instance.K must be >= 1");
      if (!(instance.S > 0.0) || !(instance.L > 0.0) || !(instance.R >= 0.0)) {
        throw ConfigError("instance: require S > 0, L > 0, R >= 0");
      }
    }
    if (kind == ArmKind::fixed_list && instance.arms_file.empty()) {
      throw ConfigError("instance.arms_file is required for fixed-list instances");
    }
    if (schedule.M < 1) throw ConfigError("schedule.M must be >= 1");
    if (schedule.T < 0) throw ConfigError("schedule.T must be >= 0");
    if (skind == ScheduleKind::block && schedule.T % schedule.M != 0) {
      throw ConfigError("schedule: block schedule requires M to divide T");
    }
    if (skind == ScheduleKind::explicit_list && schedule.file.empty()) {
      throw ConfigError("schedule.file is required for explicit-list schedules");
    }
    if (replications < 1) throw ConfigError("replications must be >= 1");
    if (output.trace.empty() || output.summary.empty()) throw ConfigError("output file names must be nonempty");
    if (sweep) {
      static const std::set<std::string> axes{"T", "M", "alpha", "d"};
      if (!axes.count(sweep->axis)) throw ConfigError("sweep.axis must be one of T, M, alpha, d");
      if (sweep->values.empty()) throw ConfigError("sweep.values must be nonempty");
      for (double v : sweep->values) {
        if (!std::isfinite(v) || v <= 0.0) throw ConfigError("sweep.values must be positive");
        if (sweep->axis != "alpha" && v != std::floor(v)) throw ConfigError("sweep.values must be integers for this axis");
      }
    }
    resolved_params().validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

HyperParams ExperimentConfig::resolved_params() const {
  HyperParams hp = HyperParams::defaults_for(std::max(1, schedule.M), effective_S(instance) > 0 ? effective_S(instance) : 1.0);
  if (params.lambda) hp.lambda = *params.lambda;
  if (params.alpha) hp.alpha = *params.alpha;
  hp.fixed_beta = params.beta;
  hp.delta = params.delta;
  hp.estimate_mode = parse_estimate_mode(params.estimate_mode);
  return hp;
}

nlohmann::ordered_json ExperimentConfig::echo() const {
  const HyperParams hp = resolved_params();
  const ProblemInstance inst = build_instance(0);
  nlohmann::ordered_json j;
  j["instance"] = {{"kind", instance.kind}, {"d", inst.dim},     {"K", inst.arms.arms_per_round},
                   {"S", inst.S},           {"L", inst.L},       {"R", inst.R},
                   {"seed", instance.seed}, {"noise", std::string(to_string(inst.noise))}};
  if (!instance.arms_file.empty()) j["instance"]["arms_file"] = instance.arms_file;
  j["params"] = {{"lambda", hp.lambda}, {"alpha", hp.alpha}};
  if (hp.fixed_beta) {
    j["params"]["beta"] = *hp.fixed_beta;
  } else {
    j["params"]["beta"] = "auto";
  }
  j["params"]["delta"] = hp.delta;
  j["params"]["estimate_mode"] = std::string(to_string(hp.estimate_mode));
  j["schedule"] = {{"kind", schedule.kind}, {"M", schedule.M}, {"T", build_schedule(0).horizon()}, {"seed", schedule.seed}};
  if (!schedule.file.empty()) j["schedule"]["file"] = schedule.file;
  j["replications"] = replications;
  return j;
}

ProblemInstance ExperimentConfig::build_instance(int rep) const {
  InstanceRequest req;
  req.kind = parse_arm_kind(instance.kind);
  req.dim = instance.d;
  req.arms_per_round = instance.K;
  req.S = instance.S;
  req.L = instance.L;
  req.R = instance.R;
  req.noise = parse_noise_kind(instance.noise);
  req.seed = rng::replication_seed(instance.seed, rep);
  if (req.kind == ArmKind::fixed_list) req.fixed_rounds = load_arm_file(resolve(base_dir, instance.arms_file), instance.d);
  return gen_instance(req);
}

Schedule ExperimentConfig::build_schedule(int rep) const {
  const ScheduleKind kind = parse_schedule_kind(schedule.kind);
  std::vector<int> agents;
  if (kind == ScheduleKind::explicit_list) agents = load_schedule_file(resolve(base_dir, schedule.file));
  return gen_schedule(kind, schedule.M, schedule.T, rng::replication_seed(schedule.seed, rep), std::move(agents));
}

}  // namespace fedlinucb
