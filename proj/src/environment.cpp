#include "fedlinucb/environment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fedlinucb/rng.hpp"

namespace fedlinucb {

namespace {

constexpr double kNormSlack = 1e-12;

Vector gaussian_vector(rng::CounterStream& s, int dim) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = s.normal();
  return v;
}

Vector unit_direction(rng::CounterStream& s, int dim) {
  for (;;) {
    Vector v = gaussian_vector(s, dim);
    const double n = v.norm();
    if (n > 1e-300) return v / n;
  }
}

void clamp_norm(Vector& x, double bound) {
  const double n = x.norm();
  if (n > bound) x *= bound / n;
}

// Strips comments and returns whitespace-separated tokens of one line.
std::vector<std::string> tokens_of(const std::string& raw) {
  std::string line = raw.substr(0, raw.find('#'));
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, long line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || !std::isfinite(v)) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": not a number: '" + tok + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::round_robin: return "round-robin";
    case ScheduleKind::iid_uniform: return "iid-uniform";
    case ScheduleKind::block: return "block";
    case ScheduleKind::explicit_list: return "explicit-list";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(std::string_view s) {
  if (s == "round-robin") return ScheduleKind::round_robin;
  if (s == "iid-uniform") return ScheduleKind::iid_uniform;
  if (s == "block") return ScheduleKind::block;
  if (s == "explicit-list") return ScheduleKind::explicit_list;
  throw std::invalid_argument("unknown schedule kind: " + std::string(s));
}

long Schedule::participation_count(int agent) const {
  long n = 0;
  for (int a : agents) n += (a == agent);
  return n;
}

void Schedule::validate() const {
  if (num_agents < 1) throw std::invalid_argument("schedule: M must be >= 1");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i] < 1 || agents[i] > num_agents) {
      throw std::invalid_argument("schedule: round " + std::to_string(i + 1) + " names agent " +
                                  std::to_string(agents[i]) + " outside [1, M]");
    }
  }
}

ProblemInstance gen_instance(const InstanceRequest& req) {
  ProblemInstance inst;
  inst.master_seed = req.seed;
  inst.arms.kind = req.kind;

  switch (req.kind) {
    case ArmKind::bias_demo_pair: {
      inst.dim = 2;
      inst.theta_star = Vector::Zero(2);
      inst.S = 1.0;
      inst.L = 3.0;
      inst.R = 1.0;
      inst.noise = NoiseKind::rademacher;
      inst.arms.arms_per_round = 2;
      Vector arm_a(2), arm_b(2);
      arm_a << 3.0, 0.0;
      arm_b << 0.0, 1.0 / std::sqrt(10.0);
      inst.arms.fixed_rounds = {{arm_a, arm_b}};
      break;
    }
    case ArmKind::random_sphere:
    case ArmKind::hypercube_corners: {
      if (req.dim < 1) throw std::invalid_argument("gen_instance: d must be >= 1");
      if (req.arms_per_round < 1) throw std::invalid_argument("gen_instance: K must be >= 1");
      inst.dim = req.dim;
      inst.S = req.S;
      inst.L = req.L;
      inst.R = req.R;
      inst.noise = req.noise;
      inst.arms.arms_per_round = req.arms_per_round;
      rng::CounterStream s(req.seed, rng::Stream::theta, 0);
      inst.theta_star = unit_direction(s, req.dim) * req.S;
      clamp_norm(inst.theta_star, req.S);
      break;
    }
    case ArmKind::fixed_list: {
      if (req.fixed_rounds.empty()) throw std::invalid_argument("gen_instance: fixed-list needs at least one round");
      inst.dim = req.dim;
      inst.S = req.S;
      inst.L = req.L;
      inst.R = req.R;
      inst.noise = req.noise;
      for (const auto& round : req.fixed_rounds) {
        if (round.empty()) throw std::invalid_argument("gen_instance: fixed-list round with no arms");
        for (const auto& arm : round) {
          require_dim(arm, req.dim, "gen_instance");
          if (arm.norm() > req.L * (1.0 + kNormSlack)) {
            throw std::invalid_argument("gen_instance: fixed-list arm exceeds L");
          }
        }
      }
      inst.arms.arms_per_round = static_cast<int>(req.fixed_rounds.front().size());
      inst.arms.fixed_rounds = req.fixed_rounds;
      rng::CounterStream s(req.seed, rng::Stream::theta, 0);
      inst.theta_star = unit_direction(s, req.dim) * req.S;
      clamp_norm(inst.theta_star, req.S);
      break;
    }
  }
  inst.validate();
  return inst;
}

DecisionSet sample_decision_set(const ProblemInstance& inst, long round) {
  if (round < 1) throw std::invalid_argument("sample_decision_set: round must be >= 1");
  DecisionSet out;
  const int k = inst.arms.arms_per_round;
  switch (inst.arms.kind) {
    case ArmKind::bias_demo_pair:
    case ArmKind::fixed_list: {
      const auto& rounds = inst.arms.fixed_rounds;
      out.arms = rounds[static_cast<std::size_t>(round - 1) % rounds.size()];
      break;
    }
    case ArmKind::random_sphere: {
      rng::CounterStream s(inst.master_seed, rng::Stream::arms, static_cast<std::uint64_t>(round));
      out.arms.reserve(k);
      for (int i = 0; i < k; ++i) {
        Vector x = unit_direction(s, inst.dim);
        x *= inst.L * std::pow(s.uniform(), 1.0 / inst.dim);
        clamp_norm(x, inst.L);
        out.arms.push_back(std::move(x));
      }
      break;
    }
    case ArmKind::hypercube_corners: {
      rng::CounterStream s(inst.master_seed, rng::Stream::arms, static_cast<std::uint64_t>(round));
      const double c = inst.L / std::sqrt(static_cast<double>(inst.dim));
      out.arms.reserve(k);
      for (int i = 0; i < k; ++i) {
        Vector x(inst.dim);
        for (int j = 0; j < inst.dim; ++j) x[j] = c * s.sign();
        clamp_norm(x, inst.L);
        out.arms.push_back(std::move(x));
      }
      break;
    }
  }
  return out;
}

double sample_noise(const ProblemInstance& inst, long round) {
  if (inst.R == 0.0) return 0.0;
  rng::CounterStream s(inst.master_seed, rng::Stream::noise, static_cast<std::uint64_t>(round));
  return inst.noise == NoiseKind::gaussian ? inst.R * s.normal() : inst.R * s.sign();
}

double sample_reward(const ProblemInstance& inst, long round, const Vector& x) {
  require_dim(x, inst.dim, "sample_reward");
  return x.dot(inst.theta_star) + sample_noise(inst, round);
}

Schedule gen_schedule(ScheduleKind kind, int num_agents, long horizon, std::uint64_t seed,
                      std::vector<int> explicit_agents) {
  if (num_agents < 1) throw std::invalid_argument("gen_schedule: M must be >= 1");
  if (horizon < 0) throw std::invalid_argument("gen_schedule: T must be >= 0");
  Schedule s;
  s.num_agents = num_agents;
  s.kind = kind;
  s.seed = seed;
  switch (kind) {
    case ScheduleKind::round_robin:
      s.agents.resize(horizon);
      for (long t = 0; t < horizon; ++t) s.agents[t] = static_cast<int>(t % num_agents) + 1;
      break;
    case ScheduleKind::iid_uniform:
      s.agents.resize(horizon);
      for (long t = 0; t < horizon; ++t) {
        rng::CounterStream st(seed, rng::Stream::schedule, static_cast<std::uint64_t>(t + 1));
        s.agents[t] = static_cast<int>(st.below(static_cast<std::uint64_t>(num_agents))) + 1;
      }
      break;
    case ScheduleKind::block: {
      if (horizon % num_agents != 0) throw std::invalid_argument("gen_schedule: block schedule requires M | T");
      const long per = horizon / num_agents;
      s.agents.resize(horizon);
      for (long t = 0; t < horizon; ++t) s.agents[t] = static_cast<int>(t / per) + 1;
      break;
    }
    case ScheduleKind::explicit_list:
      s.agents = std::move(explicit_agents);
      if (horizon != 0 && static_cast<long>(s.agents.size()) != horizon) {
        throw std::invalid_argument("gen_schedule: explicit list length " + std::to_string(s.agents.size()) +
                                    " does not match T = " + std::to_string(horizon));
      }
      break;
  }
  s.validate();
  return s;
}

std::vector<int> parse_schedule_text(std::istream& in) {
  std::vector<int> agents;
  long line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto toks = tokens_of(line);
    if (toks.empty()) continue;
    if (toks.size() > 1) {
      throw std::invalid_argument("schedule line " + std::to_string(line_no) +
                                  ": more than one agent in a round (simultaneous participation is not allowed)");
    }
    std::size_t used = 0;
    int agent = 0;
    try {
      agent = std::stoi(toks[0], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != toks[0].size() || agent < 1) {
      throw std::invalid_argument("schedule line " + std::to_string(line_no) + ": expected a positive agent id");
    }
    agents.push_back(agent);
  }
  return agents;
}

std::vector<std::vector<Vector>> parse_arm_text(std::istream& in, int dim) {
  if (dim < 1) throw std::invalid_argument("parse_arm_text: d must be >= 1");
  std::vector<std::vector<Vector>> rounds;
  long line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto toks = tokens_of(line);
    if (toks.empty()) continue;
    if (toks.size() % static_cast<std::size_t>(dim) != 0) {
      throw std::invalid_argument("arm line " + std::to_string(line_no) + ": value count " +
                                  std::to_string(toks.size()) + " is not a multiple of d = " + std::to_string(dim));
    }
    std::vector<Vector> arms;
    for (std::size_t i = 0; i < toks.size(); i += dim) {
      Vector x(dim);
      for (int j = 0; j < dim; ++j) x[j] = parse_double(toks[i + j], line_no);
      arms.push_back(std::move(x));
    }
    rounds.push_back(std::move(arms));
  }
  return rounds;
}

std::vector<int> load_schedule_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule file: " + path.string());
  return parse_schedule_text(in);
}

std::vector<std::vector<Vector>> load_arm_file(const std::filesystem::path& path, int dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open arm file: " + path.string());
  return parse_arm_text(in, dim);
}

}  // namespace fedlinucb
