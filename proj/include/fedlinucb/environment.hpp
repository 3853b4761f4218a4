#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "fedlinucb/bandit.hpp"

namespace fedlinucb {

enum class ScheduleKind { round_robin, iid_uniform, block, explicit_list };

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view s);

/// Activation sequence: agents[t-1] is the 1-based agent active in round t.
struct Schedule {
  int num_agents = 1;
  std::vector<int> agents;
  ScheduleKind kind = ScheduleKind::round_robin;
  std::uint64_t seed = 0;

  [[nodiscard]] long horizon() const { return static_cast<long>(agents.size()); }
  /// Number of rounds in which `agent` participates.
  [[nodiscard]] long participation_count(int agent) const;
  void validate() const;
};

struct InstanceRequest {
  ArmKind kind = ArmKind::random_sphere;
  int dim = 2;
  int arms_per_round = 10;
  double S = 1.0;
  double L = 1.0;
  double R = 1.0;
  std::uint64_t seed = 0;
  NoiseKind noise = NoiseKind::gaussian;
  // fixed_list only.
  std::vector<std::vector<Vector>> fixed_rounds;
};

ProblemInstance gen_instance(const InstanceRequest& req);

/// Deterministic in (master_seed, round); independent of the schedule.
DecisionSet sample_decision_set(const ProblemInstance& inst, long round);

/// Noise realization eta_t; depends only on (master_seed, round).
double sample_noise(const ProblemInstance& inst, long round);

/// <x, theta*> + eta_t.
double sample_reward(const ProblemInstance& inst, long round, const Vector& x);

Schedule gen_schedule(ScheduleKind kind, int num_agents, long horizon, std::uint64_t seed,
                      std::vector<int> explicit_agents = {});

// Plain-text loaders. Blank lines and '#' comments are ignored.
// Schedule file: one round per line holding a single 1-based agent id.
// Arm file: one round per line holding K*d numbers (K arms, d coordinates each).
std::vector<int> parse_schedule_text(std::istream& in);
std::vector<std::vector<Vector>> parse_arm_text(std::istream& in, int dim);
std::vector<int> load_schedule_file(const std::filesystem::path& path);
std::vector<std::vector<Vector>> load_arm_file(const std::filesystem::path& path, int dim);

}  // namespace fedlinucb
