#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedlinucb/bandit.hpp"
#include "fedlinucb/environment.hpp"

namespace fedlinucb {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct InstanceConfig {
  std::string kind = "random-sphere";
  int d = 4;
  int K = 10;
  double S = 1.0;
  double L = 1.0;
  double R = 1.0;
  std::uint64_t seed = 1;
  std::string noise = "gaussian";
  std::string arms_file;  // fixed-list only
};

struct ParamsConfig {
  std::optional<double> lambda;  // default 1/S^2
  std::optional<double> alpha;   // default 1/M^2
  std::optional<double> beta;    // empty: automatic radius
  double delta = 0.01;
  std::string estimate_mode = "lazy";
};

struct ScheduleConfig {
  std::string kind = "round-robin";
  int M = 4;
  long T = 1000;
  std::uint64_t seed = 2;
  std::string file;  // explicit-list only
};

struct SweepConfig {
  std::string axis;
  std::vector<double> values;
  bool baseline = false;
};

struct OutputConfig {
  std::string trace = "trace.csv";
  std::string summary = "summary.json";
};

struct ExperimentConfig {
  InstanceConfig instance;
  ParamsConfig params;
  ScheduleConfig schedule;
  int replications = 1;
  OutputConfig output;
  std::optional<SweepConfig> sweep;
  std::filesystem::path base_dir;  // relative file references resolve against this

  static ExperimentConfig from_json(const nlohmann::json& j, std::filesystem::path base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Throws ConfigError on any invalid field.
  void validate() const;

  /// Hyperparameters with every default made explicit.
  [[nodiscard]] HyperParams resolved_params() const;

  /// Echo of the resolved configuration.
  [[nodiscard]] nlohmann::ordered_json echo() const;

  /// Instance / schedule for replication `rep` (seeds derived per replication).
  [[nodiscard]] ProblemInstance build_instance(int rep = 0) const;
  [[nodiscard]] Schedule build_schedule(int rep = 0) const;
};

}  // namespace fedlinucb
