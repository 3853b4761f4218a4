#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedlinucb/spd.hpp"

namespace fedlinucb {

enum class NoiseKind { gaussian, rademacher };

enum class ArmKind { random_sphere, hypercube_corners, bias_demo_pair, fixed_list };

enum class EstimateMode { lazy, eager };

std::string_view to_string(NoiseKind kind);
std::string_view to_string(ArmKind kind);
std::string_view to_string(EstimateMode mode);
NoiseKind parse_noise_kind(std::string_view s);
ArmKind parse_arm_kind(std::string_view s);
EstimateMode parse_estimate_mode(std::string_view s);

/// Decision-set generator descriptor.
struct ArmSpec {
  ArmKind kind = ArmKind::random_sphere;
  int arms_per_round = 1;
  // fixed_list only: one decision set per line of the source file, cycled by round.
  std::vector<std::vector<Vector>> fixed_rounds;
};

struct ProblemInstance {
  int dim = 1;
  Vector theta_star;
  double S = 1.0;  // bound on ||theta*||
  double L = 1.0;  // bound on arm norms
  double R = 1.0;  // sub-Gaussian noise scale
  ArmSpec arms;
  NoiseKind noise = NoiseKind::gaussian;
  std::uint64_t master_seed = 0;

  /// Throws std::invalid_argument when the instance violates its bounds.
  void validate() const;
};

struct HyperParams {
  double lambda = 1.0;
  double alpha = 1.0;
  double delta = 0.01;
  std::optional<double> fixed_beta;  // empty: radius from the regret theorem
  EstimateMode estimate_mode = EstimateMode::lazy;

  void validate() const;

  /// alpha = 1/M^2, lambda = 1/S^2, automatic beta, delta = 0.01.
  static HyperParams defaults_for(int num_agents, double S);
};

struct DecisionSet {
  std::vector<Vector> arms;

  [[nodiscard]] std::size_t size() const { return arms.size(); }
  [[nodiscard]] bool empty() const { return arms.empty(); }
};

/// Confidence radius of the regret theorem (natural logarithm), or the fixed
/// value when one is configured.
double compute_beta(const ProblemInstance& inst, const HyperParams& hp, int num_agents, long horizon);

/// UCB score of a single arm.
double ucb_score(const Vector& theta_hat, const SpdMatrix& gram, double beta, const Vector& arm);

/// Smallest index maximizing <theta_hat, x> + beta * ||x||_{gram^{-1}}.
std::size_t ucb_select(const Vector& theta_hat, const SpdMatrix& gram, double beta, const DecisionSet& d_set);

}  // namespace fedlinucb
