#include "fedlinucb/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fedlinucb {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::rademacher: return "rademacher-scaled";
  }
  return "?";
}

std::string_view to_string(ArmKind kind) {
  switch (kind) {
    case ArmKind::random_sphere: return "random-sphere";
    case ArmKind::hypercube_corners: return "hypercube-corners";
    case ArmKind::bias_demo_pair: return "bias-demo";
    case ArmKind::fixed_list: return "fixed-list";
  }
  return "?";
}

std::string_view to_string(EstimateMode mode) {
  return mode == EstimateMode::lazy ? "lazy" : "eager";
}

NoiseKind parse_noise_kind(std::string_view s) {
  if (s == "gaussian") return NoiseKind::gaussian;
  if (s == "rademacher-scaled" || s == "rademacher") return NoiseKind::rademacher;
  throw std::invalid_argument("unknown noise kind: " + std::string(s));
}

ArmKind parse_arm_kind(std::string_view s) {
  if (s == "random-sphere") return ArmKind::random_sphere;
  if (s == "hypercube-corners") return ArmKind::hypercube_corners;
  if (s == "bias-demo" || s == "bias-demo-pair") return ArmKind::bias_demo_pair;
  if (s == "fixed-list") return ArmKind::fixed_list;
  throw std::invalid_argument("unknown instance kind: " + std::string(s));
}

EstimateMode parse_estimate_mode(std::string_view s) {
  if (s == "lazy") return EstimateMode::lazy;
  if (s == "eager") return EstimateMode::eager;
  throw std::invalid_argument("unknown estimate mode: " + std::string(s));
}

void ProblemInstance::validate() const {
  if (dim < 1) throw std::invalid_argument("instance: dim must be >= 1");
  if (theta_star.size() != dim) throw DimensionError("instance: theta_star has wrong length");
  if (!(S > 0.0) || !(L > 0.0) || !(R >= 0.0)) {
    throw std::invalid_argument("instance: require S > 0, L > 0, R >= 0");
  }
  if (theta_star.norm() > S * (1.0 + 1e-12)) {
    throw std::invalid_argument("instance: ||theta_star|| exceeds S");
  }
  if (arms.arms_per_round < 1) throw std::invalid_argument("instance: K must be >= 1");
}

void HyperParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("params: lambda must be > 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("params: alpha must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("params: delta must lie in (0, 1)");
  if (fixed_beta && !(*fixed_beta >= 0.0)) throw std::invalid_argument("params: fixed beta must be >= 0");
}

HyperParams HyperParams::defaults_for(int num_agents, double S) {
  if (num_agents < 1) throw std::invalid_argument("defaults_for: M must be >= 1");
  if (!(S > 0.0)) throw std::invalid_argument("defaults_for: S must be > 0");
  HyperParams hp;
  hp.alpha = 1.0 / (static_cast<double>(num_agents) * num_agents);
  hp.lambda = 1.0 / (S * S);
  hp.delta = 0.01;
  return hp;
}

double compute_beta(const ProblemInstance& inst, const HyperParams& hp, int num_agents, long horizon) {
  if (num_agents < 1) throw std::invalid_argument("compute_beta: M must be >= 1");
  if (horizon < 1) throw std::invalid_argument("compute_beta: T must be >= 1");
  if (hp.fixed_beta) return *hp.fixed_beta;

  const double M = num_agents;
  const double T = static_cast<double>(horizon);
  const double d = inst.dim;
  const double ridge = std::sqrt(hp.lambda) * inst.S;
  const double inflation = std::sqrt(1.0 + M * hp.alpha) + M * std::sqrt(2.0 * hp.alpha);
  const double log_term =
      std::log((1.0 + T * inst.L * inst.L / (std::min(hp.alpha, 1.0) * hp.lambda)) / hp.delta);
  return ridge + inflation * (inst.R * std::sqrt(d * log_term) + ridge);
}

double ucb_score(const Vector& theta_hat, const SpdMatrix& gram, double beta, const Vector& arm) {
  require_dim(arm, theta_hat.size(), "ucb_score");
  return theta_hat.dot(arm) + beta * gram.inv_norm(arm);
}

std::size_t ucb_select(const Vector& theta_hat, const SpdMatrix& gram, double beta, const DecisionSet& d_set) {
  if (d_set.empty()) throw std::invalid_argument("ucb_select: empty decision set");
  require_dim(theta_hat, gram.dim(), "ucb_select");
  std::size_t best = 0;
  double best_score = ucb_score(theta_hat, gram, beta, d_set.arms[0]);
  for (std::size_t i = 1; i < d_set.size(); ++i) {
    const double s = ucb_score(theta_hat, gram, beta, d_set.arms[i]);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

}  // namespace fedlinucb
