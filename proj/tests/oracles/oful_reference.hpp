#pragma once

// Minimal single-agent rarely-switching OFUL used only as a test oracle.
// Written independently of the library's protocol code: explicit inverses,
// plain determinants, one flat loop.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "fedlinucb/environment.hpp"

namespace fedlinucb::oracle {

struct OfulStep {
  long t;
  std::size_t arm_index;
  double reward;
  bool refreshed;
};

inline std::vector<OfulStep> rarely_switching_oful(const ProblemInstance& inst, const std::vector<long>& rounds,
                                                   double lambda, double alpha, double beta) {
  const int d = inst.dim;
  Eigen::MatrixXd v = lambda * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd v_last_inv = v.inverse();
  double det_last = v.determinant();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  std::vector<OfulStep> out;
  for (long t : rounds) {
    const auto arms = sample_decision_set(inst, t).arms;
    std::size_t best = 0;
    double best_score = -INFINITY;
    for (std::size_t i = 0; i < arms.size(); ++i) {
      const double score = theta.dot(arms[i]) + beta * std::sqrt(arms[i].dot(v_last_inv * arms[i]));
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    const Eigen::VectorXd& x = arms[best];
    const double r = x.dot(inst.theta_star) + sample_noise(inst, t);
    v += x * x.transpose();
    b += r * x;
    const double det_now = v.determinant();
    const bool refresh = det_now > (1.0 + alpha) * det_last;
    if (refresh) {
      v_last_inv = v.inverse();
      det_last = det_now;
      theta = v_last_inv * b;
    }
    out.push_back({t, best, r, refresh});
  }
  return out;
}

}  // namespace fedlinucb::oracle
