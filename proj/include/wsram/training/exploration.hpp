// Copyright 2026 The WS-RAM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WSRAM_TRAINING_EXPLORATION_HPP
#define WSRAM_TRAINING_EXPLORATION_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <wsram/errors.hpp>
#include <wsram/model/trajectory.hpp>

/**
 * \file
 * \brief Exploration regularizers on the prediction network.
 *
 * Over a batch of T trajectories with per-step location-head means mu and
 * scale-head entropies H, the bonus added to the objective is
 *
 *   lambda_ent * (1/T) sum_t sum_n H_tn  -  lambda_cov * |mean(mu) - target|^2
 *
 * where mean(mu) averages every step of every trajectory. Both terms are
 * expressed as prediction seeds so they share the estimator's backward pass.
 */

namespace wsram {

struct CoverageStatistics {
  std::array<double, 2> sum{0.0, 0.0};
  std::size_t count = 0;

  void add(const std::array<double, 2>& mean) {
    sum[0] += mean[0];
    sum[1] += mean[1];
    ++count;
  }
  [[nodiscard]] std::array<double, 2> mean() const {
    if (count == 0) {
      return {0.0, 0.0};
    }
    return {sum[0] / static_cast<double>(count), sum[1] / static_cast<double>(count)};
  }
};

template <typename Traj>
void add_coverage(CoverageStatistics& stats, std::span<const Traj> trajs) {
  for (const auto& t : trajs) {
    for (const auto& m : t.step_location_mean) {
      stats.add(m);
    }
  }
}

/// d bonus / d mu for every single location mean: -2 lambda (mean - target) / count.
inline std::array<double, 2> coverage_seed(const CoverageStatistics& stats, const std::array<double, 2>& target,
                                           double lambda_cov) {
  if (lambda_cov < 0.0) {
    throw ConfigError{"coverage weight must be >= 0"};
  }
  if (stats.count == 0 || lambda_cov == 0.0) {
    return {0.0, 0.0};
  }
  const auto m = stats.mean();
  const double k = -2.0 * lambda_cov / static_cast<double>(stats.count);
  return {k * (m[0] - target[0]), k * (m[1] - target[1])};
}

/// Exploration bonus value for a batch (see file comment).
template <typename Traj>
double exploration_bonus(std::span<const Traj> trajs, double lambda_cov, double lambda_ent,
                         const std::array<double, 2>& target = {0.0, 0.0}) {
  if (trajs.empty()) {
    return 0.0;
  }
  CoverageStatistics stats;
  add_coverage(stats, trajs);
  double h = 0.0;
  for (const auto& t : trajs) {
    for (double e : t.step_scale_entropy) {
      h += e;
    }
  }
  const auto m = stats.mean();
  const double dx = m[0] - target[0];
  const double dy = m[1] - target[1];
  return lambda_ent * h / static_cast<double>(trajs.size()) - lambda_cov * (dx * dx + dy * dy);
}

/**
 * Gradient of exploration_bonus wrt theta for a flat batch of trajectories
 * (an ascent direction). Zero when both weights are zero.
 */
template <GlimpseModel Model>
std::vector<double> exploration_penalties(const Model& model,
                                          std::span<const typename Model::trajectory_type> trajs,
                                          double lambda_cov, double lambda_ent,
                                          const std::array<double, 2>& target = {0.0, 0.0}) {
  if (lambda_cov < 0.0 || lambda_ent < 0.0) {
    throw ConfigError{"exploration weights must be >= 0"};
  }
  std::vector<double> g(model.theta().size(), 0.0);
  if (trajs.empty() || (lambda_cov == 0.0 && lambda_ent == 0.0)) {
    return g;
  }
  CoverageStatistics stats;
  add_coverage(stats, trajs);
  const auto loc = coverage_seed(stats, target, lambda_cov);
  const double ent = lambda_ent / static_cast<double>(trajs.size());
  for (const auto& t : trajs) {
    model.backprop_prediction(t, PredictionSeed{0.0, 0.0, ent, loc}, g);
  }
  return g;
}

}  // namespace wsram

#endif  // WSRAM_TRAINING_EXPLORATION_HPP
