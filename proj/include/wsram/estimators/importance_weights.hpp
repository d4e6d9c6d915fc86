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

#ifndef WSRAM_ESTIMATORS_IMPORTANCE_WEIGHTS_HPP
#define WSRAM_ESTIMATORS_IMPORTANCE_WEIGHTS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <wsram/diffnet/distributions.hpp>
#include <wsram/errors.hpp>

/**
 * \file
 * \brief Self-normalized importance weights, ESS and the two bound estimates.
 *
 * All arithmetic happens in log space: log w = log p(a) + log p(y|a) - log q(a),
 * normalized with log-sum-exp. `raw` is exp(log_raw) and may underflow; only
 * `log_raw` and `normalized` feed the estimators.
 */

namespace wsram {

struct ImportanceWeightSet {
  std::vector<double> log_raw;
  std::vector<double> raw;
  std::vector<double> normalized;

  [[nodiscard]] std::size_t size() const noexcept { return log_raw.size(); }
};

/// Normalizes log weights; throws DegenerateWeightsError if every weight is zero.
inline ImportanceWeightSet weights_from_log(std::vector<double> log_raw) {
  if (log_raw.empty()) {
    throw DomainError{"importance weights need at least one sample"};
  }
  for (double lw : log_raw) {
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity()) {
      throw NumericalError{"importance log-weight is NaN or +inf"};
    }
  }
  const double lse = log_sum_exp(log_raw);
  if (!std::isfinite(lse)) {
    throw DegenerateWeightsError{"all importance weights are zero"};
  }
  ImportanceWeightSet w;
  w.raw.resize(log_raw.size());
  w.normalized.resize(log_raw.size());
  for (std::size_t m = 0; m < log_raw.size(); ++m) {
    w.raw[m] = std::exp(log_raw[m]);
    w.normalized[m] = std::exp(log_raw[m] - lse);
  }
  w.log_raw = std::move(log_raw);
  return w;
}

/// Weights of a batch of trajectories: log p(a) + log p(y|a) - log(proposal density).
template <typename Traj>
ImportanceWeightSet importance_weights(std::span<const Traj> trajs) {
  std::vector<double> lw;
  lw.reserve(trajs.size());
  for (const auto& t : trajs) {
    lw.push_back(t.log_weight());
  }
  return weights_from_log(std::move(lw));
}

/**
 * Self-normalized prior/proposal ratios p(a_m)/q(a_m) over the same samples;
 * the prior-score control variate of the wake-p update.
 */
template <typename Traj>
std::vector<double> normalized_prior_ratios(std::span<const Traj> trajs) {
  std::vector<double> lr;
  lr.reserve(trajs.size());
  for (const auto& t : trajs) {
    lr.push_back(t.log_prior - t.log_proposal);
  }
  return weights_from_log(std::move(lr)).normalized;
}

/// 1 / sum(w_hat^2), in [1, M].
inline double ess(const ImportanceWeightSet& w) {
  double s = 0.0;
  for (double v : w.normalized) {
    s += v * v;
  }
  return 1.0 / s;
}

struct BoundEstimates {
  double f_hat = 0.0;   // mean of log w
  double lm_hat = 0.0;  // log of mean w
  bool clamped = false; // a zero weight was replaced by the sentinel
};

inline constexpr double log_weight_sentinel = -1e300;

inline BoundEstimates bound_estimates(const ImportanceWeightSet& w) {
  BoundEstimates b;
  const auto m = static_cast<double>(w.size());
  for (double lw : w.log_raw) {
    if (std::isinf(lw)) {
      b.clamped = true;
      lw = log_weight_sentinel;
    }
    b.f_hat += lw / m;
  }
  b.lm_hat = log_sum_exp(w.log_raw) - std::log(m);
  if (w.size() == 1) {
    b.lm_hat = b.f_hat;
  }
  return b;
}

}  // namespace wsram

#endif  // WSRAM_ESTIMATORS_IMPORTANCE_WEIGHTS_HPP
