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

#ifndef WSRAM_ESTIMATORS_VARIANCE_PROBE_HPP
#define WSRAM_ESTIMATORS_VARIANCE_PROBE_HPP

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include <wsram/errors.hpp>
#include <wsram/estimators/estimators.hpp>
#include <wsram/model/trajectory.hpp>
#include <wsram/rng.hpp>

namespace wsram {

/// Per-coordinate running central moments (orders 2 to 4), one pass.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0), m3_(dim, 0.0), m4_(dim, 0.0) {}

  void add(std::span<const double> x) {
    if (x.size() != mean_.size()) {
      throw InternalError{"moment accumulator dimension mismatch"};
    }
    const double n1 = static_cast<double>(count_);
    ++count_;
    const double n = static_cast<double>(count_);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double delta = x[i] - mean_[i];
      const double dn = delta / n;
      const double dn2 = dn * dn;
      const double term1 = delta * dn * n1;
      mean_[i] += dn;
      m4_[i] += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2_[i] - 4.0 * dn * m3_[i];
      m3_[i] += term1 * dn * (n - 2.0) - 3.0 * dn * m2_[i];
      m2_[i] += term1;
    }
  }

  [[nodiscard]] std::size_t count() const noexcept { return count_; }
  [[nodiscard]] const std::vector<double>& mean() const noexcept { return mean_; }

  /// Unbiased sample variance of coordinate i.
  [[nodiscard]] double variance(std::size_t i) const {
    return count_ < 2 ? 0.0 : m2_[i] / static_cast<double>(count_ - 1);
  }

  /// Mean over coordinates of the per-coordinate sample variance.
  [[nodiscard]] double mean_variance() const {
    double s = 0.0;
    for (std::size_t i = 0; i < mean_.size(); ++i) {
      s += variance(i);
    }
    return mean_.empty() ? 0.0 : s / static_cast<double>(mean_.size());
  }

  /**
   * Standard error of mean_variance(), treating coordinates as independent:
   * Var(s_i^2) ~ (mu4_i - sigma_i^4 (n - 3) / (n - 1)) / n.
   */
  [[nodiscard]] double mean_variance_standard_error() const {
    if (count_ < 4 || mean_.empty()) {
      return 0.0;
    }
    const double n = static_cast<double>(count_);
    double acc = 0.0;
    for (std::size_t i = 0; i < mean_.size(); ++i) {
      const double mu4 = m4_[i] / n;
      const double s2 = m2_[i] / n;
      acc += std::max(0.0, (mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n);
    }
    return std::sqrt(acc) / static_cast<double>(mean_.size());
  }

 private:
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::vector<double> m3_;
  std::vector<double> m4_;
};

struct ProbeResult {
  double variance = 0.0;
  double standard_error = 0.0;
  std::size_t resamples = 0;
  double mean_ess = 0.0;
};

/**
 * Mean per-coordinate variance of `draw(r)` across r = 0..R-1 independent
 * estimates. `draw` returns the gradient vector of one estimate.
 */
template <typename Draw>
  requires std::invocable<Draw&, std::size_t>
ProbeResult gradient_variance_probe(std::size_t dim, std::size_t resamples, Draw&& draw) {
  if (resamples < 2) {
    throw DomainError{"variance probe needs at least two resamples"};
  }
  MomentAccumulator acc{dim};
  for (std::size_t r = 0; r < resamples; ++r) {
    const std::vector<double> g = draw(r);
    acc.add(g);
  }
  return ProbeResult{acc.mean_variance(), acc.mean_variance_standard_error(), resamples, 0.0};
}

/**
 * Probes one estimator on a fixed set of (context, label) examples: each
 * resample draws M fresh trajectories per example from the estimator's
 * proposal (untempered) and sums the per-example estimates. Also reports the
 * mean ESS of the drawn weight sets. `baselines` (one per example) feed VAR+c.
 */
template <GlimpseModel Model>
ProbeResult probe_estimator(EstimatorTag tag, const Model& model,
                            std::span<const typename Model::context_type> contexts,
                            std::span<const std::size_t> labels, std::size_t samples,
                            std::size_t resamples, std::uint64_t seed,
                            std::span<const double> baselines = {}) {
  if (contexts.size() != labels.size() || contexts.empty()) {
    throw ConfigError{"probe needs a non-empty batch with one label per example"};
  }
  if (!baselines.empty() && baselines.size() != contexts.size()) {
    throw ConfigError{"probe needs one baseline per example"};
  }
  const std::size_t dim = is_wake_q(tag) ? model.eta().size() : model.theta().size();
  double ess_sum = 0.0;
  std::size_t ess_count = 0;
  auto result = gradient_variance_probe(dim, resamples, [&](std::size_t r) {
    std::vector<double> total(dim, 0.0);
    for (std::size_t i = 0; i < contexts.size(); ++i) {
      Rng rng = make_rng(seed, "probe", r, i);
      std::vector<typename Model::trajectory_type> trajs;
      trajs.reserve(samples);
      for (std::size_t m = 0; m < samples; ++m) {
        trajs.push_back(model.rollout(contexts[i], labels[i], proposal_for(tag), rng, 1.0));
      }
      const std::span<const typename Model::trajectory_type> view{trajs};
      ess_sum += ess(importance_weights(view));
      ++ess_count;
      const auto g = estimate(tag, model, view, baselines.empty() ? 0.0 : baselines[i]);
      for (std::size_t k = 0; k < dim; ++k) {
        total[k] += g.grad[k];
      }
    }
    return total;
  });
  result.mean_ess = ess_sum / static_cast<double>(ess_count);
  return result;
}

}  // namespace wsram

#endif  // WSRAM_ESTIMATORS_VARIANCE_PROBE_HPP
