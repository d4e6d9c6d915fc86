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

#ifndef WSRAM_MODEL_TRAJECTORY_HPP
#define WSRAM_MODEL_TRAJECTORY_HPP

#include <array>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include <wsram/diffnet/parameter_vector.hpp>
#include <wsram/env/image.hpp>
#include <wsram/rng.hpp>

namespace wsram {

/**
 * \brief One sampled glimpse sequence and its log terms.
 *
 * `log_proposal` is the log density of the distribution the actions were
 * actually drawn from (the temperature-scaled prior or inference network);
 * `log_q` is the untempered inference-network log density used by the wake-q
 * update. Both equal `log_prior` for an untempered prior rollout.
 */
template <typename Tape>
struct Trajectory {
  std::size_t label = 0;
  std::vector<Action> actions;
  std::vector<GlimpseObservation> observations;
  std::vector<double> step_log_prior;
  std::vector<double> step_log_proposal;
  std::vector<double> step_log_q;
  std::vector<double> step_scale_entropy;  // entropy of the prior scale head at each step
  std::vector<std::array<double, 2>> step_location_mean;
  std::vector<double> class_log_probs;
  double log_prior = 0.0;
  double log_likelihood = 0.0;
  double log_proposal = 0.0;
  double log_q = 0.0;
  Tape tape;

  [[nodiscard]] double log_weight() const noexcept { return log_prior + log_likelihood - log_proposal; }
};

/// Which distribution a rollout samples from.
enum class Proposal { prior, inference };

/**
 * Output-gradient seed for one trajectory through the prediction network:
 * d/dtheta of [likelihood * log p(y|a) + prior * log p(a)
 *              + entropy * sum_n H[scale head at n] + location . sum_n mean_n].
 */
struct PredictionSeed {
  double likelihood = 0.0;
  double prior = 0.0;
  double entropy = 0.0;
  std::array<double, 2> location{0.0, 0.0};
};

/**
 * Contract shared by the image attention model and the tabular toy model, so
 * estimators, the oracle and the trainer are written once.
 */
template <typename M>
concept GlimpseModel = requires(const M& m, M& mm, const typename M::context_type& ctx,
                                  const typename M::trajectory_type& t, std::span<const Action> acts,
                                  std::span<double> g, Rng& rng, PredictionSeed seed) {
  typename M::context_type;
  typename M::trajectory_type;
  { m.rollout(ctx, std::size_t{}, Proposal::prior, rng, 1.0) } -> std::same_as<typename M::trajectory_type>;
  { m.replay(ctx, std::size_t{}, acts, Proposal::prior, 1.0) } -> std::same_as<typename M::trajectory_type>;
  m.backprop_prediction(t, seed, g);
  m.backprop_inference(t, 0.0, g);
  { m.theta() } -> std::same_as<const ParameterVector&>;
  { m.eta() } -> std::same_as<const ParameterVector&>;
  { mm.theta() } -> std::same_as<ParameterVector&>;
  { mm.eta() } -> std::same_as<ParameterVector&>;
  { m.num_classes() } -> std::convertible_to<std::size_t>;
  { m.glimpses() } -> std::convertible_to<std::size_t>;
  { m.baseline_features(ctx) } -> std::same_as<std::vector<double>>;
};

}  // namespace wsram

#endif  // WSRAM_MODEL_TRAJECTORY_HPP
