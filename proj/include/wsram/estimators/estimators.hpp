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

#ifndef WSRAM_ESTIMATORS_ESTIMATORS_HPP
#define WSRAM_ESTIMATORS_ESTIMATORS_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <wsram/errors.hpp>
#include <wsram/estimators/importance_weights.hpp>
#include <wsram/model/trajectory.hpp>

/**
 * \file
 * \brief Score-function gradient estimators for the attention policy.
 *
 * Sign conventions: theta estimators return the gradient of the objective
 * being maximized (the variational bound F or the log-likelihood l); the
 * wake-q estimators return the gradient of KL(p(a|y) || q(a|y)), which the
 * trainer descends. Each estimator is a list of per-trajectory seed
 * coefficients followed by one backward pass per trajectory.
 *
 *   VAR       theta: 1/M [d log p(y|a) + log p(y|a) d log p(a)]
 *   VAR+c     theta: 1/M [d log p(y|a) + (log p(y|a) - b) d log p(a)]
 *   WSRAM     theta: sum w [d log p(y|a) + d log p(a)]
 *   WSRAM+c   theta: sum w d log p(y|a) + (w - v) d log p(a),  v = normalized p/q
 *   WAKE-Q    eta:   -sum w d log q(a)
 *   WAKE-Q+c  eta:   -sum (w - 1/M) d log q(a)
 */

namespace wsram {

enum class EstimatorTag { var, var_c, wsram, wsram_c, wsram_q, wsram_q_c, wake_q, wake_q_c };

inline constexpr std::array<EstimatorTag, 8> all_estimator_tags{
    EstimatorTag::var,     EstimatorTag::var_c,     EstimatorTag::wsram,  EstimatorTag::wsram_c,
    EstimatorTag::wsram_q, EstimatorTag::wsram_q_c, EstimatorTag::wake_q, EstimatorTag::wake_q_c};

inline std::string_view to_string(EstimatorTag tag) {
  switch (tag) {
    case EstimatorTag::var: return "VAR";
    case EstimatorTag::var_c: return "VAR+c";
    case EstimatorTag::wsram: return "WSRAM";
    case EstimatorTag::wsram_c: return "WSRAM+c";
    case EstimatorTag::wsram_q: return "WSRAM+q";
    case EstimatorTag::wsram_q_c: return "WSRAM+q+c";
    case EstimatorTag::wake_q: return "WAKE-Q";
    case EstimatorTag::wake_q_c: return "WAKE-Q+c";
  }
  return "?";
}

inline EstimatorTag parse_estimator_tag(std::string_view s) {
  for (auto tag : all_estimator_tags) {
    if (to_string(tag) == s) {
      return tag;
    }
  }
  throw ConfigError{"unknown estimator tag '" + std::string{s} + "'"};
}

inline bool is_variational(EstimatorTag t) { return t == EstimatorTag::var || t == EstimatorTag::var_c; }
inline bool is_wake_q(EstimatorTag t) { return t == EstimatorTag::wake_q || t == EstimatorTag::wake_q_c; }
inline bool uses_inference_network(EstimatorTag t) {
  return t == EstimatorTag::wsram_q || t == EstimatorTag::wsram_q_c || is_wake_q(t);
}
inline bool uses_control_variate(EstimatorTag t) {
  return t == EstimatorTag::var_c || t == EstimatorTag::wsram_c || t == EstimatorTag::wsram_q_c ||
         t == EstimatorTag::wake_q_c;
}
inline Proposal proposal_for(EstimatorTag t) {
  return uses_inference_network(t) ? Proposal::inference : Proposal::prior;
}

struct GradientEstimate {
  std::vector<double> grad;
  EstimatorTag tag = EstimatorTag::var;
  std::size_t samples = 0;
};

namespace detail {

template <typename Traj>
void require_samples(std::span<const Traj> trajs) {
  if (trajs.empty()) {
    throw DomainError{"estimators need M >= 1 samples"};
  }
}

inline void require_aligned(const ImportanceWeightSet& w, std::size_t m) {
  if (w.size() != m) {
    throw InternalError{"weight set and trajectory count differ"};
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Per-trajectory coefficients. Each estimator is a seed per trajectory followed
// by one backward pass, so callers (the trainer) can add their own terms to
// the seeds before backpropagating.

/// VAR / VAR+c seeds: {1/M, (log p(y|a) - b)/M}.
template <typename Traj>
std::vector<PredictionSeed> variational_seeds(std::span<const Traj> trajs, double baseline) {
  detail::require_samples(trajs);
  const double inv_m = 1.0 / static_cast<double>(trajs.size());
  std::vector<PredictionSeed> seeds;
  seeds.reserve(trajs.size());
  for (const auto& t : trajs) {
    seeds.push_back(PredictionSeed{inv_m, inv_m * (t.log_likelihood - baseline)});
  }
  return seeds;
}

/// WSRAM / WSRAM+c seeds: {w, w} or {w, w - v}.
template <typename Traj>
std::vector<PredictionSeed> wsram_seeds(std::span<const Traj> trajs, const ImportanceWeightSet& w,
                                        bool control_variate) {
  detail::require_samples(trajs);
  detail::require_aligned(w, trajs.size());
  std::vector<double> ratio;
  if (control_variate) {
    ratio = normalized_prior_ratios(trajs);
  }
  std::vector<PredictionSeed> seeds;
  seeds.reserve(trajs.size());
  for (std::size_t m = 0; m < trajs.size(); ++m) {
    const double wm = w.normalized[m];
    seeds.push_back(PredictionSeed{wm, control_variate ? wm - ratio[m] : wm});
  }
  return seeds;
}

/// WAKE-Q / WAKE-Q+c coefficients on d log q: -w or -(w - 1/M).
inline std::vector<double> wake_q_coefficients(const ImportanceWeightSet& w, bool control_variate) {
  if (w.size() == 0) {
    throw DomainError{"estimators need M >= 1 samples"};
  }
  const double base = control_variate ? 1.0 / static_cast<double>(w.size()) : 0.0;
  std::vector<double> coefs;
  coefs.reserve(w.size());
  for (double wm : w.normalized) {
    double coef = -(wm - base);
#ifdef WSRAM_MUTATE_WAKE_Q_CV
    if (control_variate) {
      coef = -coef;
    }
#endif
    coefs.push_back(coef);
  }
  return coefs;
}

// ---------------------------------------------------------------------------
// Accumulating forms: add `scale * estimate` into an existing buffer.

template <GlimpseModel Model>
void apply_prediction_seeds(const Model& model, std::span<const typename Model::trajectory_type> trajs,
                            std::span<const PredictionSeed> seeds, double scale, std::span<double> out) {
  for (std::size_t m = 0; m < trajs.size(); ++m) {
    PredictionSeed s = seeds[m];
    s.likelihood *= scale;
    s.prior *= scale;
    s.entropy *= scale;
    s.location = {s.location[0] * scale, s.location[1] * scale};
    model.backprop_prediction(trajs[m], s, out);
  }
}

template <GlimpseModel Model>
void accumulate_variational(const Model& model, std::span<const typename Model::trajectory_type> trajs,
                            double baseline, double scale, std::span<double> out) {
  apply_prediction_seeds(model, trajs, variational_seeds(trajs, baseline), scale, out);
}

template <GlimpseModel Model>
void accumulate_wsram(const Model& model, std::span<const typename Model::trajectory_type> trajs,
                      const ImportanceWeightSet& w, bool control_variate, double scale,
                      std::span<double> out) {
  apply_prediction_seeds(model, trajs, wsram_seeds(trajs, w, control_variate), scale, out);
}

template <GlimpseModel Model>
void accumulate_wake_q(const Model& model, std::span<const typename Model::trajectory_type> trajs,
                       const ImportanceWeightSet& w, bool control_variate, double scale,
                       std::span<double> out) {
  detail::require_samples(trajs);
  detail::require_aligned(w, trajs.size());
  const auto coefs = wake_q_coefficients(w, control_variate);
  for (std::size_t m = 0; m < trajs.size(); ++m) {
    model.backprop_inference(trajs[m], scale * coefs[m], out);
  }
}

// ---------------------------------------------------------------------------
// Value-returning forms.

template <GlimpseModel Model>
GradientEstimate variational_gradient(const Model& model,
                                      std::span<const typename Model::trajectory_type> trajs) {
  GradientEstimate g{std::vector<double>(model.theta().size(), 0.0), EstimatorTag::var, trajs.size()};
  accumulate_variational(model, trajs, 0.0, 1.0, g.grad);
  return g;
}

/// VAR+c with a scalar baseline b (moving average or the output of a baseline network).
template <GlimpseModel Model>
GradientEstimate variational_gradient_cv(const Model& model,
                                         std::span<const typename Model::trajectory_type> trajs,
                                         double baseline) {
  GradientEstimate g{std::vector<double>(model.theta().size(), 0.0), EstimatorTag::var_c, trajs.size()};
  accumulate_variational(model, trajs, baseline, 1.0, g.grad);
  return g;
}

template <GlimpseModel Model>
GradientEstimate wsram_theta_gradient(const Model& model,
                                      std::span<const typename Model::trajectory_type> trajs,
                                      const ImportanceWeightSet& w,
                                      EstimatorTag tag = EstimatorTag::wsram) {
  GradientEstimate g{std::vector<double>(model.theta().size(), 0.0), tag, trajs.size()};
  accumulate_wsram(model, trajs, w, false, 1.0, g.grad);
  return g;
}

template <GlimpseModel Model>
GradientEstimate wsram_theta_gradient_cv(const Model& model,
                                         std::span<const typename Model::trajectory_type> trajs,
                                         const ImportanceWeightSet& w,
                                         EstimatorTag tag = EstimatorTag::wsram_c) {
  GradientEstimate g{std::vector<double>(model.theta().size(), 0.0), tag, trajs.size()};
  accumulate_wsram(model, trajs, w, true, 1.0, g.grad);
  return g;
}

template <GlimpseModel Model>
GradientEstimate wake_q_gradient(const Model& model,
                                 std::span<const typename Model::trajectory_type> trajs,
                                 const ImportanceWeightSet& w) {
  GradientEstimate g{std::vector<double>(model.eta().size(), 0.0), EstimatorTag::wake_q, trajs.size()};
  accumulate_wake_q(model, trajs, w, false, 1.0, g.grad);
  return g;
}

template <GlimpseModel Model>
GradientEstimate wake_q_gradient_cv(const Model& model,
                                    std::span<const typename Model::trajectory_type> trajs,
                                    const ImportanceWeightSet& w) {
  GradientEstimate g{std::vector<double>(model.eta().size(), 0.0), EstimatorTag::wake_q_c, trajs.size()};
  accumulate_wake_q(model, trajs, w, true, 1.0, g.grad);
  return g;
}

/**
 * Adds `scale` times the estimator output into `out` (theta- or eta-sized
 * depending on the tag). `trajs` must come from `proposal_for(tag)`;
 * `baseline` is used only by VAR+c.
 */
template <GlimpseModel Model>
void accumulate_estimate(EstimatorTag tag, const Model& model,
                         std::span<const typename Model::trajectory_type> trajs, double baseline,
                         double scale, std::span<double> out) {
  switch (tag) {
    case EstimatorTag::var:
      accumulate_variational(model, trajs, 0.0, scale, out);
      return;
    case EstimatorTag::var_c:
      accumulate_variational(model, trajs, baseline, scale, out);
      return;
    case EstimatorTag::wsram:
    case EstimatorTag::wsram_q:
      accumulate_wsram(model, trajs, importance_weights(trajs), false, scale, out);
      return;
    case EstimatorTag::wsram_c:
    case EstimatorTag::wsram_q_c:
      accumulate_wsram(model, trajs, importance_weights(trajs), true, scale, out);
      return;
    case EstimatorTag::wake_q:
      accumulate_wake_q(model, trajs, importance_weights(trajs), false, scale, out);
      return;
    case EstimatorTag::wake_q_c:
      accumulate_wake_q(model, trajs, importance_weights(trajs), true, scale, out);
      return;
  }
  throw InternalError{"unhandled estimator tag"};
}

/// Any estimator by tag, as a fresh vector.
template <GlimpseModel Model>
GradientEstimate estimate(EstimatorTag tag, const Model& model,
                          std::span<const typename Model::trajectory_type> trajs, double baseline = 0.0) {
  const std::size_t dim = is_wake_q(tag) ? model.eta().size() : model.theta().size();
  GradientEstimate g{std::vector<double>(dim, 0.0), tag, trajs.size()};
  accumulate_estimate(tag, model, trajs, baseline, 1.0, g.grad);
  return g;
}

}  // namespace wsram

#endif  // WSRAM_ESTIMATORS_ESTIMATORS_HPP
