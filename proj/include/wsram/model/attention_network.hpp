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

#ifndef WSRAM_MODEL_ATTENTION_NETWORK_HPP
#define WSRAM_MODEL_ATTENTION_NETWORK_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <wsram/diffnet/distributions.hpp>
#include <wsram/diffnet/layers.hpp>
#include <wsram/diffnet/parameter_vector.hpp>
#include <wsram/env/image.hpp>
#include <wsram/errors.hpp>
#include <wsram/model/trajectory.hpp>

/**
 * \file
 * \brief The recurrent attention classifier and its inference network.
 *
 * Prediction network (theta):
 *   h2_0   = relu(Wc * lowres(I) + bc)          low-res view enters layer 2 only
 *   a_n    ~ N(loc | Wl h2_{n-1}, std) x Cat(scale | Ws h2_{n-1})
 *   h1_n   = relu(W1 [g(a_n, I), loc, onehot(scale)] + U1 h1_{n-1} + b1)
 *   h2_n   = relu(W2 h1_n + U2 h2_{n-1} + b2)    (n < N)
 *   p(y|a) = softmax(Wy h1_N + by)              the classifier reads layer 1 only
 *
 * Inference network (eta), stacked on the read-only layer-2 states:
 *   hq_n   = relu(Wq [h2_n, onehot(y)] + Uq hq_{n-1} + bq)
 *   q(a_{n+1} | ...) uses heads on hq_n shaped like the prior heads.
 */

namespace wsram {

struct NetworkShape {
  std::size_t canvas = 60;
  GlimpseGeometry glimpse{{14, 28, 56}, 14, 1};
  std::size_t low_res = 12;
  std::size_t hidden1 = 128;
  std::size_t hidden2 = 128;
  std::size_t inference_hidden = 128;
  std::size_t classes = 10;
  std::size_t glimpses = 4;
  double location_log_std = -2.302585092994046;  // log(0.1)

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

inline void validate(const NetworkShape& s) {
  if (s.canvas == 0 || s.glimpse.retina == 0 || s.glimpse.scales.empty() || s.low_res == 0 ||
      s.hidden1 == 0 || s.hidden2 == 0 || s.inference_hidden == 0 || s.classes < 2 ||
      s.glimpses == 0) {
    throw ConfigError{"network shape has a zero dimension"};
  }
  if (s.low_res > s.canvas) {
    throw ConfigError{"low-resolution side exceeds the canvas"};
  }
  if (!std::isfinite(s.location_log_std)) {
    throw ConfigError{"location log-std must be finite"};
  }
}

struct AttentionTape {
  LayerTape context;
  std::vector<LayerTape> cell1;
  std::vector<LayerTape> cell2;
  std::vector<LayerTape> loc_head;
  std::vector<LayerTape> scale_head;
  std::vector<LayerTape> q_cell;
  std::vector<LayerTape> q_loc_head;
  std::vector<LayerTape> q_scale_head;
  LayerTape classifier;
  bool has_inference = false;
};

class AttentionModel {
 public:
  using context_type = Image;
  using trajectory_type = Trajectory<AttentionTape>;

  explicit AttentionModel(const NetworkShape& shape) : shape_{shape} {
    validate(shape);
    const std::size_t s = shape.glimpse.scales.size();
    const std::size_t patch = shape.glimpse.retina * shape.glimpse.retina;
    context_ = Layer{{LayerKind::dense, shape.low_res * shape.low_res, shape.hidden2, Activation::relu},
                     theta_, "context"};
    cell1_ = Layer{{LayerKind::recurrent_cell, patch + 2 + s, shape.hidden1, Activation::relu},
                   theta_, "core1"};
    cell2_ = Layer{{LayerKind::recurrent_cell, shape.hidden1, shape.hidden2, Activation::relu},
                   theta_, "core2"};
    loc_head_ = Layer{{LayerKind::gaussian_head, shape.hidden2, 2, Activation::identity}, theta_,
                      "location"};
    scale_head_ = Layer{{LayerKind::categorical_head, shape.hidden2, s, Activation::identity}, theta_,
                        "scale"};
    classifier_ = Layer{{LayerKind::categorical_head, shape.hidden1, shape.classes, Activation::identity},
                        theta_, "classifier"};
    q_cell_ = Layer{{LayerKind::recurrent_cell, shape.hidden2 + shape.classes, shape.inference_hidden,
                     Activation::relu},
                    eta_, "q.core"};
    q_loc_head_ = Layer{{LayerKind::gaussian_head, shape.inference_hidden, 2, Activation::identity},
                        eta_, "q.location"};
    q_scale_head_ = Layer{
        {LayerKind::categorical_head, shape.inference_hidden, s, Activation::identity}, eta_, "q.scale"};
  }

  void initialize(Rng& rng) {
    for (const Layer* l : {&context_, &cell1_, &cell2_, &loc_head_, &scale_head_, &classifier_}) {
      l->initialize(theta_, rng);
    }
    for (const Layer* l : {&q_cell_, &q_loc_head_, &q_scale_head_}) {
      l->initialize(eta_, rng);
    }
  }

  /// Sets eta so that q(a | y, I) reproduces the prior heads exactly.
  void mimic_prior_with_inference() {
    if (shape_.inference_hidden != shape_.hidden2) {
      throw ConfigError{"mimicking the prior needs inference width == layer-2 width"};
    }
    auto zero = [&](const Slice& s) {
      auto v = eta_.values(s);
      std::fill(v.begin(), v.end(), 0.0);
    };
    zero(q_cell_.weights());
    zero(q_cell_.recurrent_weights());
    zero(q_cell_.bias());
    auto w = eta_.values(q_cell_.weights());
    const std::size_t cols = shape_.hidden2 + shape_.classes;
    for (std::size_t i = 0; i < shape_.hidden2; ++i) {
      w[i * cols + i] = 1.0;
    }
    auto copy = [&](const Layer& from, const Layer& to) {
      for (auto [src, dst] : {std::pair{from.weights(), to.weights()}, std::pair{from.bias(), to.bias()}}) {
        const auto v = theta_.values(src);
        std::copy(v.begin(), v.end(), eta_.values(dst).begin());
      }
    };
    copy(loc_head_, q_loc_head_);
    copy(scale_head_, q_scale_head_);
  }

  [[nodiscard]] const NetworkShape& shape() const noexcept { return shape_; }
  [[nodiscard]] std::size_t glimpses() const noexcept { return shape_.glimpses; }
  [[nodiscard]] std::size_t num_classes() const noexcept { return shape_.classes; }
  [[nodiscard]] const ParameterVector& theta() const noexcept { return theta_; }
  [[nodiscard]] ParameterVector& theta() noexcept { return theta_; }
  [[nodiscard]] const ParameterVector& eta() const noexcept { return eta_; }
  [[nodiscard]] ParameterVector& eta() noexcept { return eta_; }
  [[nodiscard]] const Layer& classifier() const noexcept { return classifier_; }

  [[nodiscard]] std::vector<double> baseline_features(const Image& image) const {
    return low_res_view(image, shape_.low_res);
  }

  [[nodiscard]] trajectory_type rollout(const Image& image, std::size_t label, Proposal proposal,
                                        Rng& rng, double tau = 1.0) const {
    return run(image, label, proposal, tau, {}, &rng);
  }

  [[nodiscard]] trajectory_type replay(const Image& image, std::size_t label,
                                       std::span<const Action> actions, Proposal proposal,
                                       double tau = 1.0) const {
    if (actions.size() != shape_.glimpses) {
      throw ConfigError{"replayed sequence length differs from the glimpse count"};
    }
    return run(image, label, proposal, tau, actions, nullptr);
  }

  void backprop_prediction(const trajectory_type& t, const PredictionSeed& seed,
                           std::span<double> grads) const {
    if (grads.size() != theta_.size()) {
      throw InternalError{"gradient buffer does not match theta"};
    }
    const auto& tp = t.tape;
    const std::size_t n_steps = shape_.glimpses;
    const std::size_t s = shape_.glimpse.scales.size();

    std::vector<std::vector<double>> dh2(n_steps, std::vector<double>(shape_.hidden2, 0.0));
    std::vector<std::vector<double>> dh1(n_steps + 1, std::vector<double>(shape_.hidden1, 0.0));

    if (seed.likelihood != 0.0) {
      std::vector<double> dlogits(shape_.classes);
      const auto p = softmax(tp.classifier.output);
      for (std::size_t k = 0; k < shape_.classes; ++k) {
        dlogits[k] = seed.likelihood * ((k == t.label ? 1.0 : 0.0) - p[k]);
      }
      classifier_.backward(theta_, tp.classifier, dlogits, grads, dh1[n_steps]);
    }

    const bool heads_active = seed.prior != 0.0 || seed.entropy != 0.0 || seed.location[0] != 0.0 ||
                              seed.location[1] != 0.0;
    if (heads_active) {
      std::vector<double> dloc(2);
      std::vector<double> dscale(s);
      for (std::size_t n = 0; n < n_steps; ++n) {
        const Action& a = t.actions[n];
        const Gaussian loc{tp.loc_head[n].output, location_log_std()};
        const Categorical scale{tp.scale_head[n].output};
        std::fill(dloc.begin(), dloc.end(), 0.0);
        std::fill(dscale.begin(), dscale.end(), 0.0);
        if (seed.prior != 0.0) {
          add_score_wrt_mean(loc, a.location, seed.prior, dloc);
          add_score_wrt_logits(scale, a.scale, seed.prior, dscale);
        }
        if (seed.entropy != 0.0) {
          add_entropy_grad_wrt_logits(scale, seed.entropy, dscale);
        }
        dloc[0] += seed.location[0];
        dloc[1] += seed.location[1];
        loc_head_.backward(theta_, tp.loc_head[n], dloc, grads, dh2[n]);
        scale_head_.backward(theta_, tp.scale_head[n], dscale, grads, dh2[n]);
      }
    }

    for (std::size_t n = n_steps; n >= 1; --n) {
      if (n <= n_steps - 1) {
        cell2_.backward(theta_, tp.cell2[n - 1], dh2[n], grads, dh1[n], dh2[n - 1]);
      }
      cell1_.backward(theta_, tp.cell1[n - 1], dh1[n], grads, {}, dh1[n - 1]);
    }
    context_.backward(theta_, tp.context, dh2[0], grads);
  }

  /// Accumulates coef * d log q(a | y, I) / d eta.
  void backprop_inference(const trajectory_type& t, double coef, std::span<double> grads) const {
    if (grads.size() != eta_.size()) {
      throw InternalError{"gradient buffer does not match eta"};
    }
    if (!t.tape.has_inference) {
      throw InternalError{"trajectory was produced without the inference network"};
    }
    if (coef == 0.0) {
      return;
    }
    const auto& tp = t.tape;
    const std::size_t n_steps = shape_.glimpses;
    std::vector<double> dhq(shape_.inference_hidden, 0.0);
    std::vector<double> dprev(shape_.inference_hidden, 0.0);
    std::vector<double> dloc(2);
    std::vector<double> dscale(shape_.glimpse.scales.size());
    for (std::size_t n = n_steps; n-- > 0;) {
      const Action& a = t.actions[n];
      std::fill(dloc.begin(), dloc.end(), 0.0);
      std::fill(dscale.begin(), dscale.end(), 0.0);
      add_score_wrt_mean(Gaussian{tp.q_loc_head[n].output, location_log_std()}, a.location, coef, dloc);
      add_score_wrt_logits(Categorical{tp.q_scale_head[n].output}, a.scale, coef, dscale);
      q_loc_head_.backward(eta_, tp.q_loc_head[n], dloc, grads, dhq);
      q_scale_head_.backward(eta_, tp.q_scale_head[n], dscale, grads, dhq);
      std::fill(dprev.begin(), dprev.end(), 0.0);
      q_cell_.backward(eta_, tp.q_cell[n], dhq, grads, {}, dprev);
      std::swap(dhq, dprev);
    }
  }

  /// Smallest |pre-activation| over every ReLU unit touched by the trajectory.
  [[nodiscard]] double relu_margin(const trajectory_type& t) const {
    double m = context_.relu_margin(t.tape.context);
    for (const auto& l : t.tape.cell1) m = std::min(m, cell1_.relu_margin(l));
    for (const auto& l : t.tape.cell2) m = std::min(m, cell2_.relu_margin(l));
    for (const auto& l : t.tape.q_cell) m = std::min(m, q_cell_.relu_margin(l));
    return m;
  }

 private:
  [[nodiscard]] std::vector<double> location_log_std() const {
    return std::vector<double>(2, shape_.location_log_std);
  }

  [[nodiscard]] std::vector<double> core_input(const GlimpseObservation& obs, const Action& a) const {
    std::vector<double> x;
    x.reserve(obs.patch.size() + 2 + shape_.glimpse.scales.size());
    x.insert(x.end(), obs.patch.begin(), obs.patch.end());
    x.push_back(std::clamp(a.location[0], -1.0, 1.0));
    x.push_back(std::clamp(a.location[1], -1.0, 1.0));
    for (std::size_t k = 0; k < shape_.glimpse.scales.size(); ++k) {
      x.push_back(k == a.scale ? 1.0 : 0.0);
    }
    return x;
  }

  trajectory_type run(const Image& image, std::size_t label, Proposal proposal, double tau,
                      std::span<const Action> forced, Rng* rng) const {
    if (label >= shape_.classes) {
      throw DomainError{"label out of range"};
    }
    if (image.height != shape_.canvas || image.width != shape_.canvas) {
      throw ConfigError{"image size differs from the network canvas"};
    }
    const bool use_q = proposal == Proposal::inference;
    trajectory_type t;
    t.label = label;
    auto& tp = t.tape;
    tp.has_inference = use_q;
    const std::size_t n_steps = shape_.glimpses;

    tp.context = context_.forward(theta_, low_res_view(image, shape_.low_res));
    std::vector<double> h2 = tp.context.output;
    std::vector<double> h1(shape_.hidden1, 0.0);
    std::vector<double> hq(shape_.inference_hidden, 0.0);
    std::vector<double> q_input(shape_.hidden2 + shape_.classes, 0.0);
    const auto log_std = location_log_std();

    for (std::size_t n = 0; n < n_steps; ++n) {
      tp.loc_head.push_back(loc_head_.forward(theta_, h2));
      tp.scale_head.push_back(scale_head_.forward(theta_, h2));
      const Gaussian p_loc{tp.loc_head.back().output, log_std};
      const Categorical p_scale{tp.scale_head.back().output};

      std::optional<Gaussian> q_loc;
      std::optional<Categorical> q_scale;
      if (use_q) {
        std::copy(h2.begin(), h2.end(), q_input.begin());
        std::fill(q_input.begin() + static_cast<long>(shape_.hidden2), q_input.end(), 0.0);
        q_input[shape_.hidden2 + label] = 1.0;
        tp.q_cell.push_back(q_cell_.forward(eta_, q_input, hq));
        hq = tp.q_cell.back().output;
        tp.q_loc_head.push_back(q_loc_head_.forward(eta_, hq));
        tp.q_scale_head.push_back(q_scale_head_.forward(eta_, hq));
        q_loc = Gaussian{tp.q_loc_head.back().output, log_std};
        q_scale = Categorical{tp.q_scale_head.back().output};
      }

      const Gaussian s_loc = temperature_scaled(use_q ? *q_loc : p_loc, tau);
      const Categorical s_scale = temperature_scaled(use_q ? *q_scale : p_scale, tau);
      Action a;
      if (forced.empty()) {
        const auto loc = sample(s_loc, *rng);
        a.location = {loc[0], loc[1]};
        a.scale = sample(s_scale, *rng);
      } else {
        a = forced[n];
        if (a.discrete()) {
          throw DomainError{"the attention network emits continuous locations"};
        }
      }
      t.step_log_prior.push_back(log_prob(p_loc, a.location) + log_prob(p_scale, a.scale));
      t.step_log_proposal.push_back(log_prob(s_loc, a.location) + log_prob(s_scale, a.scale));
      t.step_log_q.push_back(use_q ? log_prob(*q_loc, a.location) + log_prob(*q_scale, a.scale)
                                   : std::numeric_limits<double>::quiet_NaN());
      t.step_scale_entropy.push_back(entropy(p_scale));
      t.step_location_mean.push_back({p_loc.mean[0], p_loc.mean[1]});

      auto obs = extract_glimpse(image, a, shape_.glimpse);
      tp.cell1.push_back(cell1_.forward(theta_, core_input(obs, a), h1));
      h1 = tp.cell1.back().output;
      if (n + 1 < n_steps) {
        tp.cell2.push_back(cell2_.forward(theta_, h1, h2));
        h2 = tp.cell2.back().output;
      }
      t.actions.push_back(a);
      t.observations.push_back(std::move(obs));
    }
    tp.classifier = classifier_.forward(theta_, h1);
    t.class_log_probs = log_softmax(tp.classifier.output);
    for (std::size_t n = 0; n < n_steps; ++n) {
      t.log_prior += t.step_log_prior[n];
      t.log_proposal += t.step_log_proposal[n];
      t.log_q += t.step_log_q[n];
    }
    t.log_likelihood = t.class_log_probs[label];
    return t;
  }

  NetworkShape shape_;
  ParameterVector theta_;
  ParameterVector eta_;
  Layer context_;
  Layer cell1_;
  Layer cell2_;
  Layer loc_head_;
  Layer scale_head_;
  Layer classifier_;
  Layer q_cell_;
  Layer q_loc_head_;
  Layer q_scale_head_;
};

/// Prior rollout: actions from p(a | I, theta), optionally temperature-scaled.
template <typename Model>
typename Model::trajectory_type rollout_prior(const Model& m, const typename Model::context_type& ctx,
                                              std::size_t label, Rng& rng, double tau = 1.0) {
  return m.rollout(ctx, label, Proposal::prior, rng, tau);
}

/// Proposal rollout: actions from q(a | y, I, eta), optionally temperature-scaled.
template <typename Model>
typename Model::trajectory_type rollout_proposal(const Model& m,
                                                 const typename Model::context_type& ctx,
                                                 std::size_t label, Rng& rng, double tau = 1.0) {
  return m.rollout(ctx, label, Proposal::inference, rng, tau);
}

}  // namespace wsram

#endif  // WSRAM_MODEL_ATTENTION_NETWORK_HPP
