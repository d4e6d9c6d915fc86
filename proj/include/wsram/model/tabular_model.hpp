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

#ifndef WSRAM_MODEL_TABULAR_MODEL_HPP
#define WSRAM_MODEL_TABULAR_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <wsram/diffnet/distributions.hpp>
#include <wsram/diffnet/parameter_vector.hpp>
#include <wsram/env/toy_world.hpp>
#include <wsram/errors.hpp>
#include <wsram/model/trajectory.hpp>

/**
 * \file
 * \brief Attention model over a ToyWorld with fully tabular parameters.
 *
 * theta holds, for each glimpse step n, one row of logits over the K*S
 * actions for every action prefix a_{1:n-1}, plus a likelihood logit table
 * L[action][class]; p(y | a) = softmax_y(sum_n L[a_n]). For N = 1 and the
 * default initialization this reproduces the world's tables exactly.
 *
 * eta holds one row of proposal logits per (step, prefix, label), so the
 * proposal can represent any distribution over sequences, in particular the
 * exact posterior.
 */

namespace wsram {

struct ToyInput {};

struct TabularTape {
  std::vector<std::size_t> prefix;
  std::vector<std::size_t> action;
  std::vector<std::vector<double>> prior_logits;
  std::vector<std::vector<double>> q_logits;
  std::vector<double> class_probs;
};

class TabularModel {
 public:
  using context_type = ToyInput;
  using trajectory_type = Trajectory<TabularTape>;

  TabularModel(const ToyWorld& world, std::size_t glimpses) : world_{world}, glimpses_{glimpses} {
    if (glimpses == 0) {
      throw ConfigError{"need at least one glimpse"};
    }
    const std::size_t a = world.actions();
    std::size_t prefixes = 1;
    for (std::size_t n = 0; n < glimpses; ++n) {
      prior_.push_back(theta_.add_slice("prior.step" + std::to_string(n), prefixes * a));
      q_.push_back(eta_.add_slice("q.step" + std::to_string(n), prefixes * world.classes * a));
      prefixes *= a;
    }
    likelihood_ = theta_.add_slice("likelihood", a * world.classes);
    reset_to_world();
  }

  /// theta from the world tables (log probabilities), eta uniform.
  void reset_to_world() {
    const std::size_t a = world_.actions();
    for (std::size_t n = 0; n < glimpses_; ++n) {
      auto v = theta_.values(prior_[n]);
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::log(world_.prior[i % a]);
      }
      auto q = eta_.values(q_[n]);
      std::fill(q.begin(), q.end(), 0.0);
    }
    auto l = theta_.values(likelihood_);
    for (std::size_t i = 0; i < l.size(); ++i) {
      l[i] = std::log(world_.likelihood[i]);
    }
  }

  [[nodiscard]] const ToyWorld& world() const noexcept { return world_; }
  [[nodiscard]] std::size_t glimpses() const noexcept { return glimpses_; }
  [[nodiscard]] std::size_t num_classes() const noexcept { return world_.classes; }
  [[nodiscard]] std::size_t num_actions() const noexcept { return world_.actions(); }
  [[nodiscard]] const ParameterVector& theta() const noexcept { return theta_; }
  [[nodiscard]] ParameterVector& theta() noexcept { return theta_; }
  [[nodiscard]] const ParameterVector& eta() const noexcept { return eta_; }
  [[nodiscard]] ParameterVector& eta() noexcept { return eta_; }

  [[nodiscard]] std::vector<double> baseline_features(const ToyInput&) const { return {1.0}; }

  [[nodiscard]] std::span<double> prior_logits(std::size_t step, std::size_t prefix) {
    return theta_.values(prior_[step]).subspan(prefix * num_actions(), num_actions());
  }
  [[nodiscard]] std::span<const double> prior_logits(std::size_t step, std::size_t prefix) const {
    return theta_.values(prior_[step]).subspan(prefix * num_actions(), num_actions());
  }
  [[nodiscard]] std::span<double> proposal_logits(std::size_t step, std::size_t prefix,
                                                  std::size_t label) {
    return eta_.values(q_[step]).subspan(q_row(prefix, label), num_actions());
  }
  [[nodiscard]] std::span<const double> proposal_logits(std::size_t step, std::size_t prefix,
                                                        std::size_t label) const {
    return eta_.values(q_[step]).subspan(q_row(prefix, label), num_actions());
  }
  [[nodiscard]] std::span<const double> likelihood_logits(std::size_t action) const {
    return theta_.values(likelihood_).subspan(action * num_classes(), num_classes());
  }

  /// Makes q(a | y) equal to the prior for every label.
  void copy_prior_to_proposal() {
    std::size_t prefixes = 1;
    for (std::size_t n = 0; n < glimpses_; ++n) {
      for (std::size_t pre = 0; pre < prefixes; ++pre) {
        for (std::size_t y = 0; y < num_classes(); ++y) {
          const auto src = prior_logits(n, pre);
          auto dst = proposal_logits(n, pre, y);
          std::copy(src.begin(), src.end(), dst.begin());
        }
      }
      prefixes *= num_actions();
    }
  }

  [[nodiscard]] Action to_action(std::size_t index) const {
    Action a;
    a.cell = static_cast<int>(index / world_.scales);
    a.scale = index % world_.scales;
    return a;
  }
  [[nodiscard]] std::size_t action_index(const Action& a) const {
    if (a.cell < 0 || static_cast<std::size_t>(a.cell) >= world_.cells || a.scale >= world_.scales) {
      throw DomainError{"action outside the toy world"};
    }
    return static_cast<std::size_t>(a.cell) * world_.scales + a.scale;
  }

  [[nodiscard]] trajectory_type rollout(const ToyInput& ctx, std::size_t label, Proposal proposal,
                                        Rng& rng, double tau = 1.0) const {
    return run(ctx, label, proposal, tau, {}, &rng);
  }

  /// Scores a given action sequence (teacher forcing) under both networks.
  [[nodiscard]] trajectory_type replay(const ToyInput& ctx, std::size_t label,
                                       std::span<const Action> actions, Proposal proposal,
                                       double tau = 1.0) const {
    if (actions.size() != glimpses_) {
      throw ConfigError{"replayed sequence length differs from the glimpse count"};
    }
    return run(ctx, label, proposal, tau, actions, nullptr);
  }

  void backprop_prediction(const trajectory_type& t, const PredictionSeed& seed,
                           std::span<double> grads) const {
    check_grads(grads, theta_);
    const std::size_t a = num_actions();
    for (std::size_t n = 0; n < glimpses_; ++n) {
      auto row = grads.subspan(prior_[n].offset + t.tape.prefix[n] * a, a);
      const Categorical d{t.tape.prior_logits[n]};
      if (seed.prior != 0.0) {
        add_score_wrt_logits(d, t.tape.action[n], seed.prior, row);
      }
      if (seed.entropy != 0.0) {
        add_entropy_grad_wrt_logits(d, seed.entropy, row);
      }
    }
    if (seed.likelihood != 0.0) {
      for (std::size_t n = 0; n < glimpses_; ++n) {
        auto row = grads.subspan(likelihood_.offset + t.tape.action[n] * num_classes(), num_classes());
        for (std::size_t k = 0; k < num_classes(); ++k) {
          row[k] += seed.likelihood * ((k == t.label ? 1.0 : 0.0) - t.tape.class_probs[k]);
        }
      }
    }
  }

  void backprop_inference(const trajectory_type& t, double coef, std::span<double> grads) const {
    check_grads(grads, eta_);
    if (coef == 0.0) {
      return;
    }
    for (std::size_t n = 0; n < glimpses_; ++n) {
      auto row = grads.subspan(q_[n].offset + q_row(t.tape.prefix[n], t.label), num_actions());
      add_score_wrt_logits(Categorical{t.tape.q_logits[n]}, t.tape.action[n], coef, row);
    }
  }

 private:
  [[nodiscard]] std::size_t q_row(std::size_t prefix, std::size_t label) const {
    return (prefix * num_classes() + label) * num_actions();
  }

  static void check_grads(std::span<const double> g, const ParameterVector& p) {
    if (g.size() != p.size()) {
      throw InternalError{"gradient buffer does not match the parameter vector"};
    }
  }

  trajectory_type run(const ToyInput&, std::size_t label, Proposal proposal, double tau,
                      std::span<const Action> forced, Rng* rng) const {
    if (label >= num_classes()) {
      throw DomainError{"label out of range"};
    }
    trajectory_type t;
    t.label = label;
    const std::size_t a = num_actions();
    std::size_t prefix = 0;
    std::vector<double> class_logits(num_classes(), 0.0);
    for (std::size_t n = 0; n < glimpses_; ++n) {
      const auto pl = prior_logits(n, prefix);
      const auto ql = proposal_logits(n, prefix, label);
      const Categorical p{{pl.begin(), pl.end()}};
      const Categorical q{{ql.begin(), ql.end()}};
      const Categorical sampler = temperature_scaled(proposal == Proposal::prior ? p : q, tau);
      const std::size_t act = rng != nullptr ? sample(sampler, *rng) : action_index(forced[n]);

      t.actions.push_back(to_action(act));
      t.step_log_prior.push_back(log_prob(p, act));
      t.step_log_proposal.push_back(log_prob(sampler, act));
      t.step_log_q.push_back(log_prob(q, act));
      t.step_scale_entropy.push_back(entropy(p));
      t.step_location_mean.push_back({0.0, 0.0});
      t.tape.prefix.push_back(prefix);
      t.tape.action.push_back(act);
      t.tape.prior_logits.push_back(p.logits);
      t.tape.q_logits.push_back(q.logits);

      const auto lik = likelihood_logits(act);
      for (std::size_t k = 0; k < num_classes(); ++k) {
        class_logits[k] += lik[k];
      }
      prefix = prefix * a + act;
    }
    t.class_log_probs = log_softmax(class_logits);
    t.tape.class_probs = softmax(class_logits);
    for (std::size_t n = 0; n < glimpses_; ++n) {
      t.log_prior += t.step_log_prior[n];
      t.log_proposal += t.step_log_proposal[n];
      t.log_q += t.step_log_q[n];
    }
    t.log_likelihood = t.class_log_probs[label];
    return t;
  }

  ToyWorld world_;
  std::size_t glimpses_ = 1;
  ParameterVector theta_;
  ParameterVector eta_;
  std::vector<Slice> prior_;
  std::vector<Slice> q_;
  Slice likelihood_;
};

}  // namespace wsram

#endif  // WSRAM_MODEL_TABULAR_MODEL_HPP
