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

#ifndef WSRAM_ORACLE_ENUMERATION_HPP
#define WSRAM_ORACLE_ENUMERATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <wsram/diffnet/distributions.hpp>
#include <wsram/errors.hpp>
#include <wsram/estimators/estimators.hpp>
#include <wsram/estimators/importance_weights.hpp>
#include <wsram/model/tabular_model.hpp>
#include <wsram/rng.hpp>

/**
 * \file
 * \brief Exact quantities for a TabularModel by summing over every action sequence.
 */

namespace wsram {

struct EnumerationBudget {
  std::uint64_t sequences = 1'000'000;
  std::uint64_t tuples = 10'000'000;
};

struct EnumerationOptions {
  EnumerationBudget budget{};
  /// When set, sequences are visited in a seeded random order.
  std::optional<std::uint64_t> shuffle_seed{};
};

struct EnumeratedSequence {
  std::vector<std::size_t> actions;
  double prior = 0.0;       // p(a)
  double likelihood = 0.0;  // p(y | a)
  double joint = 0.0;       // p(a) p(y | a)
  double posterior = 0.0;   // p(a | y)
  double proposal = 0.0;    // q(a | y)
  Trajectory<TabularTape> trajectory;
};

struct EnumerationReport {
  std::vector<EnumeratedSequence> trajectories;
  double ell = 0.0;           // log sum_a p(a) p(y|a)
  double f = 0.0;             // sum_a p(a) log p(y|a)
  double kl = 0.0;            // KL(p(a|y) || q(a|y)); +inf if q misses posterior mass
  double cross_entropy = 0.0; // -sum_a p(a|y) log q(a|y)
};

namespace detail {

inline std::uint64_t checked_power(std::uint64_t base, std::uint64_t exp, std::uint64_t limit,
                                   const char* what) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > limit / base) {
      throw SizeError{std::string{what} + " exceed the enumeration budget"};
    }
    r *= base;
  }
  if (r > limit) {
    throw SizeError{std::string{what} + " exceed the enumeration budget"};
  }
  return r;
}

inline std::vector<std::size_t> digits_of(std::uint64_t index, std::size_t base, std::size_t len) {
  std::vector<std::size_t> d(len);
  for (std::size_t n = len; n-- > 0;) {
    d[n] = static_cast<std::size_t>(index % base);
    index /= base;
  }
  return d;
}

inline std::vector<std::uint64_t> visit_order(std::uint64_t count, const std::optional<std::uint64_t>& seed) {
  std::vector<std::uint64_t> order(count);
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  if (seed) {
    Rng rng = make_rng(*seed, "enumeration-order");
    std::shuffle(order.begin(), order.end(), rng);
  }
  return order;
}

}  // namespace detail

/// Number of action sequences; throws SizeError above the budget.
inline std::uint64_t sequence_count(const TabularModel& model, const EnumerationBudget& budget = {}) {
  return detail::checked_power(model.num_actions(), model.glimpses(), budget.sequences, "action sequences");
}

/// Every action sequence with exact prior, likelihood, posterior and proposal mass.
inline EnumerationReport enumerate(const TabularModel& model, std::size_t label,
                                   const EnumerationOptions& opt = {}) {
  const std::uint64_t count = sequence_count(model, opt.budget);
  EnumerationReport r;
  r.trajectories.reserve(count);
  std::vector<double> log_joint;
  log_joint.reserve(count);
  for (std::uint64_t idx : detail::visit_order(count, opt.shuffle_seed)) {
    EnumeratedSequence s;
    s.actions = detail::digits_of(idx, model.num_actions(), model.glimpses());
    std::vector<Action> acts;
    for (auto a : s.actions) {
      acts.push_back(model.to_action(a));
    }
    s.trajectory = model.replay(ToyInput{}, label, acts, Proposal::inference);
    s.prior = std::exp(s.trajectory.log_prior);
    s.likelihood = std::exp(s.trajectory.log_likelihood);
    s.joint = std::exp(s.trajectory.log_prior + s.trajectory.log_likelihood);
    s.proposal = std::exp(s.trajectory.log_q);
    log_joint.push_back(s.trajectory.log_prior + s.trajectory.log_likelihood);
    r.f += s.prior * s.trajectory.log_likelihood;
    r.trajectories.push_back(std::move(s));
  }
  r.ell = log_sum_exp(log_joint);
  for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
    auto& s = r.trajectories[i];
    const double log_post = log_joint[i] - r.ell;
    s.posterior = std::exp(log_post);
    if (s.posterior > 0.0) {
      if (s.trajectory.log_q == -std::numeric_limits<double>::infinity()) {
        r.kl = std::numeric_limits<double>::infinity();
        r.cross_entropy = std::numeric_limits<double>::infinity();
      } else if (std::isfinite(r.kl)) {
        r.kl += s.posterior * (log_post - s.trajectory.log_q);
        r.cross_entropy -= s.posterior * s.trajectory.log_q;
      }
    }
  }
  return r;
}

inline double exact_marginal(const TabularModel& model, std::size_t label, const EnumerationOptions& opt = {}) {
  return enumerate(model, label, opt).ell;
}

/// Gradient of l wrt theta: sum_a p(a|y) [d log p(y|a) + d log p(a)].
inline std::vector<double> exact_grad_marginal(const TabularModel& model, std::size_t label,
                                               const EnumerationOptions& opt = {}) {
  const auto r = enumerate(model, label, opt);
  std::vector<double> g(model.theta().size(), 0.0);
  for (const auto& s : r.trajectories) {
    model.backprop_prediction(s.trajectory, PredictionSeed{s.posterior, s.posterior}, g);
  }
  return g;
}

/// F and its gradient: sum_a p(a) [d log p(y|a) + log p(y|a) d log p(a)].
inline std::pair<double, std::vector<double>> exact_variational_bound_and_grad(
    const TabularModel& model, std::size_t label, const EnumerationOptions& opt = {}) {
  const auto r = enumerate(model, label, opt);
  std::vector<double> g(model.theta().size(), 0.0);
  for (const auto& s : r.trajectories) {
    model.backprop_prediction(s.trajectory,
                              PredictionSeed{s.prior, s.prior * s.trajectory.log_likelihood}, g);
  }
  return {r.f, std::move(g)};
}

inline double exact_kl(const TabularModel& model, std::size_t label, const EnumerationOptions& opt = {}) {
  return enumerate(model, label, opt).kl;
}

/// Gradient of KL(p(a|y) || q(a|y)) wrt eta: -sum_a p(a|y) d log q(a|y).
inline std::vector<double> exact_kl_grad(const TabularModel& model, std::size_t label,
                                         const EnumerationOptions& opt = {}) {
  const auto r = enumerate(model, label, opt);
  std::vector<double> g(model.eta().size(), 0.0);
  for (const auto& s : r.trajectories) {
    model.backprop_inference(s.trajectory, -s.posterior, g);
  }
  return g;
}

/**
 * Sets q(. | y) to the exact posterior p(a | y) for the given label by writing
 * the conditional posterior of each step given its prefix into eta.
 */
inline void set_proposal_to_posterior(TabularModel& model, std::size_t label,
                                      const EnumerationBudget& budget = {}) {
  const std::size_t a = model.num_actions();
  const std::size_t n_steps = model.glimpses();
  const auto r = enumerate(model, label, EnumerationOptions{budget, std::nullopt});
  // mass[n][prefix * a + act] = posterior mass of sequences starting with prefix, act.
  std::vector<std::vector<double>> mass(n_steps);
  std::size_t prefixes = 1;
  for (std::size_t n = 0; n < n_steps; ++n) {
    mass[n].assign(prefixes * a, 0.0);
    prefixes *= a;
  }
  for (const auto& s : r.trajectories) {
    std::size_t key = 0;
    for (std::size_t n = 0; n < n_steps; ++n) {
      key = key * a + s.actions[n];
      mass[n][key] += s.posterior;
    }
  }
  prefixes = 1;
  for (std::size_t n = 0; n < n_steps; ++n) {
    for (std::size_t pre = 0; pre < prefixes; ++pre) {
      auto row = model.proposal_logits(n, pre, label);
      for (std::size_t k = 0; k < a; ++k) {
        row[k] = std::log(mass[n][pre * a + k]);
      }
    }
    prefixes *= a;
  }
}

/**
 * Exact expectation of an estimator over all M-tuples of independent
 * proposal samples, each tuple weighted by its joint proposal probability.
 */
inline std::vector<double> estimator_expectation(EstimatorTag tag, const TabularModel& model, std::size_t label,
                                                 std::size_t samples, double baseline = 0.0,
                                                 const EnumerationBudget& budget = {}) {
  if (samples == 0) {
    throw DomainError{"estimators need M >= 1 samples"};
  }
  const std::uint64_t seqs = sequence_count(model, budget);
  const std::uint64_t tuples = detail::checked_power(seqs, samples, budget.tuples, "sample tuples");
  const Proposal proposal = proposal_for(tag);
  std::vector<Trajectory<TabularTape>> pool;
  std::vector<double> prob;
  pool.reserve(seqs);
  for (std::uint64_t idx = 0; idx < seqs; ++idx) {
    std::vector<Action> acts;
    for (auto a : detail::digits_of(idx, model.num_actions(), model.glimpses())) {
      acts.push_back(model.to_action(a));
    }
    pool.push_back(model.replay(ToyInput{}, label, acts, proposal));
    prob.push_back(std::exp(pool.back().log_proposal));
  }
  std::vector<double> out(is_wake_q(tag) ? model.eta().size() : model.theta().size(), 0.0);
  std::vector<Trajectory<TabularTape>> buf(samples);
  for (std::uint64_t t = 0; t < tuples; ++t) {
    const auto idx = detail::digits_of(t, static_cast<std::size_t>(seqs), samples);
    double p = 1.0;
    for (std::size_t m = 0; m < samples; ++m) {
      p *= prob[idx[m]];
      buf[m] = pool[idx[m]];
    }
    if (p == 0.0) {
      continue;
    }
    accumulate_estimate(tag, model, std::span<const Trajectory<TabularTape>>{buf}, baseline, p, out);
  }
  return out;
}

/**
 * Exact expectations of F-hat (mean log w) and L_M-hat (log mean w) over all
 * M-tuples drawn from `proposal`.
 */
inline BoundEstimates expected_bounds(const TabularModel& model, std::size_t label, std::size_t samples,
                                      Proposal proposal, const EnumerationBudget& budget = {}) {
  if (samples == 0) {
    throw DomainError{"bounds need M >= 1 samples"};
  }
  const std::uint64_t seqs = sequence_count(model, budget);
  const std::uint64_t tuples = detail::checked_power(seqs, samples, budget.tuples, "sample tuples");
  std::vector<double> log_w;
  std::vector<double> prob;
  for (std::uint64_t idx = 0; idx < seqs; ++idx) {
    std::vector<Action> acts;
    for (auto a : detail::digits_of(idx, model.num_actions(), model.glimpses())) {
      acts.push_back(model.to_action(a));
    }
    const auto t = model.replay(ToyInput{}, label, acts, proposal);
    log_w.push_back(t.log_weight());
    prob.push_back(std::exp(t.log_proposal));
  }
  BoundEstimates e;
  std::vector<double> lw(samples);
  for (std::uint64_t t = 0; t < tuples; ++t) {
    const auto idx = detail::digits_of(t, static_cast<std::size_t>(seqs), samples);
    double p = 1.0;
    for (std::size_t m = 0; m < samples; ++m) {
      p *= prob[idx[m]];
      lw[m] = log_w[idx[m]];
    }
    if (p == 0.0) {
      continue;
    }
    const auto b = bound_estimates(weights_from_log(lw));
    e.f_hat += p * b.f_hat;
    e.lm_hat += p * b.lm_hat;
    e.clamped = e.clamped || b.clamped;
  }
  return e;
}

}  // namespace wsram

#endif  // WSRAM_ORACLE_ENUMERATION_HPP
