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

#ifndef WSRAM_ORACLE_IDENTITY_SUITE_HPP
#define WSRAM_ORACLE_IDENTITY_SUITE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <wsram/diffnet/finite_difference.hpp>
#include <wsram/env/toy_world.hpp>
#include <wsram/estimators/estimators.hpp>
#include <wsram/model/tabular_model.hpp>
#include <wsram/oracle/enumeration.hpp>
#include <wsram/rng.hpp>

namespace wsram {

struct IdentityCheck {
  std::string name;
  double tolerance = 0.0;
  double worst = 0.0;  // largest observed violation over all worlds
  std::size_t cases = 0;
  std::size_t failures = 0;

  [[nodiscard]] bool passed() const noexcept { return cases > 0 && failures == 0; }
};

struct IdentityReport {
  std::uint64_t seed = 0;
  std::size_t worlds = 0;
  std::vector<IdentityCheck> checks;

  [[nodiscard]] bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
  }
};

struct RandomOracleCase {
  TabularModel model;
  std::size_t label = 0;
  std::size_t samples = 1;
};

/**
 * World i of the suite: K in {2,3}, S in {1,2}, N in {1,2}, C in {2,3}
 * cycle with i; theta and eta get independent N(0, 1) logits so priors and
 * proposals differ per prefix.
 */
inline RandomOracleCase random_oracle_case(std::uint64_t seed, std::size_t i) {
  Rng rng = make_rng(seed, "oracle-world", i);
  const std::size_t k = 2 + i % 2;
  const std::size_t s = 1 + (i / 2) % 2;
  const std::size_t n = 1 + (i / 4) % 2;
  const std::size_t c = 2 + (i / 8) % 2;
  RandomOracleCase rc{TabularModel{random_toy_world(k, s, c, rng), n}, 0, 1 + i % 3};
  for (double& v : rc.model.theta().values()) {
    v += standard_normal(rng);
  }
  for (double& v : rc.model.eta().values()) {
    v = standard_normal(rng);
  }
  rc.label = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(c)) % c;
  return rc;
}

namespace detail {

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

inline double max_abs(std::span<const double> a) {
  double worst = 0.0;
  for (double v : a) {
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

class CheckTable {
 public:
  IdentityCheck& get(const std::string& name, double tol) {
    for (auto& c : checks_) {
      if (c.name == name) {
        return c;
      }
    }
    checks_.push_back(IdentityCheck{name, tol});
    return checks_.back();
  }

  /// Records a violation amount; the case passes when it is <= tolerance.
  void record(const std::string& name, double tol, double violation) {
    auto& c = get(name, tol);
    ++c.cases;
    if (!(violation <= tol)) {
      ++c.failures;
    }
    if (std::isnan(violation)) {
      c.worst = violation;
    } else if (!std::isnan(c.worst)) {
      c.worst = std::max(c.worst, violation);
    }
  }

  std::vector<IdentityCheck> take() { return std::move(checks_); }

 private:
  std::vector<IdentityCheck> checks_;
};

}  // namespace detail

/// Runs every enumeration identity on `worlds` seeded random toy worlds.
inline IdentityReport run_identity_suite(std::uint64_t seed, std::size_t worlds = 50) {
  detail::CheckTable table;
  for (std::size_t i = 0; i < worlds; ++i) {
    auto rc = random_oracle_case(seed, i);
    TabularModel& model = rc.model;
    const std::size_t y = rc.label;
    const auto r = enumerate(model, y);

    double prior_sum = 0.0;
    double post_sum = 0.0;
    double joint_sum = 0.0;
    std::vector<double> prior_score(model.theta().size(), 0.0);
    std::vector<double> q_score(model.eta().size(), 0.0);
    for (const auto& s : r.trajectories) {
      prior_sum += s.prior;
      post_sum += s.posterior;
      joint_sum += s.joint;
      // E_q[(p/q) d log p] and E_q[d log q]
      model.backprop_prediction(s.trajectory, PredictionSeed{0.0, s.proposal * (s.prior / s.proposal)},
                                prior_score);
      model.backprop_inference(s.trajectory, s.proposal, q_score);
    }
    table.record("prior mass sums to one", 1e-12, std::abs(prior_sum - 1.0));
    table.record("posterior mass sums to one", 1e-12, std::abs(post_sum - 1.0));
    table.record("log marginal equals log of summed joint", 1e-12, std::abs(r.ell - std::log(joint_sum)));
    table.record("prior score identity", 1e-10, detail::max_abs(prior_score));
    table.record("proposal score identity", 1e-10, detail::max_abs(q_score));
    table.record("KL is nonnegative", 1e-12, std::max(0.0, -r.kl));

    EnumerationOptions shuffled;
    shuffled.shuffle_seed = seed + i;
    const auto rs = enumerate(model, y, shuffled);
    table.record("enumeration order invariance", 1e-12,
                 std::max({std::abs(rs.ell - r.ell), std::abs(rs.f - r.f), std::abs(rs.kl - r.kl)}));

    // Bounds with exact tuple enumeration, prior and proposal sampling.
    for (Proposal prop : {Proposal::prior, Proposal::inference}) {
      double previous = -std::numeric_limits<double>::infinity();
      for (std::size_t m = 1; m <= 3; ++m) {
        const auto b = expected_bounds(model, y, m, prop);
        const double lower = prop == Proposal::prior ? r.f : b.f_hat;
        table.record("F <= L_M <= l", 1e-12, std::max({0.0, lower - b.lm_hat, b.lm_hat - r.ell}));
        table.record("L_M nondecreasing in M", 1e-12, std::max(0.0, previous - b.lm_hat));
        if (prop == Proposal::prior && m == 1) {
          table.record("L_1 under the prior equals F", 1e-12, std::abs(b.lm_hat - r.f));
        }
        previous = b.lm_hat;
      }
    }

    const std::size_t m = rc.samples;
    const auto wake = estimator_expectation(EstimatorTag::wake_q, model, y, m);
    const auto wake_c = estimator_expectation(EstimatorTag::wake_q_c, model, y, m);
    table.record("WAKE-Q+c expectation equals WAKE-Q expectation", 1e-10, detail::max_abs_diff(wake, wake_c));

    const auto [f_exact, f_grad] = exact_variational_bound_and_grad(model, y);
    const auto var = estimator_expectation(EstimatorTag::var, model, y, m);
    table.record("VAR expectation equals exact bound gradient", 1e-10, detail::max_abs_diff(var, f_grad));

    const auto ell_grad = exact_grad_marginal(model, y);
    {
      const double step = 1e-4;
      const auto fd_ell = finite_difference_gradient(
          [&](const ParameterVector&) { return exact_marginal(model, y); }, model.theta(), step);
      const auto fd_f = finite_difference_gradient(
          [&](const ParameterVector&) { return enumerate(model, y).f; }, model.theta(), step);
      table.record("oracle gradients match finite differences", 1e-6,
                   std::max(max_relative_error(ell_grad, fd_ell, 1e-5), max_relative_error(f_grad, fd_f, 1e-5)));
    }

    TabularModel exact_q = model;
    set_proposal_to_posterior(exact_q, y);
    table.record("KL vanishes at the posterior", 1e-12, std::abs(exact_kl(exact_q, y)));
    const auto wsram = estimator_expectation(EstimatorTag::wsram_q, exact_q, y, m);
    table.record("WSRAM with posterior proposal equals exact marginal gradient", 1e-10,
                 detail::max_abs_diff(wsram, ell_grad));
    const auto wake_at_post = estimator_expectation(EstimatorTag::wake_q, exact_q, y, m);
    table.record("WAKE-Q expectation vanishes at the posterior", 1e-10, detail::max_abs(wake_at_post));
  }
  return IdentityReport{seed, worlds, table.take()};
}

}  // namespace wsram

#endif  // WSRAM_ORACLE_IDENTITY_SUITE_HPP
