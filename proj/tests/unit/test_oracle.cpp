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

#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"

namespace wsram {
namespace {

TEST(Enumeration, FixtureValues) {
  const TabularModel m{toy_fixture_world(), 1};
  const auto r = enumerate(m, 0);
  ASSERT_EQ(r.trajectories.size(), 2u);
  EXPECT_NEAR(r.ell, std::log(0.58), 1e-12);
  EXPECT_NEAR(r.f, 0.6 * std::log(0.9) + 0.4 * std::log(0.1), 1e-12);
  EXPECT_NEAR(r.trajectories[0].posterior, 27.0 / 29.0, 1e-12);
  EXPECT_NEAR(r.trajectories[1].posterior, 2.0 / 29.0, 1e-12);
  // KL from the posterior (27/29, 2/29) to the uniform proposal
  const double p0 = 27.0 / 29.0;
  const double p1 = 2.0 / 29.0;
  const double kl = p0 * std::log(p0 / 0.5) + p1 * std::log(p1 / 0.5);
  EXPECT_NEAR(exact_kl(m, 0), kl, 1e-12);
  EXPECT_NEAR(kl, 0.44219, 1e-5);
}

TEST(Enumeration, MassesSumToOne) {
  for (std::size_t i = 0; i < 16; ++i) {
    const auto rc = random_oracle_case(3, i);
    const auto r = enumerate(rc.model, rc.label);
    double prior = 0.0;
    double post = 0.0;
    double joint = 0.0;
    for (const auto& s : r.trajectories) {
      prior += s.prior;
      post += s.posterior;
      joint += s.joint;
    }
    EXPECT_NEAR(prior, 1.0, 1e-12);
    EXPECT_NEAR(post, 1.0, 1e-12);
    EXPECT_NEAR(r.ell, std::log(joint), 1e-12);
  }
}

TEST(Enumeration, SingleCertainAction) {
  const auto w = make_toy_world(1, 1, {1.0}, {0.3, 0.7});
  const TabularModel m{w, 1};
  EXPECT_NEAR(exact_marginal(m, 1), std::log(0.7), 1e-15);
  const auto [f, g] = exact_variational_bound_and_grad(m, 1);
  EXPECT_NEAR(f, std::log(0.7), 1e-15);
  EXPECT_NEAR(f, exact_marginal(m, 1), 1e-15);
  // K = 1: the marginal gradient is the likelihood score alone
  const auto gm = exact_grad_marginal(m, 1);
  const std::vector<Action> a{Action{{0, 0}, 0, 0}};
  const auto t = m.replay(ToyInput{}, 1, a, Proposal::prior);
  std::vector<double> ref(m.theta().size(), 0.0);
  m.backprop_prediction(t, PredictionSeed{1.0, 0.0}, ref);
  for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(gm[k], ref[k], 1e-12);
}

TEST(Enumeration, ConstantLikelihood) {
  const auto w = make_toy_world(4, 1, {0.25, 0.25, 0.25, 0.25}, {0.2, 0.8, 0.2, 0.8, 0.2, 0.8, 0.2, 0.8});
  TabularModel m{w, 1};
  EXPECT_NEAR(exact_marginal(m, 1), std::log(0.8), 1e-12);
  // the prior logits come first in theta and carry no signal here
  const auto g = exact_grad_marginal(m, 1);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(g[k], 0.0, 1e-10);
}

TEST(Enumeration, GradientsMatchFiniteDifferences) {
  for (std::size_t i = 0; i < 8; ++i) {
    auto rc = random_oracle_case(11, i);
    auto& m = rc.model;
    const auto y = rc.label;
    const auto g = exact_grad_marginal(m, y);
    const auto fg = finite_difference_gradient([&](const ParameterVector&) { return exact_marginal(m, y); },
                                               m.theta(), 1e-4);
    EXPECT_LT(max_relative_error(g, fg), 1e-6);
    const auto [f, gf] = exact_variational_bound_and_grad(m, y);
    const auto ff = finite_difference_gradient(
        [&](const ParameterVector&) { return exact_variational_bound_and_grad(m, y).first; }, m.theta(), 1e-4);
    EXPECT_LT(max_relative_error(gf, ff), 1e-6);
    const auto gk = exact_kl_grad(m, y);
    const auto fk = finite_difference_gradient([&](const ParameterVector&) { return exact_kl(m, y); }, m.eta(), 1e-4);
    EXPECT_LT(max_relative_error(gk, fk), 1e-6);
  }
}

TEST(Enumeration, KlNonnegativeAndZeroAtPosterior) {
  for (std::size_t i = 0; i < 16; ++i) {
    auto rc = random_oracle_case(5, i);
    EXPECT_GE(exact_kl(rc.model, rc.label), 0.0);
    set_proposal_to_posterior(rc.model, rc.label);
    EXPECT_NEAR(exact_kl(rc.model, rc.label), 0.0, 1e-12);
  }
}

TEST(Enumeration, OrderInvariance) {
  for (std::size_t i = 0; i < 16; ++i) {
    const auto rc = random_oracle_case(7, i);
    const auto a = enumerate(rc.model, rc.label);
    EnumerationOptions opt;
    opt.shuffle_seed = 99 + i;
    const auto b = enumerate(rc.model, rc.label, opt);
    EXPECT_NEAR(a.ell, b.ell, 1e-12);
    EXPECT_NEAR(a.f, b.f, 1e-12);
    EXPECT_NEAR(a.kl, b.kl, 1e-12);
    const auto ga = exact_grad_marginal(rc.model, rc.label);
    const auto gb = exact_grad_marginal(rc.model, rc.label, opt);
    for (std::size_t k = 0; k < ga.size(); ++k) EXPECT_NEAR(ga[k], gb[k], 1e-12);
  }
}

TEST(Enumeration, BudgetIsEnforced) {
  Rng rng = make_rng(1, "big");
  const TabularModel m{random_toy_world(4, 2, 2, rng), 2};  // 64 sequences
  EnumerationOptions opt;
  opt.budget.sequences = 63;
  EXPECT_THROW(enumerate(m, 0, opt), SizeError);
  opt.budget.sequences = 64;
  EXPECT_NO_THROW(enumerate(m, 0, opt));
  const TabularModel small{toy_fixture_world(), 1};
  EnumerationBudget tight;
  tight.tuples = 3;
  EXPECT_THROW(estimator_expectation(EstimatorTag::var, small, 0, 2, 0.0, tight), SizeError);
}

TEST(Enumeration, CountsSequences) {
  Rng rng = make_rng(2, "w");
  const TabularModel m{random_toy_world(4, 2, 2, rng), 2};
  EXPECT_EQ(sequence_count(m), 64u);
  EXPECT_EQ(enumerate(m, 1).trajectories.size(), 64u);
  std::set<std::vector<std::size_t>> distinct;
  for (const auto& s : enumerate(m, 1).trajectories) distinct.insert(s.actions);
  EXPECT_EQ(distinct.size(), 64u);
}

TEST(IdentitySuite, AllIdentitiesPass) {
  const auto report = run_identity_suite(1, 50);
  EXPECT_GE(report.checks.size(), 8u);
  for (const auto& c : report.checks) {
    EXPECT_TRUE(c.passed()) << c.name << " worst " << c.worst;
    EXPECT_EQ(c.cases > 0, true) << c.name;
  }
  EXPECT_TRUE(report.passed());
}

}  // namespace
}  // namespace wsram
