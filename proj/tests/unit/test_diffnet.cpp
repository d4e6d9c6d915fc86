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
#include <numbers>
#include <numeric>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <gtest/gtest.h>

#include "fixtures.hpp"

namespace wsram {
namespace {

TEST(ParameterVector, SlicesAreDisjointAndCover) {
  ParameterVector p;
  p.add_slice("a", 3);
  p.add_slice("b", 5);
  p.add_slice("c", 1);
  EXPECT_EQ(p.size(), 9u);
  EXPECT_EQ(p.grads().size(), p.values().size());
  std::vector<int> owner(p.size(), 0);
  for (const auto& s : p.slices()) {
    for (std::size_t i = s.offset; i < s.offset + s.size; ++i) {
      ++owner[i];
    }
  }
  for (int o : owner) {
    EXPECT_EQ(o, 1);
  }
  EXPECT_THROW(p.add_slice("a", 2), ConfigError);
  EXPECT_THROW(p.add_slice("z", 0), ConfigError);
  EXPECT_THROW(static_cast<void>(p.slice("nope")), ConfigError);
}

TEST(LayerSpec, RejectsBadDimensions) {
  ParameterVector p;
  EXPECT_THROW((Layer{{LayerKind::dense, 0, 2, Activation::relu}, p, "x"}), ConfigError);
  EXPECT_THROW((Layer{{LayerKind::categorical_head, 2, 3, Activation::relu}, p, "y"}), ConfigError);
}

TEST(Layer, ZeroWeightsGiveZeroOutput) {
  ParameterVector p;
  Layer l{{LayerKind::dense, 4, 3, Activation::relu}, p, "d"};
  const auto t = l.forward(p, std::vector<double>{1.0, -2.0, 3.0, 0.5});
  for (double v : t.output) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(Layer, IdentityWeightsReproduceInput) {
  ParameterVector p;
  Layer l{{LayerKind::dense, 3, 3, Activation::identity}, p, "d"};
  auto w = p.values(l.weights());
  for (std::size_t i = 0; i < 3; ++i) {
    w[i * 3 + i] = 1.0;
  }
  const std::vector<double> x{0.25, -1.5, 7.0};
  const auto t = l.forward(p, x);
  EXPECT_EQ(t.output, x);
}

TEST(Layer, DenseReluMatchesHandComputation) {
  ParameterVector p;
  Layer l{{LayerKind::dense, 3, 2, Activation::relu}, p, "d"};
  Rng rng = make_rng(4, "layer");
  for (double& v : p.values()) {
    v = 2.0 * uniform01(rng) - 1.0;
  }
  const std::vector<double> x{0.3, -0.7, 1.1};
  const auto t = l.forward(p, x);
  const auto w = p.values(l.weights());
  const auto b = p.values(l.bias());
  for (std::size_t r = 0; r < 2; ++r) {
    double z = b[r];
    for (std::size_t c = 0; c < 3; ++c) {
      z += w[r * 3 + c] * x[c];
    }
    EXPECT_NEAR(t.output[r], std::max(0.0, z), 1e-15);
  }
}

TEST(Layer, ZeroOutputGradLeavesGradsUnchanged) {
  ParameterVector p;
  Layer l{{LayerKind::recurrent_cell, 3, 2, Activation::relu}, p, "r"};
  Rng rng = make_rng(1, "init");
  l.initialize(p, rng);
  const auto t = l.forward(p, std::vector<double>{1, 2, 3}, std::vector<double>{0.5, -0.5});
  l.backward(t, std::vector<double>{0.0, 0.0}, p);
  for (double g : p.grads()) {
    EXPECT_EQ(g, 0.0);
  }
}

TEST(Layer, SumOfLinearOutputsGivesInputAsWeightGrad) {
  ParameterVector p;
  Layer l{{LayerKind::dense, 3, 2, Activation::identity}, p, "d"};
  Rng rng = make_rng(2, "init");
  l.initialize(p, rng);
  const std::vector<double> x{0.5, -1.0, 2.0};
  const auto t = l.forward(p, x);
  l.backward(t, std::vector<double>{1.0, 1.0}, p);
  const auto g = p.grads();
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_EQ(g[l.weights().offset + r * 3 + c], x[c]);
    }
  }
}

/// A two-layer net (recurrent relu into a softmax head) as a scalar loss.
struct TwoLayerNet {
  ParameterVector p;
  Layer cell;
  Layer head;
  std::vector<double> x{0.4, -0.9, 0.2, 1.3};
  std::vector<double> h0{0.1, -0.3, 0.25};
  std::vector<double> probe{0.7, -1.1};

  TwoLayerNet(Activation head_act, std::uint64_t seed) {
    cell = Layer{{LayerKind::recurrent_cell, 4, 3, Activation::relu}, p, "cell"};
    head = Layer{{LayerKind::dense, 3, 2, head_act}, p, "head"};
    Rng rng = make_rng(seed, "net");
    for (double& v : p.values()) {
      v = 2.0 * uniform01(rng) - 1.0;
    }
  }

  double loss(const ParameterVector& q) const {
    const auto a = cell.forward(q, x, h0);
    const auto b = head.forward(q, a.output);
    return probe[0] * b.output[0] + probe[1] * b.output[1];
  }

  std::vector<double> analytic() {
    p.zero_grads();
    const auto a = cell.forward(p, x, h0);
    const auto b = head.forward(p, a.output);
    std::vector<double> da(3, 0.0);
    head.backward(p, b, probe, p.grads(), da);
    cell.backward(p, a, da, p.grads());
    return {p.grads().begin(), p.grads().end()};
  }
};

TEST(FiniteDifference, ConstantLossGivesZero) {
  ParameterVector p;
  p.add_slice("a", 4);
  const auto g = finite_difference_gradient([](const ParameterVector&) { return 3.0; }, p, 1e-5);
  for (double v : g) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(FiniteDifference, QuadraticGivesParams) {
  ParameterVector p;
  p.add_slice("a", 5);
  Rng rng = make_rng(3, "q");
  for (double& v : p.values()) {
    v = standard_normal(rng);
  }
  auto loss = [](const ParameterVector& q) {
    double s = 0.0;
    for (double v : q.values()) s += 0.5 * v * v;
    return s;
  };
  const auto g = finite_difference_gradient(loss, p, 1e-4);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(g[i], p.values()[i], 1e-8);
  }
  EXPECT_THROW(finite_difference_gradient(loss, p, 0.0), DomainError);
}

TEST(FiniteDifference, MatchesBackwardOnComposedNets) {
  for (Activation act : {Activation::identity, Activation::relu, Activation::softmax}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      TwoLayerNet net{act, seed};
      const auto a = net.analytic();
      const auto fd = finite_difference_gradient([&](const ParameterVector& q) { return net.loss(q); }, net.p, 1e-5);
      EXPECT_LT(max_relative_error(a, fd, 1e-6), 1e-4) << "seed " << seed;
    }
  }
}

TEST(Distributions, LogProbExamples) {
  EXPECT_NEAR(log_prob(Categorical{{0.0, 0.0, 0.0, 0.0}}, 3), std::log(0.25), 1e-15);
  EXPECT_NEAR(log_prob(Gaussian{{0.0}, {0.0}}, std::vector<double>{0.0}), -0.5 * std::log(2.0 * std::numbers::pi),
              1e-15);
  const double expected = 3.0 - std::log(std::exp(1.0) + std::exp(2.0) + std::exp(3.0));
  EXPECT_NEAR(log_prob(Categorical{{1.0, 2.0, 3.0}}, 2), expected, 1e-14);
  EXPECT_NEAR(expected, -0.40761, 1e-5);
}

TEST(Distributions, CategoricalNormalizes) {
  Rng rng = make_rng(5, "cat");
  for (int trial = 0; trial < 50; ++trial) {
    Categorical d;
    for (int k = 0; k < 7; ++k) d.logits.push_back(5.0 * standard_normal(rng));
    double s = 0.0;
    for (std::size_t k = 0; k < 7; ++k) s += std::exp(log_prob(d, k));
    EXPECT_NEAR(s, 1.0, 1e-10);
  }
}

TEST(Distributions, GaussianIntegratesToOne) {
  for (double mu : {-0.4, 0.0, 1.3}) {
    for (double log_std : {-2.3, 0.0, 0.7}) {
      const double sd = std::exp(log_std);
      const Gaussian g{{mu}, {log_std}};
      auto f = [&](double x) { return std::exp(log_prob(g, std::vector<double>{x})); };
      double total = 0.0;
      for (int k = -8; k < 8; ++k) {
        total += boost::math::quadrature::gauss<double, 30>::integrate(f, mu + k * sd, mu + (k + 1) * sd);
      }
      EXPECT_NEAR(total, 1.0, 1e-6);
    }
  }
}

TEST(Distributions, DegenerateSamples) {
  Rng rng = make_rng(6, "deg");
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample(Categorical{{0.0, -1e300, -1e300}}, rng), 0u);
    const auto x = sample(Gaussian{{0.3, -0.2}, {-30.0, -30.0}}, rng);
    EXPECT_NEAR(x[0], 0.3, 1e-9);
    EXPECT_NEAR(x[1], -0.2, 1e-9);
  }
}

TEST(Distributions, UniformCategoricalFrequencies) {
  Rng rng = make_rng(7, "freq");
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[sample(Categorical{{0, 0, 0, 0}}, rng)];
  for (int c : counts) {
    EXPECT_NEAR(static_cast<double>(c) / n, 0.25, 0.01);
  }
}

TEST(Distributions, MeanLogProbMatchesNegativeEntropy) {
  Rng rng = make_rng(8, "ent");
  const Categorical c{{0.3, -1.0, 2.0, 0.0}};
  const Gaussian g{{0.5, -0.5}, {-0.7, 0.4}};
  const int n = 100000;
  for (const DistributionParams& d : {DistributionParams{c}, DistributionParams{g}}) {
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double lp = log_prob(d, sample(d, rng));
      s += lp;
      s2 += lp * lp;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    EXPECT_LT(std::abs(mean + entropy(d)), 3.0 * se);
  }
}

TEST(Distributions, TemperatureScaling) {
  const Categorical c{{0.0, std::log(4.0)}};
  const auto same = temperature_scaled(c, 1.0);
  EXPECT_EQ(same.logits, c.logits);
  const auto half = softmax(temperature_scaled(c, 2.0).logits);
  EXPECT_NEAR(half[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(half[1], 2.0 / 3.0, 1e-15);
  const auto flat = softmax(temperature_scaled(Categorical{{3.0, -2.0, 0.5}}, 1e6).logits);
  for (double p : flat) {
    EXPECT_NEAR(p, 1.0 / 3.0, 1e-6);
  }
  EXPECT_THROW(temperature_scaled(c, 0.0), DomainError);
}

TEST(Distributions, EntropyGradientVanishesAtUniform) {
  std::vector<double> g(5, 0.0);
  add_entropy_grad_wrt_logits(Categorical{std::vector<double>(5, 0.3)}, 1.0, g);
  for (double v : g) {
    EXPECT_NEAR(v, 0.0, 1e-10);
  }
}

TEST(Distributions, ScoreMatchesFiniteDifference) {
  const std::vector<double> logits{0.2, -0.4, 1.0};
  std::vector<double> g(3, 0.0);
  add_score_wrt_logits(Categorical{logits}, 1, 1.0, g);
  for (std::size_t k = 0; k < 3; ++k) {
    auto up = logits;
    auto dn = logits;
    up[k] += 1e-6;
    dn[k] -= 1e-6;
    const double fd = (log_prob(Categorical{up}, 1) - log_prob(Categorical{dn}, 1)) / 2e-6;
    EXPECT_NEAR(g[k], fd, 1e-8);
  }
}

}  // namespace
}  // namespace wsram
