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

#ifndef WSRAM_TESTS_SUPPORT_FIXTURES_HPP
#define WSRAM_TESTS_SUPPORT_FIXTURES_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <wsram/wsram.hpp>

namespace wsram::testing {

/// A network small enough for finite differences and fast Monte Carlo.
inline NetworkShape tiny_shape() {
  NetworkShape s;
  s.canvas = 12;
  s.glimpse = GlimpseGeometry{{4, 8}, 4, 1};
  s.low_res = 3;
  s.hidden1 = 6;
  s.hidden2 = 5;
  s.inference_hidden = 4;
  s.classes = 3;
  s.glimpses = 2;
  return s;
}

/// Shape used by the glyph fixture: 16x16 canvas, three scales, M-friendly sizes.
inline NetworkShape glyph_shape() {
  NetworkShape s;
  s.canvas = 16;
  s.glimpse = GlimpseGeometry{{4, 8, 16}, 4, 1};
  s.low_res = 4;
  s.hidden1 = 24;
  s.hidden2 = 24;
  s.inference_hidden = 24;
  s.classes = 4;
  s.glimpses = 2;
  return s;
}

inline Image random_image(std::size_t side, Rng& rng) {
  Image img{side, side};
  for (double& p : img.pixels) {
    p = uniform01(rng);
  }
  return img;
}

/**
 * Four 4x4 glyphs (class k lights a distinct pattern), each stamped at a
 * random position on a black 16x16 canvas with faint uniform noise. Small
 * glimpses must land on the glyph to read it; the 16-pixel glimpse sees a
 * blurred 4x4 summary.
 */
inline Dataset glyph_dataset(std::size_t count, std::uint64_t seed) {
  static constexpr std::array<std::array<const char*, 4>, 4> glyphs{{
      {"####", "#..#", "#..#", "####"},
      {"..#.", "..#.", "..#.", "..#."},
      {"#...", ".#..", "..#.", "...#"},
      {"####", "....", "####", "...."},
  }};
  Dataset ds;
  ds.canvas = 16;
  ds.classes = 4;
  Rng rng = make_rng(seed, "glyphs");
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t label = i % 4;
    LabeledExample ex{Image{16, 16}, label};
    for (double& p : ex.image.pixels) {
      p = 0.05 * uniform01(rng);
    }
    const auto top = static_cast<std::size_t>(uniform01(rng) * 13.0);
    const auto left = static_cast<std::size_t>(uniform01(rng) * 13.0);
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) {
        if (glyphs[label][r][c] == '#') {
          ex.image.at(top + r, left + c) = 1.0;
        }
      }
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

/// Config for training on the glyph fixture (task "image", data set in memory).
inline ExperimentConfig glyph_config(const std::string& estimator, std::uint64_t updates, std::uint64_t seed) {
  ExperimentConfig c;
  c.task = "image";
  c.network = glyph_shape();
  c.train.estimator = estimator;
  c.train.samples = 5;
  c.train.batch = 16;
  c.train.updates = updates;
  c.train.seed = seed;
  c.train.threads = 1;
  c.train.metrics_every = 50;
  c.train.checkpoint_every = 1'000'000;
  c.train.probe_resamples = 0;
  c.optimizer.lr = 3e-3;
  return c;
}

/// The toy fixture world as a tabular model with q = prior.
inline TabularModel fixture_model() {
  TabularModel m{toy_fixture_world(), 1};
  m.copy_prior_to_proposal();
  return m;
}

struct GradientCheck {
  double worst = 0.0;
  std::size_t points = 0;
};

/**
 * Backward pass of the attention model vs central differences at one random
 * parameter point: theta through every prediction seed component, eta through
 * log q. Points whose ReLU pre-activations sit within 1e-3 of a kink are
 * redrawn (the loss is not differentiable there). Components below 1e-4 are
 * compared in absolute terms: central differences on a loss of order 100
 * carry about 1e-9 of rounding noise.
 */
inline double attention_gradient_error(const NetworkShape& shape, std::uint64_t seed) {
  AttentionModel m{shape};
  Rng rng = make_rng(seed, "gradcheck");
  const Image img = random_image(shape.canvas, rng);
  const std::size_t y = rng() % shape.classes;
  std::vector<Action> actions;
  double margin = 0.0;
  for (int attempt = 0; attempt < 100 && margin < 1e-3; ++attempt) {
    for (double& v : m.theta().values()) v = 0.6 * standard_normal(rng);
    for (double& v : m.eta().values()) v = 0.6 * standard_normal(rng);
    const auto t = m.rollout(img, y, Proposal::inference, rng, 1.0);
    actions = t.actions;
    margin = m.relu_margin(t);
  }
  const PredictionSeed ps{0.7, -0.4, 0.3, {0.5, -0.2}};
  auto theta_loss = [&](const ParameterVector&) {
    const auto t = m.replay(img, y, actions, Proposal::inference);
    double h = 0.0;
    std::array<double, 2> mu{0.0, 0.0};
    for (std::size_t n = 0; n < t.actions.size(); ++n) {
      h += t.step_scale_entropy[n];
      mu[0] += t.step_location_mean[n][0];
      mu[1] += t.step_location_mean[n][1];
    }
    return ps.likelihood * t.log_likelihood + ps.prior * t.log_prior + ps.entropy * h + ps.location[0] * mu[0] +
           ps.location[1] * mu[1];
  };
  auto eta_loss = [&](const ParameterVector&) { return m.replay(img, y, actions, Proposal::inference).log_q; };
  const auto t = m.replay(img, y, actions, Proposal::inference);
  std::vector<double> gt(m.theta().size(), 0.0);
  std::vector<double> ge(m.eta().size(), 0.0);
  m.backprop_prediction(t, ps, gt);
  m.backprop_inference(t, 1.0, ge);
  const auto ft = finite_difference_gradient(theta_loss, m.theta(), 1e-5);
  const auto fe = finite_difference_gradient(eta_loss, m.eta(), 1e-5);
  return std::max(max_relative_error(gt, ft, 1e-4), max_relative_error(ge, fe, 1e-4));
}

/// Same check for the tabular toy model, both parameter vectors.
inline double tabular_gradient_error(std::uint64_t seed) {
  Rng rng = make_rng(seed, "gradcheck-tab");
  TabularModel m{random_toy_world(2 + seed % 2, 1 + seed % 2, 3, rng), 2};
  for (double& v : m.theta().values()) v = standard_normal(rng);
  for (double& v : m.eta().values()) v = standard_normal(rng);
  const std::size_t y = rng() % 3;
  const auto actions = m.rollout(ToyInput{}, y, Proposal::inference, rng).actions;
  const PredictionSeed ps{0.9, -0.6, 0.25, {0.0, 0.0}};
  auto theta_loss = [&](const ParameterVector&) {
    const auto t = m.replay(ToyInput{}, y, actions, Proposal::inference);
    double h = 0.0;
    for (double e : t.step_scale_entropy) h += e;
    return ps.likelihood * t.log_likelihood + ps.prior * t.log_prior + ps.entropy * h;
  };
  auto eta_loss = [&](const ParameterVector&) { return m.replay(ToyInput{}, y, actions, Proposal::inference).log_q; };
  const auto t = m.replay(ToyInput{}, y, actions, Proposal::inference);
  std::vector<double> gt(m.theta().size(), 0.0);
  std::vector<double> ge(m.eta().size(), 0.0);
  m.backprop_prediction(t, ps, gt);
  m.backprop_inference(t, 1.0, ge);
  const auto ft = finite_difference_gradient(theta_loss, m.theta(), 1e-5);
  const auto fe = finite_difference_gradient(eta_loss, m.eta(), 1e-5);
  return std::max(max_relative_error(gt, ft, 1e-4), max_relative_error(ge, fe, 1e-4));
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("wsram-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace wsram::testing

#endif  // WSRAM_TESTS_SUPPORT_FIXTURES_HPP
