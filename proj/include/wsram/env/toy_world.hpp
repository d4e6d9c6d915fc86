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

#ifndef WSRAM_ENV_TOY_WORLD_HPP
#define WSRAM_ENV_TOY_WORLD_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <wsram/errors.hpp>
#include <wsram/rng.hpp>

/**
 * \file
 * \brief Fully discrete glimpse worlds small enough to enumerate.
 *
 * A world has K cells and S scales (K*S discrete actions per glimpse) and C
 * classes. `prior` is the initial glimpse distribution, `likelihood` holds
 * p(y | action) row by row, and `label_distribution` is the class frequency
 * of the training stream.
 */

namespace wsram {

struct ToyWorld {
  std::size_t cells = 0;
  std::size_t scales = 0;
  std::size_t classes = 0;
  std::vector<double> prior;
  std::vector<double> likelihood;
  std::vector<double> label_distribution;

  [[nodiscard]] std::size_t actions() const noexcept { return cells * scales; }
  [[nodiscard]] double likelihood_of(std::size_t action, std::size_t label) const {
    return likelihood[action * classes + label];
  }

  /// Number of action sequences of length `glimpses`: (K*S)^N.
  [[nodiscard]] std::size_t enumeration_count(std::size_t glimpses) const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < glimpses; ++i) {
      if (n > std::numeric_limits<std::size_t>::max() / actions()) {
        throw SizeError{"action space too large to count"};
      }
      n *= actions();
    }
    return n;
  }
};

namespace detail {

inline void check_distribution(const std::vector<double>& p, std::size_t offset, std::size_t n,
                               const char* what) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = p[offset + i];
    if (!std::isfinite(v) || v < 0.0) {
      throw ConfigError{std::string{what} + " has a negative or non-finite entry"};
    }
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) {
    throw ConfigError{std::string{what} + " row does not sum to 1"};
  }
}

}  // namespace detail

inline ToyWorld make_toy_world(std::size_t cells, std::size_t scales, std::vector<double> prior,
                               std::vector<double> likelihood,
                               std::vector<double> label_distribution = {}) {
  if (cells == 0 || scales == 0) {
    throw ConfigError{"toy world needs at least one cell and one scale"};
  }
  ToyWorld w;
  w.cells = cells;
  w.scales = scales;
  if (prior.size() != w.actions() || likelihood.empty() || likelihood.size() % w.actions() != 0) {
    throw ConfigError{"toy world tables have inconsistent sizes"};
  }
  w.classes = likelihood.size() / w.actions();
  if (w.classes < 1) {
    throw ConfigError{"toy world needs at least one class"};
  }
  w.prior = std::move(prior);
  w.likelihood = std::move(likelihood);
  detail::check_distribution(w.prior, 0, w.actions(), "prior table");
  for (std::size_t a = 0; a < w.actions(); ++a) {
    detail::check_distribution(w.likelihood, a * w.classes, w.classes, "likelihood table");
  }
  if (label_distribution.empty()) {
    label_distribution.assign(w.classes, 1.0 / static_cast<double>(w.classes));
  }
  if (label_distribution.size() != w.classes) {
    throw ConfigError{"label distribution size differs from the class count"};
  }
  w.label_distribution = std::move(label_distribution);
  detail::check_distribution(w.label_distribution, 0, w.classes, "label distribution");
  return w;
}

/// K=2, S=1, C=2: prior (0.6, 0.4), p(y=0 | a) = (0.9, 0.1). The label of interest is y = 0.
inline ToyWorld toy_fixture_world() {
  return make_toy_world(2, 1, {0.6, 0.4}, {0.9, 0.1, 0.1, 0.9});
}

/// Random strictly positive tables; entries bounded away from zero so logs stay tame.
inline ToyWorld random_toy_world(std::size_t cells, std::size_t scales, std::size_t classes, Rng& rng) {
  auto draw = [&](std::size_t n) {
    std::vector<double> p(n);
    double s = 0.0;
    for (double& v : p) {
      v = 0.05 + uniform01(rng);
      s += v;
    }
    for (double& v : p) {
      v /= s;
    }
    return p;
  };
  const std::size_t actions = cells * scales;
  auto prior = draw(actions);
  std::vector<double> lik;
  for (std::size_t a = 0; a < actions; ++a) {
    const auto row = draw(classes);
    lik.insert(lik.end(), row.begin(), row.end());
  }
  return make_toy_world(cells, scales, std::move(prior), std::move(lik));
}

}  // namespace wsram

#endif  // WSRAM_ENV_TOY_WORLD_HPP
