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

#ifndef WSRAM_TRAINING_ADAM_HPP
#define WSRAM_TRAINING_ADAM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <vector>

#include <wsram/diffnet/parameter_vector.hpp>
#include <wsram/errors.hpp>

namespace wsram {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

inline void validate(const AdamConfig& c) {
  if (!(c.lr >= 0.0) || !(c.beta1 >= 0.0 && c.beta1 < 1.0) || !(c.beta2 >= 0.0 && c.beta2 < 1.0) ||
      !(c.eps > 0.0)) {
    throw ConfigError{"optimizer needs lr >= 0, betas in [0, 1) and eps > 0"};
  }
}

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
  std::uint64_t skipped = 0;

  AdamState() = default;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

enum class StepOutcome { applied, skipped_nonfinite };

/**
 * One Adam step that *descends* params.grads(), with bias correction.
 * Gradients are zeroed afterwards in both outcomes. A non-finite gradient
 * skips the update, leaves the moments untouched and logs a warning.
 */
inline StepOutcome adam_step(ParameterVector& params, AdamState& state, const AdamConfig& cfg,
                             std::ostream* warn = &std::clog) {
  const std::size_t n = params.size();
  if (state.m.size() != n || state.v.size() != n) {
    throw InternalError{"optimizer state does not match the parameter vector"};
  }
  auto g = params.grads();
  const bool finite = std::all_of(g.begin(), g.end(), [](double x) { return std::isfinite(x); });
  if (!finite) {
    ++state.skipped;
    if (warn != nullptr) {
      *warn << "warning: non-finite gradient, optimizer step skipped\n";
    }
    params.zero_grads();
    return StepOutcome::skipped_nonfinite;
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  auto x = params.values();
  for (std::size_t i = 0; i < n; ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    x[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
  params.zero_grads();
  return StepOutcome::applied;
}

}  // namespace wsram

#endif  // WSRAM_TRAINING_ADAM_HPP
