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

#ifndef WSRAM_MODEL_CLASSIFY_HPP
#define WSRAM_MODEL_CLASSIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <wsram/errors.hpp>
#include <wsram/model/trajectory.hpp>
#include <wsram/rng.hpp>

namespace wsram {

struct Classification {
  std::size_t predicted = 0;
  std::vector<double> distribution;
};

/// Averages p(y | a, I, theta) over `rollouts` untempered prior rollouts.
template <GlimpseModel Model>
Classification classify(const Model& model, const typename Model::context_type& ctx,
                        std::size_t rollouts, Rng& rng) {
  if (rollouts == 0) {
    throw DomainError{"classification needs at least one rollout"};
  }
  Classification out;
  out.distribution.assign(model.num_classes(), 0.0);
  for (std::size_t k = 0; k < rollouts; ++k) {
    const auto t = model.rollout(ctx, 0, Proposal::prior, rng, 1.0);
    for (std::size_t y = 0; y < out.distribution.size(); ++y) {
      out.distribution[y] += std::exp(t.class_log_probs[y]);
    }
  }
  for (double& p : out.distribution) {
    p /= static_cast<double>(rollouts);
  }
  out.predicted = static_cast<std::size_t>(
      std::max_element(out.distribution.begin(), out.distribution.end()) - out.distribution.begin());
  return out;
}

}  // namespace wsram

#endif  // WSRAM_MODEL_CLASSIFY_HPP
