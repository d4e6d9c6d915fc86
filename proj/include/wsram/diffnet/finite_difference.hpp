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

#ifndef WSRAM_DIFFNET_FINITE_DIFFERENCE_HPP
#define WSRAM_DIFFNET_FINITE_DIFFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <utility>
#include <span>
#include <vector>

#include <wsram/diffnet/parameter_vector.hpp>
#include <wsram/errors.hpp>

namespace wsram {

/// Central differences of `loss` at `params`, one coordinate at a time.
/// Values are perturbed in place and restored before returning.
template <typename Loss>
  requires std::invocable<Loss&, const ParameterVector&>
std::vector<double> finite_difference_gradient(Loss&& loss, ParameterVector& params, double step) {
  if (!(step > 0.0)) {
    throw DomainError{"finite-difference step must be positive"};
  }
  std::vector<double> grad(params.size());
  auto values = params.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + step;
    const double up = loss(std::as_const(params));
    values[i] = saved - step;
    const double down = loss(std::as_const(params));
    values[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericalError{"loss is not finite at coordinate " + std::to_string(i)};
    }
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

/// |a - b| / max(|a|, |b|, floor)
inline double relative_error(double a, double b, double floor = 1e-7) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double max_relative_error(std::span<const double> a, std::span<const double> b,
                                 double floor = 1e-7) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, relative_error(a[i], b[i], floor));
  }
  return worst;
}

}  // namespace wsram

#endif  // WSRAM_DIFFNET_FINITE_DIFFERENCE_HPP
