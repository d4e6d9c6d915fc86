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

#ifndef WSRAM_DIFFNET_DISTRIBUTIONS_HPP
#define WSRAM_DIFFNET_DISTRIBUTIONS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <span>
#include <variant>
#include <vector>

#include <wsram/errors.hpp>
#include <wsram/rng.hpp>

/**
 * \file
 * \brief Categorical and diagonal-Gaussian action distributions.
 *
 * Both are parameterized by raw head outputs (logits; mean and log-std) so
 * their score functions backpropagate straight into the emitting layer.
 */

namespace wsram {

struct Categorical {
  std::vector<double> logits;
};

struct Gaussian {
  std::vector<double> mean;
  std::vector<double> log_std;
};

using DistributionParams = std::variant<Categorical, Gaussian>;

/// Category index or a real vector, matching the two distribution variants.
using ActionValue = std::variant<std::size_t, std::vector<double>>;

inline double log_sum_exp(std::span<const double> v) {
  if (v.empty()) {
    return -std::numeric_limits<double>::infinity();
  }
  const double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) {
    return mx;
  }
  double s = 0.0;
  for (double x : v) {
    s += std::exp(x - mx);
  }
  return mx + std::log(s);
}

inline std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  const double lse = log_sum_exp(logits);
  for (double& x : p) {
    x = std::exp(x - lse);
  }
  return p;
}

inline std::vector<double> log_softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  const double lse = log_sum_exp(logits);
  for (double& x : p) {
    x -= lse;
  }
  return p;
}

inline void validate(const Categorical& d) {
  if (d.logits.empty()) {
    throw ConfigError{"categorical distribution needs at least one logit"};
  }
  for (double z : d.logits) {
    if (!std::isfinite(z)) {
      throw NumericalError{"categorical logits must be finite"};
    }
  }
}

inline void validate(const Gaussian& d) {
  if (d.mean.empty() || d.mean.size() != d.log_std.size()) {
    throw ConfigError{"gaussian mean and log-std must have equal, nonzero length"};
  }
  for (std::size_t i = 0; i < d.mean.size(); ++i) {
    if (!std::isfinite(d.mean[i]) || !std::isfinite(d.log_std[i])) {
      throw NumericalError{"gaussian parameters must be finite"};
    }
  }
}

inline double log_prob(const Categorical& d, std::size_t index) {
  if (index >= d.logits.size()) {
    throw DomainError{"categorical index " + std::to_string(index) + " out of range [0, " +
                      std::to_string(d.logits.size()) + ")"};
  }
  return d.logits[index] - log_sum_exp(d.logits);
}

inline double log_prob(const Gaussian& d, std::span<const double> x) {
  if (x.size() != d.mean.size()) {
    throw DomainError{"gaussian action has the wrong dimension"};
  }
  constexpr double half_log_2pi = 0.91893853320467274178;
  double lp = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = (x[i] - d.mean[i]) * std::exp(-d.log_std[i]);
    lp += -0.5 * z * z - d.log_std[i] - half_log_2pi;
  }
  return lp;
}

inline double log_prob(const DistributionParams& dist, const ActionValue& action) {
  if (const auto* c = std::get_if<Categorical>(&dist)) {
    if (const auto* i = std::get_if<std::size_t>(&action)) {
      return log_prob(*c, *i);
    }
    throw DomainError{"categorical distribution needs an index action"};
  }
  const auto& g = std::get<Gaussian>(dist);
  if (const auto* v = std::get_if<std::vector<double>>(&action)) {
    return log_prob(g, *v);
  }
  throw DomainError{"gaussian distribution needs a vector action"};
}

/// Inverse-CDF draw; never returns an index whose probability underflowed to 0.
inline std::size_t sample(const Categorical& d, Rng& rng) {
  const auto p = softmax(d.logits);
  const double u = uniform01(rng);
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      last_positive = i;
    }
    cum += p[i];
    if (u < cum && p[i] > 0.0) {
      return i;
    }
  }
  return last_positive;
}

inline std::vector<double> sample(const Gaussian& d, Rng& rng) {
  std::vector<double> x(d.mean.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = d.mean[i] + std::exp(d.log_std[i]) * standard_normal(rng);
  }
  return x;
}

inline ActionValue sample(const DistributionParams& dist, Rng& rng) {
  if (const auto* c = std::get_if<Categorical>(&dist)) {
    return sample(*c, rng);
  }
  return sample(std::get<Gaussian>(dist), rng);
}

inline double entropy(const Categorical& d) {
  const auto lp = log_softmax(d.logits);
  double h = 0.0;
  for (double l : lp) {
    if (std::isfinite(l)) {
      h -= std::exp(l) * l;
    }
  }
  return h;
}

inline double entropy(const Gaussian& d) {
  constexpr double half_log_2pi_e = 1.41893853320467274178;
  double h = 0.0;
  for (double s : d.log_std) {
    h += half_log_2pi_e + s;
  }
  return h;
}

inline double entropy(const DistributionParams& dist) {
  return std::visit([](const auto& d) { return entropy(d); }, dist);
}

/// d log p(index) / d logits = onehot(index) - softmax(logits), scaled and added to `out`.
inline void add_score_wrt_logits(const Categorical& d, std::size_t index, double scale,
                                 std::span<double> out) {
  const auto p = softmax(d.logits);
  for (std::size_t k = 0; k < p.size(); ++k) {
    out[k] += scale * ((k == index ? 1.0 : 0.0) - p[k]);
  }
}

/// d log N(x; mean, std) / d mean = (x - mean) / std^2, scaled and added to `out`.
inline void add_score_wrt_mean(const Gaussian& d, std::span<const double> x, double scale,
                               std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] += scale * (x[i] - d.mean[i]) * std::exp(-2.0 * d.log_std[i]);
  }
}

/// dH / d logits = -p_k (log p_k + H), scaled and added to `out`.
inline void add_entropy_grad_wrt_logits(const Categorical& d, double scale, std::span<double> out) {
  const auto lp = log_softmax(d.logits);
  const double h = entropy(d);
  for (std::size_t k = 0; k < lp.size(); ++k) {
    const double pk = std::exp(lp[k]);
    if (pk > 0.0) {
      out[k] += scale * (-pk * (lp[k] + h));
    }
  }
}

/// Logits divided by tau (categorical) or std multiplied by tau (gaussian).
inline DistributionParams temperature_scaled(const DistributionParams& dist, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw DomainError{"temperature must be positive and finite"};
  }
  if (const auto* c = std::get_if<Categorical>(&dist)) {
    Categorical out = *c;
    for (double& z : out.logits) {
      z /= tau;
    }
    return out;
  }
  Gaussian out = std::get<Gaussian>(dist);
  const double shift = std::log(tau);
  for (double& s : out.log_std) {
    s += shift;
  }
  return out;
}

inline Categorical temperature_scaled(const Categorical& d, double tau) {
  return std::get<Categorical>(temperature_scaled(DistributionParams{d}, tau));
}

inline Gaussian temperature_scaled(const Gaussian& d, double tau) {
  return std::get<Gaussian>(temperature_scaled(DistributionParams{d}, tau));
}

}  // namespace wsram

#endif  // WSRAM_DIFFNET_DISTRIBUTIONS_HPP
