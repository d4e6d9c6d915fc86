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

#ifndef WSRAM_DIFFNET_PARAMETER_VECTOR_HPP
#define WSRAM_DIFFNET_PARAMETER_VECTOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <wsram/errors.hpp>
#include <wsram/rng.hpp>

namespace wsram {

/// Contiguous index range of a ParameterVector owned by one named tensor.
struct Slice {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/**
 * \brief Flat parameter storage with an aligned gradient accumulator.
 *
 * Slices are appended in order, so they are disjoint and always cover the
 * whole vector. Gradients accumulate additively; callers zero them between
 * estimator invocations.
 */
class ParameterVector {
 public:
  /// Appends a zero-initialized slice and returns its index range.
  const Slice& add_slice(std::string name, std::size_t size) {
    if (size == 0) {
      throw ConfigError{"parameter slice '" + name + "' has zero size"};
    }
    for (const auto& s : slices_) {
      if (s.name == name) {
        throw ConfigError{"duplicate parameter slice '" + name + "'"};
      }
    }
    slices_.push_back(Slice{std::move(name), values_.size(), size});
    values_.resize(values_.size() + size, 0.0);
    grads_.resize(values_.size(), 0.0);
    return slices_.back();
  }

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] const std::vector<Slice>& slices() const noexcept { return slices_; }

  [[nodiscard]] const Slice& slice(std::string_view name) const {
    for (const auto& s : slices_) {
      if (s.name == name) {
        return s;
      }
    }
    throw ConfigError{"unknown parameter slice '" + std::string{name} + "'"};
  }

  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> grads() noexcept { return grads_; }
  [[nodiscard]] std::span<const double> grads() const noexcept { return grads_; }

  [[nodiscard]] std::span<double> values(const Slice& s) noexcept {
    return std::span<double>{values_}.subspan(s.offset, s.size);
  }
  [[nodiscard]] std::span<const double> values(const Slice& s) const noexcept {
    return std::span<const double>{values_}.subspan(s.offset, s.size);
  }
  [[nodiscard]] std::span<double> grads(const Slice& s) noexcept {
    return std::span<double>{grads_}.subspan(s.offset, s.size);
  }

  void zero_grads() noexcept { std::fill(grads_.begin(), grads_.end(), 0.0); }

  /// Replaces all values; the length must match.
  void assign(std::span<const double> v) {
    if (v.size() != values_.size()) {
      throw ConfigError{"parameter vector length mismatch: expected " +
                        std::to_string(values_.size()) + ", got " + std::to_string(v.size())};
    }
    std::copy(v.begin(), v.end(), values_.begin());
  }

  /// Uniform(-r, r) with r = sqrt(6 / (fan_in + fan_out)).
  void glorot_uniform(const Slice& s, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& w : values(s)) {
      w = (2.0 * uniform01(rng) - 1.0) * r;
    }
  }

 private:
  std::vector<Slice> slices_;
  std::vector<double> values_;
  std::vector<double> grads_;
};

}  // namespace wsram

#endif  // WSRAM_DIFFNET_PARAMETER_VECTOR_HPP
