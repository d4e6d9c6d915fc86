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

#ifndef WSRAM_DIFFNET_LAYERS_HPP
#define WSRAM_DIFFNET_LAYERS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <wsram/diffnet/parameter_vector.hpp>
#include <wsram/errors.hpp>

/**
 * \file
 * \brief Dense and recurrent layers with an explicit per-call tape.
 *
 * There is no dynamic graph: every layer records what its own backward pass
 * needs (input, previous state, pre-activation, output) and the caller chains
 * the backward calls in reverse order.
 */

namespace wsram {

enum class LayerKind { dense, recurrent_cell, categorical_head, gaussian_head };
enum class Activation { relu, identity, softmax };

struct LayerSpec {
  LayerKind kind = LayerKind::dense;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  Activation activation = Activation::identity;
};

inline void validate(const LayerSpec& spec) {
  if (spec.input_dim == 0 || spec.output_dim == 0) {
    throw ConfigError{"layer dimensions must be strictly positive"};
  }
  if (spec.kind == LayerKind::recurrent_cell && spec.activation == Activation::softmax) {
    throw ConfigError{"recurrent cells do not support a softmax activation"};
  }
  if ((spec.kind == LayerKind::categorical_head || spec.kind == LayerKind::gaussian_head) &&
      spec.activation != Activation::identity) {
    throw ConfigError{"distribution heads emit raw parameters (identity activation)"};
  }
}

/// Everything a layer's backward pass needs from its forward pass.
struct LayerTape {
  std::vector<double> input;
  std::vector<double> state;  // previous state; empty for non-recurrent kinds
  std::vector<double> pre;
  std::vector<double> output;
  std::size_t param_count = 0;
};

namespace detail {

using RowMatrixMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMatrixMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

inline ConstVectorMap cmap(std::span<const double> v) {
  return ConstVectorMap{v.data(), static_cast<Eigen::Index>(v.size())};
}
inline VectorMap vmap(std::span<double> v) {
  return VectorMap{v.data(), static_cast<Eigen::Index>(v.size())};
}

inline void softmax_inplace(std::span<double> z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : z) {
    v /= sum;
  }
}

}  // namespace detail

/**
 * \brief One layer bound to a slice layout inside a ParameterVector.
 *
 * dense / heads:   out = act(W x + b)
 * recurrent cell:  h'  = act(W x + U h + b)
 */
class Layer {
 public:
  Layer() = default;

  Layer(const LayerSpec& spec, ParameterVector& params, const std::string& name) : spec_{spec} {
    validate(spec);
    weights_ = params.add_slice(name + ".W", spec.output_dim * spec.input_dim);
    if (spec.kind == LayerKind::recurrent_cell) {
      recurrent_ = params.add_slice(name + ".U", spec.output_dim * spec.output_dim);
    }
    bias_ = params.add_slice(name + ".b", spec.output_dim);
  }

  [[nodiscard]] const LayerSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const Slice& weights() const noexcept { return weights_; }
  [[nodiscard]] const Slice& recurrent_weights() const noexcept { return recurrent_; }
  [[nodiscard]] const Slice& bias() const noexcept { return bias_; }
  [[nodiscard]] bool is_recurrent() const noexcept { return spec_.kind == LayerKind::recurrent_cell; }

  /// Default initialization: Glorot-uniform weights, zero biases.
  void initialize(ParameterVector& params, Rng& rng) const {
    params.glorot_uniform(weights_, spec_.input_dim, spec_.output_dim, rng);
    if (is_recurrent()) {
      params.glorot_uniform(recurrent_, spec_.output_dim, spec_.output_dim, rng);
    }
    auto b = params.values(bias_);
    std::fill(b.begin(), b.end(), 0.0);
  }

  LayerTape forward(const ParameterVector& params, std::span<const double> input,
                    std::span<const double> state = {}) const {
    if (input.size() != spec_.input_dim) {
      throw ConfigError{"layer input has " + std::to_string(input.size()) + " entries, expected " +
                        std::to_string(spec_.input_dim)};
    }
    if (is_recurrent() && state.size() != spec_.output_dim) {
      throw ConfigError{"recurrent cell requires a state of length " +
                        std::to_string(spec_.output_dim)};
    }
    const auto rows = static_cast<Eigen::Index>(spec_.output_dim);
    const auto cols = static_cast<Eigen::Index>(spec_.input_dim);
    LayerTape tape;
    tape.param_count = params.size();
    tape.input.assign(input.begin(), input.end());
    tape.pre.resize(spec_.output_dim);
    auto pre = detail::vmap(tape.pre);
    detail::ConstRowMatrixMap w{params.values(weights_).data(), rows, cols};
    pre.noalias() = w * detail::cmap(input);
    pre += detail::cmap(params.values(bias_));
    if (is_recurrent()) {
      tape.state.assign(state.begin(), state.end());
      detail::ConstRowMatrixMap u{params.values(recurrent_).data(), rows, rows};
      pre.noalias() += u * detail::cmap(state);
    }
    tape.output = tape.pre;
    apply_activation(tape.output);
    return tape;
  }

  /// Accumulates parameter gradients into `params.grads()`.
  void backward(const LayerTape& tape, std::span<const double> output_grad,
                ParameterVector& params) const {
    backward(params, tape, output_grad, params.grads());
  }

  /**
   * Accumulates parameter gradients into `grads` (aligned with the whole
   * ParameterVector `params`) and, when the spans are non-empty, adds the
   * input and previous-state gradients into `input_grad` / `state_grad`.
   */
  void backward(const ParameterVector& params, const LayerTape& tape,
                std::span<const double> output_grad, std::span<double> grads,
                std::span<double> input_grad = {}, std::span<double> state_grad = {}) const {
    if (tape.param_count != grads.size() || params.size() != grads.size() || output_grad.size() != spec_.output_dim ||
        tape.pre.size() != spec_.output_dim) {
      throw InternalError{"layer tape does not match the parameter vector"};
    }
    std::vector<double> dpre(spec_.output_dim);
    activation_backward(tape, output_grad, dpre);
    const auto rows = static_cast<Eigen::Index>(spec_.output_dim);
    const auto cols = static_cast<Eigen::Index>(spec_.input_dim);
    auto d = detail::cmap(dpre);
    detail::RowMatrixMap gw{grads.data() + weights_.offset, rows, cols};
    gw.noalias() += d * detail::cmap(tape.input).transpose();
    detail::vmap(grads.subspan(bias_.offset, bias_.size)) += d;
    if (!input_grad.empty()) {
      detail::ConstRowMatrixMap w{params.values(weights_).data(), rows, cols};
      detail::vmap(input_grad).noalias() += w.transpose() * d;
    }
    if (is_recurrent()) {
      detail::RowMatrixMap gu{grads.data() + recurrent_.offset, rows, rows};
      gu.noalias() += d * detail::cmap(tape.state).transpose();
      if (!state_grad.empty()) {
        detail::ConstRowMatrixMap u{params.values(recurrent_).data(), rows, rows};
        detail::vmap(state_grad).noalias() += u.transpose() * d;
      }
    }
  }

  /// Smallest |pre-activation| of a ReLU layer; +inf for other activations.
  [[nodiscard]] double relu_margin(const LayerTape& tape) const {
    if (spec_.activation != Activation::relu) {
      return std::numeric_limits<double>::infinity();
    }
    double m = std::numeric_limits<double>::infinity();
    for (double z : tape.pre) {
      m = std::min(m, std::abs(z));
    }
    return m;
  }

 private:
  void apply_activation(std::span<double> z) const {
    switch (spec_.activation) {
      case Activation::relu:
        for (double& v : z) {
          v = v > 0.0 ? v : 0.0;
        }
        break;
      case Activation::softmax:
        detail::softmax_inplace(z);
        break;
      case Activation::identity:
        break;
    }
  }

  void activation_backward(const LayerTape& tape, std::span<const double> dout,
                           std::span<double> dpre) const {
    switch (spec_.activation) {
      case Activation::relu:
        for (std::size_t i = 0; i < dpre.size(); ++i) {
          dpre[i] = tape.pre[i] > 0.0 ? dout[i] : 0.0;
        }
        break;
      case Activation::softmax: {
        double dot = 0.0;
        for (std::size_t i = 0; i < dpre.size(); ++i) {
          dot += dout[i] * tape.output[i];
        }
        for (std::size_t i = 0; i < dpre.size(); ++i) {
          dpre[i] = tape.output[i] * (dout[i] - dot);
        }
        break;
      }
      case Activation::identity:
        std::copy(dout.begin(), dout.end(), dpre.begin());
        break;
    }
  }

  LayerSpec spec_{};
  Slice weights_{};
  Slice recurrent_{};
  Slice bias_{};
};

}  // namespace wsram

#endif  // WSRAM_DIFFNET_LAYERS_HPP
