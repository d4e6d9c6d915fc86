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

#ifndef WSRAM_TRAINING_CHECKPOINT_HPP
#define WSRAM_TRAINING_CHECKPOINT_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <wsram/errors.hpp>
#include <wsram/model/attention_network.hpp>
#include <wsram/model/tabular_model.hpp>
#include <wsram/training/trainer.hpp>

/**
 * \file
 * \brief Versioned binary checkpoints. Layout (little-endian) in docs/formats.md.
 *
 * The run's randomness is counter-based (seed, stream name, update, example),
 * so the seed and the update counter are the complete generator state.
 */

namespace wsram {

inline constexpr std::array<char, 4> checkpoint_magic{'W', 'S', 'C', 'K'};
inline constexpr std::uint32_t checkpoint_version = 1;

/// Layer dimensions of an attention model, compared on load.
inline nlohmann::json model_descriptor(const AttentionModel& m) {
  const auto& s = m.shape();
  return {{"kind", "attention"},
          {"canvas", s.canvas},
          {"scales", s.glimpse.scales},
          {"retina", s.glimpse.retina},
          {"grid", s.glimpse.grid},
          {"low_res", s.low_res},
          {"hidden1", s.hidden1},
          {"hidden2", s.hidden2},
          {"inference_hidden", s.inference_hidden},
          {"classes", s.classes},
          {"glimpses", s.glimpses},
          {"location_log_std", s.location_log_std},
          {"theta", m.theta().size()},
          {"eta", m.eta().size()}};
}

inline nlohmann::json model_descriptor(const TabularModel& m) {
  const auto& w = m.world();
  return {{"kind", "tabular"},     {"cells", w.cells},       {"scales", w.scales},
          {"classes", w.classes},  {"glimpses", m.glimpses()}, {"theta", m.theta().size()},
          {"eta", m.eta().size()}};
}

struct Checkpoint {
  std::string descriptor;
  std::uint64_t seed = 0;
  std::vector<double> theta;
  std::vector<double> eta;
  TrainerState state;
};

namespace detail {

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_{out} {}
  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
  void str(const std::string& s) {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void reals(std::span<const double> v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void adam(const AdamState& a) {
    u64(a.t);
    u64(a.skipped);
    reals(a.m);
    reals(a.v);
  }

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string where) : in_{in}, where_{std::move(where)} {}
  std::uint8_t u8() {
    char c = 0;
    if (!in_.get(c)) fail();
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v = 0.0;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::string str() {
    const auto n = u64();
    if (n > (1u << 20)) fail();
    std::string s(n, '\0');
    if (!in_.read(s.data(), static_cast<std::streamsize>(n))) fail();
    return s;
  }
  std::vector<double> reals() {
    const auto n = u64();
    if (n > (1ull << 32)) fail();
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  AdamState adam() {
    AdamState a;
    a.t = u64();
    a.skipped = u64();
    a.m = reals();
    a.v = reals();
    if (a.m.size() != a.v.size()) fail();
    return a;
  }
  [[noreturn]] void fail() const { throw InputFormatError{"truncated or corrupt checkpoint " + where_}; }

 private:
  std::istream& in_;
  std::string where_;
};

}  // namespace detail

inline void write_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
    if (!out) {
      throw InputFormatError{"cannot create checkpoint " + path.string()};
    }
    detail::BinaryWriter w{out};
    out.write(checkpoint_magic.data(), 4);
    w.u32(checkpoint_version);
    w.str(c.descriptor);
    w.u64(c.seed);
    const auto& s = c.state;
    w.u64(s.update);
    w.reals(c.theta);
    w.reals(c.eta);
    w.adam(s.adam_theta);
    w.adam(s.adam_eta);
    w.f64(s.baseline_ema);
    w.u8(s.baseline_ready ? 1 : 0);
    w.reals(s.baseline_params);
    w.adam(s.adam_baseline);
    w.u64(s.window.examples);
    w.u64(s.window.usable);
    for (double v : {s.window.errors, s.window.f_hat, s.window.lm_hat, s.window.ess, s.window.scale_entropy}) {
      w.f64(v);
    }
    w.u64(s.degenerate.size());
    for (const auto& [skipped, total] : s.degenerate) {
      w.u64(skipped);
      w.u64(total);
    }
    w.u64(s.last_batch.size());
    for (auto i : s.last_batch) {
      w.u64(i);
    }
    if (!out) {
      throw InputFormatError{"failed writing checkpoint " + path.string()};
    }
  }
  std::filesystem::rename(tmp, path);
}

inline Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in{path, std::ios::binary};
  if (!in) {
    throw InputFormatError{"cannot open checkpoint " + path.string()};
  }
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || magic != checkpoint_magic) {
    throw InputFormatError{"bad checkpoint magic in " + path.string()};
  }
  detail::BinaryReader r{in, path.string()};
  if (r.u32() != checkpoint_version) {
    throw InputFormatError{"unsupported checkpoint version in " + path.string()};
  }
  Checkpoint c;
  c.descriptor = r.str();
  c.seed = r.u64();
  auto& s = c.state;
  s.update = r.u64();
  c.theta = r.reals();
  c.eta = r.reals();
  s.adam_theta = r.adam();
  s.adam_eta = r.adam();
  s.baseline_ema = r.f64();
  s.baseline_ready = r.u8() != 0;
  s.baseline_params = r.reals();
  s.adam_baseline = r.adam();
  s.window.examples = r.u64();
  s.window.usable = r.u64();
  s.window.errors = r.f64();
  s.window.f_hat = r.f64();
  s.window.lm_hat = r.f64();
  s.window.ess = r.f64();
  s.window.scale_entropy = r.f64();
  const auto nd = r.u64();
  if (nd > 1'000'000) r.fail();
  for (std::uint64_t i = 0; i < nd; ++i) {
    const auto a = r.u64();
    const auto b = r.u64();
    s.degenerate.emplace_back(a, b);
  }
  const auto nb = r.u64();
  if (nb > 1'000'000) r.fail();
  for (std::uint64_t i = 0; i < nb; ++i) {
    s.last_batch.push_back(static_cast<std::size_t>(r.u64()));
  }
  return c;
}

template <GlimpseModel Model>
Checkpoint make_checkpoint(const Model& model, const Trainer<Model>& trainer) {
  Checkpoint c;
  c.descriptor = model_descriptor(model).dump();
  c.seed = trainer.options().seed;
  const auto t = model.theta().values();
  const auto e = model.eta().values();
  c.theta.assign(t.begin(), t.end());
  c.eta.assign(e.begin(), e.end());
  c.state = trainer.state();
  return c;
}

/// Loads parameters into `model`; throws ConfigError when the shapes differ.
template <typename Model>
void load_parameters(Model& model, const Checkpoint& c) {
  if (model_descriptor(model).dump() != c.descriptor) {
    throw ConfigError{"checkpoint was written for a different model shape: " + c.descriptor};
  }
  model.theta().assign(c.theta);
  model.eta().assign(c.eta);
}

}  // namespace wsram

#endif  // WSRAM_TRAINING_CHECKPOINT_HPP
