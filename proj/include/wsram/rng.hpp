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

#ifndef WSRAM_RNG_HPP
#define WSRAM_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

/**
 * \file
 * \brief Seeded generators and named substreams.
 *
 * Every random decision in a run is drawn from a generator derived from the
 * run seed, a stream name ("dataset", "init", "rollout", "probe", ...) and up
 * to two integer indices. Derivation: FNV-1a of the name, then a SplitMix64
 * chain over (seed, name hash, i, j). Two derivations collide only if all four
 * inputs agree, so per-example streams are independent of scheduling order.
 */

namespace wsram {

using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Seed for the named substream `(stream, i, j)` of a run seeded with `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream,
                                    std::uint64_t i = 0, std::uint64_t j = 0) noexcept {
  std::uint64_t h = detail::splitmix64(seed);
  h = detail::splitmix64(h ^ detail::fnv1a(stream));
  h = detail::splitmix64(h ^ i);
  h = detail::splitmix64(h ^ (j * 0x2545f4914f6cdd1dULL));
  return h;
}

inline Rng make_rng(std::uint64_t seed, std::string_view stream, std::uint64_t i = 0,
                    std::uint64_t j = 0) {
  return Rng{derive_seed(seed, stream, i, j)};
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> n{0.0, 1.0};
  return n(rng);
}

}  // namespace wsram

#endif  // WSRAM_RNG_HPP
