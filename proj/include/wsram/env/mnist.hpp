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

#ifndef WSRAM_ENV_MNIST_HPP
#define WSRAM_ENV_MNIST_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <wsram/env/image.hpp>
#include <wsram/errors.hpp>
#include <wsram/rng.hpp>

/**
 * \file
 * \brief MNIST IDX I/O, the translated-scaled digit generator and the
 * dataset container format.
 *
 * Container layout (all integers little-endian u32):
 *   magic "WSDS" | version | canvas side | example count | class count
 *   then per example: label byte, canvas*canvas row-major pixel bytes (0-255).
 */

namespace wsram {

struct LabeledExample {
  Image image;
  std::size_t label = 0;
};

/// Raw 28x28 digits as read from IDX files.
struct DigitSet {
  std::size_t rows = 28;
  std::size_t cols = 28;
  std::vector<std::vector<std::uint8_t>> images;
  std::vector<std::uint8_t> labels;

  [[nodiscard]] std::size_t size() const noexcept { return images.size(); }
};

inline constexpr std::uint32_t idx_images_magic = 0x00000803;
inline constexpr std::uint32_t idx_labels_magic = 0x00000801;

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw InputFormatError{"truncated IDX header in " + path.string()};
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

inline void write_be32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                              static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b.data(), 4);
}

inline std::uint32_t read_le32(std::istream& in, const std::filesystem::path& path) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw InputFormatError{"truncated dataset header in " + path.string()};
  }
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
         (std::uint32_t{b[3]} << 24);
}

inline void write_le32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v), static_cast<char>(v >> 8),
                              static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
  out.write(b.data(), 4);
}

inline std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in{path, std::ios::binary};
  if (!in) {
    throw InputFormatError{"cannot open " + path.string()};
  }
  return in;
}

inline std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace detail

/// Reads an IDX image file (magic 0x00000803) and its label file (0x00000801).
inline DigitSet read_idx(const std::filesystem::path& images_path,
                         const std::filesystem::path& labels_path) {
  DigitSet set;
  auto img = detail::open_binary(images_path);
  if (const auto magic = detail::read_be32(img, images_path); magic != idx_images_magic) {
    throw InputFormatError{"bad IDX image magic in " + images_path.string()};
  }
  const auto count = detail::read_be32(img, images_path);
  set.rows = detail::read_be32(img, images_path);
  set.cols = detail::read_be32(img, images_path);

  auto lab = detail::open_binary(labels_path);
  if (const auto magic = detail::read_be32(lab, labels_path); magic != idx_labels_magic) {
    throw InputFormatError{"bad IDX label magic in " + labels_path.string()};
  }
  if (detail::read_be32(lab, labels_path) != count) {
    throw InputFormatError{"IDX image and label counts differ: " + labels_path.string()};
  }

  set.images.resize(count);
  set.labels.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    set.images[i].resize(set.rows * set.cols);
    if (!img.read(reinterpret_cast<char*>(set.images[i].data()),
                  static_cast<std::streamsize>(set.images[i].size()))) {
      throw InputFormatError{"truncated IDX image payload in " + images_path.string()};
    }
  }
  if (!lab.read(reinterpret_cast<char*>(set.labels.data()), count)) {
    throw InputFormatError{"truncated IDX label payload in " + labels_path.string()};
  }
  return set;
}

inline void write_idx(const DigitSet& set, const std::filesystem::path& images_path,
                      const std::filesystem::path& labels_path) {
  std::ofstream img{images_path, std::ios::binary};
  detail::write_be32(img, idx_images_magic);
  detail::write_be32(img, static_cast<std::uint32_t>(set.size()));
  detail::write_be32(img, static_cast<std::uint32_t>(set.rows));
  detail::write_be32(img, static_cast<std::uint32_t>(set.cols));
  for (const auto& im : set.images) {
    img.write(reinterpret_cast<const char*>(im.data()), static_cast<std::streamsize>(im.size()));
  }
  std::ofstream lab{labels_path, std::ios::binary};
  detail::write_be32(lab, idx_labels_magic);
  detail::write_be32(lab, static_cast<std::uint32_t>(set.size()));
  lab.write(reinterpret_cast<const char*>(set.labels.data()),
            static_cast<std::streamsize>(set.labels.size()));
  if (!img || !lab) {
    throw InputFormatError{"failed writing IDX files"};
  }
}

struct TranslateScaleOptions {
  std::size_t canvas = 100;
  double min_scale = 0.5;
  double max_scale = 2.0;
  /// Fixes the top-left placement instead of sampling it (fixtures).
  std::optional<std::array<std::size_t, 2>> forced_offset;
};

/**
 * Places one source digit, rescaled by a factor drawn uniformly from
 * [min_scale, max_scale], at a uniform position fully inside a black canvas.
 * Draws whose scaled digit does not fit are rejected and redrawn.
 */
inline LabeledExample place_digit(const DigitSet& digits, std::size_t index,
                                  const TranslateScaleOptions& opt, Rng& rng) {
  if (digits.rows != 28 || digits.cols != 28) {
    throw InputFormatError{"source digits must be 28x28"};
  }
  if (opt.min_scale <= 0.0 || opt.max_scale < opt.min_scale) {
    throw ConfigError{"invalid scale range"};
  }
  if (std::lround(28.0 * opt.min_scale) > static_cast<long>(opt.canvas)) {
    throw ConfigError{"canvas too small for the smallest digit scale"};
  }
  Image src{digits.rows, digits.cols};
  for (std::size_t i = 0; i < src.pixels.size(); ++i) {
    src.pixels[i] = static_cast<double>(digits.images[index][i]) / 255.0;
  }
  std::size_t side = 0;
  do {
    const double s = opt.min_scale + (opt.max_scale - opt.min_scale) * uniform01(rng);
    side = static_cast<std::size_t>(std::max(1L, std::lround(28.0 * s)));
  } while (side > opt.canvas);

  const auto scaled = resample_box(src, 0.0, 0.0, 28.0, 28.0, side, side);
  std::size_t top = 0;
  std::size_t left = 0;
  if (opt.forced_offset) {
    top = (*opt.forced_offset)[0];
    left = (*opt.forced_offset)[1];
    if (top + side > opt.canvas || left + side > opt.canvas) {
      throw ConfigError{"forced offset places the digit outside the canvas"};
    }
  } else {
    const std::size_t span = opt.canvas - side + 1;
    top = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(span));
    left = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(span));
  }
  LabeledExample ex{Image{opt.canvas, opt.canvas}, digits.labels[index]};
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      ex.image.at(top + r, left + c) = std::clamp(scaled[r * side + c], 0.0, 1.0);
    }
  }
  return ex;
}

/// `count` examples; source digit i of the stream is drawn uniformly from `digits`.
inline std::vector<LabeledExample> generate_translated_scaled_mnist(const DigitSet& digits,
                                                                    std::size_t count,
                                                                    const TranslateScaleOptions& opt,
                                                                    Rng& rng) {
  if (count > 0 && digits.size() == 0) {
    throw InputFormatError{"no source digits"};
  }
  std::vector<LabeledExample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto index = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(digits.size()));
    out.push_back(place_digit(digits, index, opt, rng));
  }
  return out;
}

inline constexpr std::array<char, 4> dataset_magic{'W', 'S', 'D', 'S'};
inline constexpr std::uint32_t dataset_version = 1;

struct Dataset {
  std::size_t canvas = 0;
  std::size_t classes = 10;
  std::vector<LabeledExample> examples;

  [[nodiscard]] std::size_t size() const noexcept { return examples.size(); }
};

inline void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out{path, std::ios::binary};
  if (!out) {
    throw InputFormatError{"cannot create " + path.string()};
  }
  out.write(dataset_magic.data(), 4);
  detail::write_le32(out, dataset_version);
  detail::write_le32(out, static_cast<std::uint32_t>(ds.canvas));
  detail::write_le32(out, static_cast<std::uint32_t>(ds.size()));
  detail::write_le32(out, static_cast<std::uint32_t>(ds.classes));
  std::vector<char> row(ds.canvas * ds.canvas);
  for (const auto& ex : ds.examples) {
    if (ex.image.height != ds.canvas || ex.image.width != ds.canvas) {
      throw ConfigError{"example size differs from the dataset canvas"};
    }
    out.put(static_cast<char>(ex.label));
    for (std::size_t i = 0; i < row.size(); ++i) {
      row[i] = static_cast<char>(detail::to_byte(ex.image.pixels[i]));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!out) {
    throw InputFormatError{"failed writing " + path.string()};
  }
}

inline Dataset read_dataset(const std::filesystem::path& path) {
  auto in = detail::open_binary(path);
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || magic != dataset_magic) {
    throw InputFormatError{"bad dataset magic in " + path.string()};
  }
  if (detail::read_le32(in, path) != dataset_version) {
    throw InputFormatError{"unsupported dataset version in " + path.string()};
  }
  Dataset ds;
  ds.canvas = detail::read_le32(in, path);
  const auto count = detail::read_le32(in, path);
  ds.classes = detail::read_le32(in, path);
  ds.examples.reserve(count);
  std::vector<unsigned char> row(ds.canvas * ds.canvas);
  for (std::uint32_t i = 0; i < count; ++i) {
    char label = 0;
    if (!in.get(label) ||
        !in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()))) {
      throw InputFormatError{"truncated dataset payload in " + path.string()};
    }
    LabeledExample ex{Image{ds.canvas, ds.canvas}, static_cast<unsigned char>(label)};
    if (ex.label >= ds.classes) {
      throw InputFormatError{"label out of range in " + path.string()};
    }
    for (std::size_t p = 0; p < row.size(); ++p) {
      ex.image.pixels[p] = static_cast<double>(row[p]) / 255.0;
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace wsram

#endif  // WSRAM_ENV_MNIST_HPP
