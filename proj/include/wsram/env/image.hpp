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

#ifndef WSRAM_ENV_IMAGE_HPP
#define WSRAM_ENV_IMAGE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <wsram/errors.hpp>

/**
 * \file
 * \brief Grayscale images, glimpse actions and the glimpse mapping.
 *
 * Locations live in normalized coordinates [-1, 1]^2 with (-1, -1) the
 * top-left corner; location[0] is horizontal, location[1] vertical. All
 * resampling is area averaging and everything outside the image reads as 0.
 */

namespace wsram {

struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> pixels;  // row-major, values in [0, 1]

  Image() = default;
  Image(std::size_t h, std::size_t w, double fill = 0.0) : height{h}, width{w}, pixels(h * w, fill) {}

  [[nodiscard]] double& at(std::size_t r, std::size_t c) { return pixels[r * width + c]; }
  [[nodiscard]] double at(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }

  /// Pixel value with zero padding outside the image.
  [[nodiscard]] double padded(long r, long c) const {
    if (r < 0 || c < 0 || r >= static_cast<long>(height) || c >= static_cast<long>(width)) {
      return 0.0;
    }
    return pixels[static_cast<std::size_t>(r) * width + static_cast<std::size_t>(c)];
  }
};

/// A glimpse: continuous location (cell < 0) or discrete grid cell, plus a scale index.
struct Action {
  std::array<double, 2> location{0.0, 0.0};
  int cell = -1;
  std::size_t scale = 0;

  [[nodiscard]] bool discrete() const noexcept { return cell >= 0; }
  friend bool operator==(const Action&, const Action&) = default;
};

/// Window sizes (pixels) per scale index, retina side, and grid side for discrete mode.
struct GlimpseGeometry {
  std::vector<std::size_t> scales{28, 56, 84};
  std::size_t retina = 14;
  std::size_t grid = 1;
};

struct GlimpseObservation {
  std::vector<double> patch;  // retina x retina, row-major
  Action source;
};

namespace detail {

/// Sparse weights mapping one output cell onto the input pixels it overlaps.
struct AreaWeights {
  std::vector<std::vector<std::pair<long, double>>> taps;
};

/// Output cell j of n covers [start + j*len/n, start + (j+1)*len/n); weight = overlap / cell width.
inline AreaWeights area_weights(double start, double len, std::size_t n) {
  AreaWeights w;
  w.taps.resize(n);
  const double cell = len / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = start + cell * static_cast<double>(j);
    const double b = start + cell * static_cast<double>(j + 1);
    for (long i = static_cast<long>(std::floor(a)); static_cast<double>(i) < b; ++i) {
      const double overlap = std::min(b, static_cast<double>(i + 1)) - std::max(a, static_cast<double>(i));
      if (overlap > 0.0) {
        w.taps[j].emplace_back(i, overlap / cell);
      }
    }
  }
  return w;
}

inline std::vector<double> separable_resample(const Image& img, const AreaWeights& rows,
                                              const AreaWeights& cols) {
  const std::size_t out_h = rows.taps.size();
  const std::size_t out_w = cols.taps.size();
  std::vector<double> out(out_h * out_w, 0.0);
  for (std::size_t r = 0; r < out_h; ++r) {
    for (std::size_t c = 0; c < out_w; ++c) {
      double acc = 0.0;
      for (const auto& [ir, wr] : rows.taps[r]) {
        double row_acc = 0.0;
        for (const auto& [ic, wc] : cols.taps[c]) {
          row_acc += wc * img.padded(ir, ic);
        }
        acc += wr * row_acc;
      }
      out[r * out_w + c] = acc;
    }
  }
  return out;
}

}  // namespace detail

/// Area-averaged resample of an arbitrary box [top, top+h) x [left, left+w) to out_h x out_w.
inline std::vector<double> resample_box(const Image& img, double top, double left, double h,
                                        double w, std::size_t out_h, std::size_t out_w) {
  return detail::separable_resample(img, detail::area_weights(top, h, out_h),
                                    detail::area_weights(left, w, out_w));
}

/// Center of an action in continuous pixel coordinates (x, y). Continuous locations are clamped.
inline std::array<double, 2> pixel_center(const Action& a, const GlimpseGeometry& geo,
                                          std::size_t height, std::size_t width) {
  double nx = 0.0;
  double ny = 0.0;
  if (a.discrete()) {
    const auto g = static_cast<double>(geo.grid);
    const auto cell = static_cast<std::size_t>(a.cell);
    nx = (static_cast<double>(cell % geo.grid) + 0.5) / g * 2.0 - 1.0;
    ny = (static_cast<double>(cell / geo.grid) + 0.5) / g * 2.0 - 1.0;
  } else {
    nx = std::clamp(a.location[0], -1.0, 1.0);
    ny = std::clamp(a.location[1], -1.0, 1.0);
  }
  return {(nx + 1.0) * 0.5 * static_cast<double>(width), (ny + 1.0) * 0.5 * static_cast<double>(height)};
}

inline void validate(const Action& a, const GlimpseGeometry& geo) {
  if (a.scale >= geo.scales.size()) {
    throw DomainError{"scale index out of range"};
  }
  if (a.discrete() && static_cast<std::size_t>(a.cell) >= geo.grid * geo.grid) {
    throw DomainError{"grid cell index out of range"};
  }
}

/**
 * The glimpse mapping g(a, I): a square window of side scales[a.scale],
 * snapped to whole pixels around the action center, area-averaged down to
 * retina x retina.
 */
inline GlimpseObservation extract_glimpse(const Image& image, const Action& action,
                                          const GlimpseGeometry& geo) {
  validate(action, geo);
  const auto side = static_cast<double>(geo.scales[action.scale]);
  const auto [cx, cy] = pixel_center(action, geo, image.height, image.width);
  const double left = std::floor(cx - side / 2.0 + 0.5);
  const double top = std::floor(cy - side / 2.0 + 0.5);
  return GlimpseObservation{resample_box(image, top, left, side, side, geo.retina, geo.retina), action};
}

/// Area-averaged downsample of the whole image to side x side.
inline std::vector<double> low_res_view(const Image& image, std::size_t side) {
  if (side == 0 || side > std::min(image.height, image.width)) {
    throw ConfigError{"low-resolution side must be in [1, min(height, width)]"};
  }
  return resample_box(image, 0.0, 0.0, static_cast<double>(image.height),
                      static_cast<double>(image.width), side, side);
}

}  // namespace wsram

#endif  // WSRAM_ENV_IMAGE_HPP
