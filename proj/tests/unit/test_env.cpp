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

#include <cmath>
#include <fstream>
#include <iterator>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"

namespace wsram {
namespace {

using testing::random_image;
using testing::scratch_dir;

Action at(double x, double y, std::size_t scale) {
  Action a;
  a.location = {x, y};
  a.scale = scale;
  return a;
}

TEST(Glimpse, BlackImageGivesZeroPatch) {
  const Image img{20, 20};
  const GlimpseGeometry geo{{4, 8, 16}, 4, 1};
  for (std::size_t s = 0; s < 3; ++s) {
    for (double v : extract_glimpse(img, at(0.3, -0.8, s), geo).patch) {
      EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(Glimpse, RetinaSizedWindowIsRawCrop) {
  Rng rng = make_rng(1, "img");
  const Image img = random_image(12, rng);
  const GlimpseGeometry geo{{4}, 4, 1};
  // center pixel (6, 6) -> window rows/cols 4..7
  const auto patch = extract_glimpse(img, at(0.0, 0.0, 0), geo).patch;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_EQ(patch[r * 4 + c], img.at(4 + r, 4 + c));
    }
  }
}

TEST(Glimpse, TwoByTwoWindowToOnePixelIsMean) {
  Image img{4, 4};
  for (std::size_t i = 0; i < 16; ++i) {
    img.pixels[i] = static_cast<double>(i) / 16.0;
  }
  const GlimpseGeometry geo{{2}, 1, 1};
  // center (2, 2) -> rows/cols 1..2
  const auto patch = extract_glimpse(img, at(0.0, 0.0, 0), geo).patch;
  ASSERT_EQ(patch.size(), 1u);
  const double mean = (img.at(1, 1) + img.at(1, 2) + img.at(2, 1) + img.at(2, 2)) / 4.0;
  EXPECT_NEAR(patch[0], mean, 1e-15);
}

TEST(Glimpse, TranslationConsistent) {
  Rng rng = make_rng(2, "img");
  const Image img = random_image(40, rng);
  const GlimpseGeometry geo{{6, 12}, 3, 1};
  for (int dx : {-3, 2, 5}) {
    for (int dy : {-4, 1, 3}) {
      Image shifted{40, 40};
      for (long r = 0; r < 40; ++r) {
        for (long c = 0; c < 40; ++c) {
          shifted.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = img.padded(r - dy, c - dx);
        }
      }
      for (std::size_t s = 0; s < 2; ++s) {
        const auto a = extract_glimpse(img, at(0.0, 0.0, s), geo).patch;
        const auto b = extract_glimpse(shifted, at(2.0 * dx / 40.0, 2.0 * dy / 40.0, s), geo).patch;
        EXPECT_EQ(a, b);
      }
    }
  }
}

TEST(Glimpse, ResampleConservesMean) {
  Rng rng = make_rng(3, "img");
  const Image img = random_image(24, rng);
  for (std::size_t out : {1u, 2u, 3u, 5u, 7u}) {
    const auto v = resample_box(img, 3.0, 2.0, 14.0, 14.0, out, out);
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ref = 0.0;
    for (std::size_t r = 3; r < 17; ++r) {
      for (std::size_t c = 2; c < 16; ++c) ref += img.at(r, c);
    }
    ref /= 196.0;
    EXPECT_NEAR(m, ref, 1e-12);
  }
}

TEST(Glimpse, PatchValuesInUnitInterval) {
  Rng rng = make_rng(4, "img");
  const Image img = random_image(30, rng);
  const GlimpseGeometry geo{{5, 10, 20}, 5, 1};
  for (int i = 0; i < 200; ++i) {
    const auto a = at(3.0 * uniform01(rng) - 1.5, 3.0 * uniform01(rng) - 1.5, i % 3);
    for (double v : extract_glimpse(img, a, geo).patch) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
  EXPECT_THROW(extract_glimpse(img, at(0, 0, 3), geo), DomainError);
}

TEST(LowRes, ConstantAndIdentity) {
  const Image flat{16, 16, 0.37};
  for (double v : low_res_view(flat, 4)) EXPECT_NEAR(v, 0.37, 1e-15);
  Rng rng = make_rng(5, "img");
  const Image img = random_image(9, rng);
  EXPECT_EQ(low_res_view(img, 9), img.pixels);
}

TEST(LowRes, SingleBlockLightsOneCell) {
  Image img{100, 100};
  for (std::size_t r = 30; r < 40; ++r) {
    for (std::size_t c = 60; c < 70; ++c) img.at(r, c) = 1.0;
  }
  const auto v = low_res_view(img, 10);
  int nonzero = 0;
  for (double x : v) nonzero += x != 0.0;
  EXPECT_EQ(nonzero, 1);
  EXPECT_NEAR(v[3 * 10 + 6], 1.0, 1e-15);
}

DigitSet synthetic_digits(std::size_t n, std::uint64_t seed) {
  DigitSet d;
  Rng rng = make_rng(seed, "digits");
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint8_t> px(784, 0);
    for (std::size_t r = 6; r < 22; ++r) {
      for (std::size_t c = 8; c < 20; ++c) px[r * 28 + c] = static_cast<std::uint8_t>(rng() % 256);
    }
    d.images.push_back(std::move(px));
    d.labels.push_back(static_cast<std::uint8_t>(i % 10));
  }
  return d;
}

std::vector<char> file_bytes(const std::filesystem::path& p) {
  std::ifstream in{p, std::ios::binary};
  return {std::istreambuf_iterator<char>{in}, {}};
}

TEST(Idx, RoundTripAndBadMagic) {
  const auto dir = scratch_dir("idx");
  const auto d = synthetic_digits(7, 1);
  write_idx(d, dir / "img", dir / "lab");
  const auto back = read_idx(dir / "img", dir / "lab");
  EXPECT_EQ(back.images, d.images);
  EXPECT_EQ(back.labels, d.labels);
  {
    std::fstream f{dir / "img", std::ios::in | std::ios::out | std::ios::binary};
    f.seekp(3);
    f.put('\x01');
  }
  try {
    (void)read_idx(dir / "img", dir / "lab");
    FAIL() << "expected InputFormatError";
  } catch (const InputFormatError& e) {
    EXPECT_NE(std::string{e.what()}.find((dir / "img").string()), std::string::npos);
  }
  EXPECT_THROW(read_idx(dir / "missing", dir / "lab"), InputFormatError);
}

TEST(Generator, UnscaledTopLeftPlacementIsTheDigit) {
  const auto d = synthetic_digits(3, 2);
  TranslateScaleOptions opt;
  opt.canvas = 60;
  opt.min_scale = 1.0;
  opt.max_scale = 1.0;
  opt.forced_offset = std::array<std::size_t, 2>{0, 0};
  Rng rng = make_rng(1, "gen");
  const auto ex = place_digit(d, 1, opt, rng);
  for (std::size_t r = 0; r < 60; ++r) {
    for (std::size_t c = 0; c < 60; ++c) {
      const double expected = r < 28 && c < 28 ? d.images[1][r * 28 + c] / 255.0 : 0.0;
      EXPECT_NEAR(ex.image.at(r, c), expected, 1e-12);
    }
  }
  EXPECT_EQ(ex.label, d.labels[1]);
}

TEST(Generator, OutputsAreNonzeroInRangeAndReproducible) {
  const auto d = synthetic_digits(20, 3);
  TranslateScaleOptions opt;
  opt.canvas = 60;
  Rng a = make_rng(9, "dataset");
  Rng b = make_rng(9, "dataset");
  const auto xs = generate_translated_scaled_mnist(d, 50, opt, a);
  const auto ys = generate_translated_scaled_mnist(d, 50, opt, b);
  ASSERT_EQ(xs.size(), 50u);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_EQ(xs[i].image.pixels, ys[i].image.pixels);
    EXPECT_EQ(xs[i].label, ys[i].label);
    double sum = 0.0;
    for (double p : xs[i].image.pixels) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
      sum += p;
    }
    EXPECT_GT(sum, 0.0);
  }
}

TEST(Generator, LabelsUniformWithinThreeSigma) {
  const auto d = synthetic_digits(1000, 4);
  TranslateScaleOptions opt;
  opt.canvas = 40;
  Rng rng = make_rng(10, "dataset");
  std::vector<int> hist(10, 0);
  const int n = 10000;
  for (const auto& ex : generate_translated_scaled_mnist(d, n, opt, rng)) ++hist[ex.label];
  const double sigma = std::sqrt(n * 0.1 * 0.9);
  for (int h : hist) EXPECT_LT(std::abs(h - n * 0.1), 3.0 * sigma);
}

TEST(Dataset, RoundTripEmptyAndFull) {
  const auto dir = scratch_dir("dataset");
  Dataset empty;
  empty.canvas = 60;
  write_dataset(empty, dir / "empty.wsds");
  const auto e = read_dataset(dir / "empty.wsds");
  EXPECT_EQ(e.size(), 0u);
  EXPECT_EQ(e.canvas, 60u);
  EXPECT_EQ(std::filesystem::file_size(dir / "empty.wsds"), 20u);

  const auto ds = testing::glyph_dataset(10, 1);
  write_dataset(ds, dir / "g.wsds");
  const auto back = read_dataset(dir / "g.wsds");
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back.examples[i].label, ds.examples[i].label);
    for (std::size_t p = 0; p < ds.examples[i].image.pixels.size(); ++p) {
      EXPECT_NEAR(back.examples[i].image.pixels[p], ds.examples[i].image.pixels[p], 0.5 / 255.0 + 1e-12);
    }
  }
  write_dataset(back, dir / "g2.wsds");
  EXPECT_EQ(file_bytes(dir / "g.wsds"), file_bytes(dir / "g2.wsds"));

  std::filesystem::resize_file(dir / "g.wsds", 100);
  EXPECT_THROW(read_dataset(dir / "g.wsds"), InputFormatError);
}

TEST(ToyWorld, FixtureAndCounting) {
  const auto w = toy_fixture_world();
  EXPECT_EQ(w.actions(), 2u);
  EXPECT_EQ(w.classes, 2u);
  Rng rng = make_rng(1, "world");
  const auto big = random_toy_world(4, 2, 3, rng);
  EXPECT_EQ(big.enumeration_count(2), 64u);
  EXPECT_THROW(make_toy_world(2, 1, {0.5, 0.6}, {1.0, 1.0}), ConfigError);
  EXPECT_THROW(make_toy_world(2, 1, {0.5, 0.5}, {1.0, 1.0, 1.0}), ConfigError);
}

TEST(ToyWorld, UniformTablesGivePosteriorEqualToPrior) {
  const auto w = make_toy_world(3, 1, {1.0 / 3, 1.0 / 3, 1.0 / 3}, std::vector<double>(6, 0.5));
  TabularModel m{w, 1};
  for (std::size_t y = 0; y < 2; ++y) {
    const auto r = enumerate(m, y);
    for (const auto& s : r.trajectories) EXPECT_NEAR(s.posterior, s.prior, 1e-15);
  }
}

}  // namespace
}  // namespace wsram
