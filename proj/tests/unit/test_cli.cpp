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

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fixtures.hpp"

namespace wsram {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

Result run_cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cli.log";
  const std::string cmd = std::string{WSRAM_CLI_PATH} + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in{log};
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in{p, std::ios::binary};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_fake_mnist(const fs::path& dir) {
  DigitSet set;
  Rng rng = make_rng(3, "fake-mnist");
  for (int i = 0; i < 30; ++i) {
    std::vector<std::uint8_t> img(28 * 28, 0);
    for (std::size_t r = 8; r < 20; ++r) {
      for (std::size_t c = 10; c < 18; ++c) img[r * 28 + c] = static_cast<std::uint8_t>(rng() % 256);
    }
    set.images.push_back(std::move(img));
    set.labels.push_back(static_cast<std::uint8_t>(i % 10));
  }
  write_idx(set, dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
}

std::string toy_args(const fs::path& out, const std::string& run_id) {
  return "train -q -c " + std::string{WSRAM_SOURCE_DIR} + "/configs/toy.json --set train.updates=300 --set output.dir=\\\"" +
         out.string() + "\\\" --set output.run_id=\\\"" + run_id + "\\\"";
}

TEST(Cli, UsageErrors) {
  const auto dir = testing::scratch_dir("cli-usage");
  EXPECT_EQ(run_cli("", dir).code, 2);
  EXPECT_EQ(run_cli("frobnicate", dir).code, 2);
  EXPECT_EQ(run_cli("gen-data --out x.wsds", dir).code, 2);
  EXPECT_EQ(run_cli("gen-data --mnist-dir . --out x.wsds --split valid", dir).code, 2);
  EXPECT_EQ(run_cli("--help", dir).code, 0);
}

TEST(Cli, InvalidConfigWritesNothing) {
  const auto dir = testing::scratch_dir("cli-config");
  const fs::path out = dir / "run";
  auto r = run_cli(toy_args(out, "x") + " --set train.bogus=1", dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("train.bogus"), std::string::npos);
  EXPECT_FALSE(fs::exists(out));
  r = run_cli(toy_args(out, "x") + " --set train.samples=0", dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(run_cli("train -c " + (dir / "absent.json").string(), dir).code, 2);
}

TEST(Cli, GenDataIsDeterministic) {
  const auto dir = testing::scratch_dir("cli-gen");
  write_fake_mnist(dir);
  const std::string base = "gen-data --mnist-dir " + dir.string() + " --canvas 40 --count 25 --seed 4 --out ";
  ASSERT_EQ(run_cli(base + (dir / "a.wsds").string(), dir).code, 0);
  ASSERT_EQ(run_cli(base + (dir / "b.wsds").string(), dir).code, 0);
  EXPECT_EQ(slurp(dir / "a.wsds"), slurp(dir / "b.wsds"));
  const auto ds = read_dataset(dir / "a.wsds");
  EXPECT_EQ(ds.size(), 25u);
  EXPECT_EQ(ds.canvas, 40u);
  ASSERT_EQ(run_cli("gen-data --mnist-dir " + dir.string() + " --count 0 --out " + (dir / "e.wsds").string(), dir).code, 0);
  EXPECT_EQ(read_dataset(dir / "e.wsds").size(), 0u);
  // the test split is absent and a truncated file is rejected
  EXPECT_EQ(run_cli("gen-data --split test --mnist-dir " + dir.string() + " --out " + (dir / "t.wsds").string(), dir).code, 3);
  fs::resize_file(dir / "train-images-idx3-ubyte", 100);
  EXPECT_EQ(run_cli(base + (dir / "c.wsds").string(), dir).code, 3);
}

TEST(Cli, TrainEvalDiagnoseExport) {
  const auto dir = testing::scratch_dir("cli-train");
  const fs::path out = dir / "run";
  auto r = run_cli(toy_args(out, "a"), dir);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(out / "metrics-a.jsonl"));
  EXPECT_TRUE(fs::exists(out / "config-a.json"));
  const std::string ck = (out / "checkpoint-a.bin").string();
  ASSERT_TRUE(fs::exists(ck));

  r = run_cli("eval -c " + std::string{WSRAM_SOURCE_DIR} + "/configs/toy.json --checkpoint " + ck, dir);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("error "), std::string::npos);

  r = run_cli("diagnose -c " + std::string{WSRAM_SOURCE_DIR} + "/configs/toy.json --checkpoint " + ck +
                  " --resamples 20 --batch 2 --out " + (dir / "diag").string(),
              dir);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "diag.txt"));
  EXPECT_NE(slurp(dir / "diag.json").find("WAKE-Q+c"), std::string::npos);

  r = run_cli("export-curves " + (out / "metrics-a.jsonl").string() + " -o " + (dir / "curves.csv").string(), dir);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(slurp(dir / "curves.csv").rfind("run_id,update,", 0), 0u);

  fs::resize_file(ck, 10);
  EXPECT_EQ(run_cli("eval -c " + std::string{WSRAM_SOURCE_DIR} + "/configs/toy.json --checkpoint " + ck, dir).code, 3);
}

TEST(Cli, RepeatedTrainingGivesIdenticalMetrics) {
  const auto dir = testing::scratch_dir("cli-repeat");
  ASSERT_EQ(run_cli(toy_args(dir / "one", "r"), dir).code, 0);
  ASSERT_EQ(run_cli(toy_args(dir / "two", "r"), dir).code, 0);
  auto strip = [](std::string text) {
    std::stringstream in{text};
    std::string out;
    std::string line;
    while (std::getline(in, line)) out += line.substr(0, line.find(",\"wall_clock\"")) + "\n";
    return out;
  };
  const auto a = strip(slurp(dir / "one" / "metrics-r.jsonl"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, strip(slurp(dir / "two" / "metrics-r.jsonl")));
  EXPECT_EQ(slurp(dir / "one" / "checkpoint-r.bin"), slurp(dir / "two" / "checkpoint-r.bin"));
}

TEST(Cli, OracleVerify) {
  const auto dir = testing::scratch_dir("cli-oracle");
  const auto r = run_cli("oracle-verify --worlds 6 --summary " + (dir / "s.json").string(), dir);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("all pass"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "s.json"));
}

}  // namespace
}  // namespace wsram
