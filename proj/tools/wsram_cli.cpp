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

// wsram: dataset generation, training, evaluation, estimator diagnostics,
// oracle verification and curve export.
//
// Exit codes: 0 ok, 2 config error, 3 input-format error, 4 verification
// failure, 5 degenerate-training abort, 1 anything else.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <wsram/wsram.hpp>

namespace {

using namespace wsram;
namespace fs = std::filesystem;

constexpr int exit_config = 2;
constexpr int exit_input = 3;
constexpr int exit_verify = 4;
constexpr int exit_abort = 5;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "experiment config (JSON)");
  cmd->add_option("-s,--set", c.overrides, "override, e.g. optimizer.lr=3e-4 (repeatable)");
}

// ---------------------------------------------------------------------------

struct GenDataArgs {
  std::string mnist_dir;
  std::string out;
  std::string split = "train";
  std::size_t canvas = 60;
  double min_scale = 0.5;
  double max_scale = 2.0;
  std::size_t count = 10000;
  std::uint64_t seed = 1;
};

int gen_data(const GenDataArgs& a) {
  const fs::path dir{a.mnist_dir};
  const std::string prefix = a.split == "test" ? "t10k" : "train";
  const auto digits = read_idx(dir / (prefix + "-images-idx3-ubyte"), dir / (prefix + "-labels-idx1-ubyte"));
  TranslateScaleOptions opt;
  opt.canvas = a.canvas;
  opt.min_scale = a.min_scale;
  opt.max_scale = a.max_scale;
  Rng rng = make_rng(a.seed, "dataset");
  Dataset ds;
  ds.canvas = a.canvas;
  ds.classes = 10;
  ds.examples = generate_translated_scaled_mnist(digits, a.count, opt, rng);
  write_dataset(ds, a.out);
  std::vector<std::size_t> hist(ds.classes, 0);
  for (const auto& ex : ds.examples) {
    ++hist[ex.label];
  }
  std::cout << "wrote " << ds.size() << " examples (" << a.canvas << "x" << a.canvas << ") to " << a.out << '\n';
  std::cout << "class histogram:";
  for (auto h : hist) {
    std::cout << ' ' << h;
  }
  std::cout << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

template <typename Fn>
auto with_model(const ExperimentConfig& cfg, Fn&& fn) {
  if (cfg.task == "toy") {
    auto model = make_tabular_model(cfg);
    auto data = toy_training_set(model.world(), cfg.toy.pool, cfg.train.seed);
    return fn(model, data, data);
  }
  if (cfg.train_data.empty()) {
    throw ConfigError{"data.train is required for the image task"};
  }
  auto model = make_attention_model(cfg);
  const Dataset train = read_dataset(cfg.train_data);
  if (train.canvas != cfg.network.canvas || train.classes != cfg.network.classes) {
    throw ConfigError{"dataset canvas or class count differs from the model config"};
  }
  std::optional<Dataset> test;
  if (!cfg.test_data.empty()) {
    test = read_dataset(cfg.test_data);
    if (test->canvas != cfg.network.canvas) {
      throw ConfigError{"test dataset canvas differs from the model config"};
    }
  }
  auto train_view = image_training_set(train);
  auto test_view = test ? image_training_set(*test) : train_view;
  return fn(model, train_view, test_view);
}

void write_effective_config(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  std::ofstream out{fs::path{cfg.output_dir} / ("config-" + cfg.run_id + ".json")};
  out << config_to_json(cfg).dump(2) << '\n';
}

int train(const Common& c, const std::string& resume_path, bool quiet) {
  const auto cfg = load_config(c.config, c.overrides);
  std::optional<Checkpoint> resume;
  if (!resume_path.empty()) {
    resume = read_checkpoint(resume_path);
  }
  return with_model(cfg, [&](auto& model, auto& train_set, auto&) {
    write_effective_config(cfg);
    const auto out = run_training(model, train_set, cfg, resume, quiet ? nullptr : &std::cout);
    std::cout << "trained " << out.updates << " updates; metrics " << out.metrics.string() << "; checkpoint "
              << out.checkpoint.string() << '\n';
    return 0;
  });
}

int eval(const Common& c, const std::string& checkpoint) {
  const auto cfg = load_config(c.config, c.overrides);
  const auto ck = read_checkpoint(checkpoint);
  return with_model(cfg, [&](auto& model, auto&, auto& test_set) {
    load_parameters(model, ck);
    const std::size_t threads = detail::resolve_threads(cfg.train.threads);
    const double err = evaluate(model, test_set, cfg.eval_rollouts, cfg.train.seed, threads);
    std::cout << "examples " << test_set.size << "\nerror " << format_real(err) << '\n';
    return 0;
  });
}

int diagnose_cmd(const Common& c, const std::string& checkpoint, std::size_t resamples, std::size_t batch,
                 const std::string& out_prefix) {
  const auto cfg = load_config(c.config, c.overrides);
  std::optional<Checkpoint> ck;
  if (!checkpoint.empty()) {
    ck = read_checkpoint(checkpoint);
  }
  return with_model(cfg, [&](auto& model, auto& train_set, auto&) {
    using Model = std::decay_t<decltype(model)>;
    using Ctx = typename Model::context_type;
    if (ck) {
      load_parameters(model, *ck);
    }
    if (resamples < 2) {
      throw ConfigError{"diagnose needs --resamples >= 2"};
    }
    Rng rng = make_rng(cfg.train.seed, "diagnose-batch");
    std::uniform_int_distribution<std::size_t> pick{0, train_set.size - 1};
    std::vector<Ctx> contexts;
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < batch; ++i) {
      const auto k = pick(rng);
      contexts.push_back(train_set.context(k));
      labels.push_back(train_set.label(k));
    }
    const double b = ck ? ck->state.baseline_ema : 0.0;
    const std::vector<double> baselines(contexts.size(), b);
    const auto rows = diagnose(model, std::span<const Ctx>{contexts}, labels, cfg.train.samples, resamples,
                               derive_seed(cfg.train.seed, "diagnose"), baselines);
    write_diagnostics_text(rows, std::cout);
    if (!out_prefix.empty()) {
      std::ofstream txt{out_prefix + ".txt"};
      write_diagnostics_text(rows, txt);
      std::ofstream js{out_prefix + ".json"};
      js << diagnostics_json(rows, cfg.train.samples, contexts.size()).dump(2) << '\n';
    }
    return 0;
  });
}

int oracle_verify(std::uint64_t seed, std::size_t worlds, const std::string& summary) {
  const auto report = run_identity_suite(seed, worlds);
  char line[200];
  std::snprintf(line, sizeof line, "%-62s %-6s %-12s %-10s %s\n", "identity", "result", "worst", "tolerance", "cases");
  std::cout << line;
  for (const auto& c : report.checks) {
    std::snprintf(line, sizeof line, "%-62s %-6s %-12.3e %-10.0e %zu\n", c.name.c_str(), c.passed() ? "pass" : "FAIL",
                  c.worst, c.tolerance, c.cases);
    std::cout << line;
  }
  std::cout << report.checks.size() << " identities on " << worlds << " worlds (seed " << seed << "): "
            << (report.passed() ? "all pass" : "FAILURES") << '\n';
  if (!summary.empty()) {
    nlohmann::json j;
    j["seed"] = seed;
    j["worlds"] = worlds;
    j["passed"] = report.passed();
    j["identities"] = nlohmann::json::array();
    for (const auto& c : report.checks) {
      j["identities"].push_back({{"name", c.name},
                                 {"passed", c.passed()},
                                 {"worst", c.worst},
                                 {"tolerance", c.tolerance},
                                 {"cases", c.cases},
                                 {"failures", c.failures}});
    }
    std::ofstream out{summary};
    out << j.dump(2) << '\n';
  }
  return report.passed() ? 0 : exit_verify;
}

int export_cmd(const std::vector<std::string>& files, const std::string& out_path) {
  std::vector<fs::path> paths(files.begin(), files.end());
  if (out_path.empty() || out_path == "-") {
    export_curves(paths, std::cout);
  } else {
    std::ofstream out{out_path};
    if (!out) {
      throw InputFormatError{"cannot create " + out_path};
    }
    export_curves(paths, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wake-sleep recurrent attention model"};
  app.require_subcommand(1);

  GenDataArgs gd;
  auto* gen = app.add_subcommand("gen-data", "render translated and scaled digits onto a canvas");
  gen->add_option("--mnist-dir", gd.mnist_dir, "directory with IDX files")->required();
  gen->add_option("--out", gd.out, "output dataset file")->required();
  gen->add_option("--split", gd.split, "train (train-*) or test (t10k-*)")->check(CLI::IsMember({"train", "test"}));
  gen->add_option("--canvas", gd.canvas, "canvas side in pixels");
  gen->add_option("--min-scale", gd.min_scale, "smallest digit scale");
  gen->add_option("--max-scale", gd.max_scale, "largest digit scale");
  gen->add_option("--count", gd.count, "number of examples");
  gen->add_option("--seed", gd.seed, "random seed");

  Common train_c;
  std::string resume;
  bool quiet = false;
  auto* tr = app.add_subcommand("train", "train a model");
  add_common(tr, train_c);
  tr->add_option("--resume", resume, "checkpoint to continue from");
  tr->add_flag("-q,--quiet", quiet, "no progress lines");

  Common eval_c;
  std::string eval_ck;
  auto* ev = app.add_subcommand("eval", "test error of a checkpoint");
  add_common(ev, eval_c);
  ev->add_option("--checkpoint", eval_ck, "checkpoint file")->required();

  Common diag_c;
  std::string diag_ck;
  std::string diag_out;
  std::size_t diag_resamples = 1000;
  std::size_t diag_batch = 8;
  auto* dg = app.add_subcommand("diagnose", "gradient variance and ESS of every estimator on a fixed batch");
  add_common(dg, diag_c);
  dg->add_option("--checkpoint", diag_ck, "checkpoint file (default: fresh initialization)");
  dg->add_option("--resamples", diag_resamples, "independent estimates per estimator");
  dg->add_option("--batch", diag_batch, "examples in the fixed batch");
  dg->add_option("--out", diag_out, "write <prefix>.txt and <prefix>.json");

  std::uint64_t oracle_seed = 1;
  std::size_t oracle_worlds = 50;
  std::string oracle_summary;
  auto* ov = app.add_subcommand("oracle-verify", "exact-enumeration identities on random toy worlds");
  ov->add_option("--seed", oracle_seed, "world seed");
  ov->add_option("--worlds", oracle_worlds, "number of worlds");
  ov->add_option("--summary", oracle_summary, "machine-readable summary (JSON)");

  std::vector<std::string> curve_files;
  std::string curve_out;
  auto* ex = app.add_subcommand("export-curves", "merge metrics files into one CSV");
  ex->add_option("files", curve_files, "metrics-<run-id>.jsonl files")->required();
  ex->add_option("-o,--out", curve_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    if (*gen) return gen_data(gd);
    if (*tr) return train(train_c, resume, quiet);
    if (*ev) return eval(eval_c, eval_ck);
    if (*dg) return diagnose_cmd(diag_c, diag_ck, diag_resamples, diag_batch, diag_out);
    if (*ov) return oracle_verify(oracle_seed, oracle_worlds, oracle_summary);
    if (*ex) return export_cmd(curve_files, curve_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const InputFormatError& e) {
    std::cerr << "input format error: " << e.what() << '\n';
    return exit_input;
  } catch (const TrainingAbort& e) {
    std::cerr << "training aborted: " << e.what() << '\n';
    return exit_abort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
