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

#ifndef WSRAM_TRAINING_EXPERIMENT_HPP
#define WSRAM_TRAINING_EXPERIMENT_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include <wsram/env/toy_world.hpp>
#include <wsram/model/attention_network.hpp>
#include <wsram/model/tabular_model.hpp>
#include <wsram/rng.hpp>
#include <wsram/training/checkpoint.hpp>
#include <wsram/training/config.hpp>
#include <wsram/training/metrics.hpp>
#include <wsram/training/trainer.hpp>

namespace wsram {

/// Attention model with theta, eta drawn from substream "init".
inline AttentionModel make_attention_model(const ExperimentConfig& c) {
  AttentionModel m{c.network};
  Rng rng = make_rng(c.train.seed, "init");
  m.initialize(rng);
  if (c.q_init == "mimic") {
    m.mimic_prior_with_inference();
  }
  return m;
}

inline ToyWorld make_toy_world_from(const ExperimentConfig& c) {
  if (c.toy.world == "fixture") {
    return toy_fixture_world();
  }
  Rng rng = make_rng(c.toy.world_seed, "world");
  return random_toy_world(c.toy.cells, c.toy.scales, c.toy.classes, rng);
}

/// Tabular model at the world's tables; q starts at the prior ("mimic") or uniform.
inline TabularModel make_tabular_model(const ExperimentConfig& c) {
  TabularModel m{make_toy_world_from(c), c.toy.glimpses};
  if (c.q_init == "mimic") {
    m.copy_prior_to_proposal();
  }
  return m;
}

struct RunOutcome {
  std::uint64_t updates = 0;
  std::filesystem::path metrics;
  std::filesystem::path checkpoint;
};

inline std::filesystem::path checkpoint_path(const std::filesystem::path& dir, const std::string& run_id,
                                             std::optional<std::uint64_t> update = std::nullopt) {
  if (update) {
    return dir / ("checkpoint-" + run_id + "-" + std::to_string(*update) + ".bin");
  }
  return dir / ("checkpoint-" + run_id + ".bin");
}

/**
 * Trains to c.train.updates, writing metrics-<run-id>.jsonl (a row at update
 * 0, then every metrics_every updates, then a final partial window) and
 * checkpoints every checkpoint_every updates plus at exit. With `resume`, the
 * model and trainer continue from the checkpoint and metrics are appended.
 */
template <GlimpseModel Model>
RunOutcome run_training(Model& model, TrainingSet<typename Model::context_type> data, const ExperimentConfig& c,
                        const std::optional<Checkpoint>& resume = std::nullopt, std::ostream* log = nullptr) {
  const std::filesystem::path dir{c.output_dir};
  std::filesystem::create_directories(dir);
  Trainer<Model> trainer{model, std::move(data), TrainerOptions::from(c)};
  if (resume) {
    if (resume->seed != c.train.seed) {
      throw ConfigError{"checkpoint seed differs from the configured seed"};
    }
    load_parameters(model, *resume);
    trainer.restore(resume->state);
  }
  RunOutcome out;
  out.metrics = metrics_path(dir, c.run_id);
  MetricsWriter writer{out.metrics, c.run_id, resume.has_value()};
  const auto start = std::chrono::steady_clock::now();
  auto stamp = [&](TrainingMetrics m) {
    m.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    writer.write(m);
    if (log != nullptr) {
      *log << "update " << m.update << "  train-error " << format_real(m.train_error) << "  ESS "
           << format_real(m.ess) << "  L_M " << format_real(m.lm_hat) << '\n';
    }
  };
  if (!resume) {
    stamp(trainer.initial_metrics());
  }
  while (trainer.update() < c.train.updates) {
    trainer.train_step();
    if (trainer.flush_due()) {
      stamp(trainer.flush());
    }
    if (trainer.update() % c.train.checkpoint_every == 0) {
      write_checkpoint(make_checkpoint(model, trainer), checkpoint_path(dir, c.run_id, trainer.update()));
    }
  }
  if (!trainer.window_empty()) {
    stamp(trainer.flush());
  }
  trainer.check_degenerate(true);
  out.updates = trainer.update();
  out.checkpoint = checkpoint_path(dir, c.run_id);
  write_checkpoint(make_checkpoint(model, trainer), out.checkpoint);
  return out;
}

}  // namespace wsram

#endif  // WSRAM_TRAINING_EXPERIMENT_HPP
