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

#ifndef WSRAM_TRAINING_CONFIG_HPP
#define WSRAM_TRAINING_CONFIG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include <wsram/errors.hpp>
#include <wsram/estimators/estimators.hpp>
#include <wsram/model/attention_network.hpp>
#include <wsram/training/adam.hpp>

/**
 * \file
 * \brief Experiment configuration: one JSON document, every key optional,
 * unknown keys rejected.
 *
 *   {
 *     "task": "image" | "toy",
 *     "data":        {"train": path, "test": path},
 *     "model":       {"canvas", "retina", "scales": [..], "low_res", "hidden1", "hidden2",
 *                     "inference_hidden", "classes", "glimpses", "location_std", "q_init"},
 *     "toy":         {"world": "fixture" | "random", "cells", "scales", "classes",
 *                     "glimpses", "world_seed", "pool"},
 *     "train":       {"estimator", "samples", "batch", "updates", "seed", "threads",
 *                     "metrics_every", "checkpoint_every", "probe_resamples", "probe_examples",
 *                     "baseline", "baseline_decay", "baseline_lr"},
 *     "optimizer":   {"lr", "beta1", "beta2", "eps"},
 *     "exploration": {"temperature", "anneal_fraction", "coverage_weight", "entropy_weight",
 *                     "coverage_target": [x, y]},
 *     "eval":        {"rollouts"},
 *     "output":      {"dir", "run_id"}
 *   }
 */

namespace wsram {

struct ToyConfig {
  std::string world = "fixture";
  std::size_t cells = 2;
  std::size_t scales = 1;
  std::size_t classes = 2;
  std::size_t glimpses = 1;
  std::uint64_t world_seed = 1;
  std::size_t pool = 1024;
};

struct TrainConfig {
  std::string estimator = "WSRAM+q+c";
  std::size_t samples = 5;
  std::size_t batch = 32;
  std::uint64_t updates = 50000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::uint64_t metrics_every = 100;
  std::uint64_t checkpoint_every = 5000;
  std::size_t probe_resamples = 8;
  std::size_t probe_examples = 4;
  std::string baseline = "ema";  // "ema" or "learned"
  double baseline_decay = 0.99;
  double baseline_lr = 1e-3;
};

struct ExplorationConfig {
  double temperature = 1.5;
  double anneal_fraction = 0.1;
  double coverage_weight = 0.01;
  double entropy_weight = 0.01;
  std::array<double, 2> coverage_target{0.0, 0.0};
};

struct ExperimentConfig {
  std::string task = "image";
  std::string train_data;
  std::string test_data;
  NetworkShape network{};
  std::string q_init = "mimic";  // "mimic" or "random"
  ToyConfig toy{};
  TrainConfig train{};
  AdamConfig optimizer{};
  ExplorationConfig exploration{};
  std::size_t eval_rollouts = 10;
  std::string output_dir = "runs";
  std::string run_id = "run";

  [[nodiscard]] EstimatorTag estimator() const { return parse_estimator_tag(train.estimator); }
};

inline void validate(const ExperimentConfig& c) {
  if (c.task != "image" && c.task != "toy") {
    throw ConfigError{"task must be \"image\" or \"toy\""};
  }
  if (c.task == "image") {
    validate(c.network);
  } else {
    if (c.toy.world != "fixture" && c.toy.world != "random") {
      throw ConfigError{"toy.world must be \"fixture\" or \"random\""};
    }
    if (c.toy.cells == 0 || c.toy.scales == 0 || c.toy.classes < 2 || c.toy.glimpses == 0 || c.toy.pool == 0) {
      throw ConfigError{"toy world needs cells, scales, glimpses, pool >= 1 and classes >= 2"};
    }
  }
  if (c.q_init != "mimic" && c.q_init != "random") {
    throw ConfigError{"model.q_init must be \"mimic\" or \"random\""};
  }
  const EstimatorTag tag = c.estimator();
  if (is_wake_q(tag)) {
    throw ConfigError{"WAKE-Q tags estimate the inference network only; train with a WSRAM+q variant"};
  }
  if (c.train.samples < 1) {
    throw ConfigError{"train.samples (M) must be >= 1"};
  }
  if (c.train.batch < 1) {
    throw ConfigError{"train.batch must be >= 1"};
  }
  if (c.train.metrics_every < 1 || c.train.checkpoint_every < 1) {
    throw ConfigError{"metrics and checkpoint intervals must be >= 1"};
  }
  if (c.train.probe_resamples == 1) {
    throw ConfigError{"train.probe_resamples must be 0 (off) or >= 2"};
  }
  if (c.train.baseline != "ema" && c.train.baseline != "learned") {
    throw ConfigError{"train.baseline must be \"ema\" or \"learned\""};
  }
  if (!(c.train.baseline_decay >= 0.0 && c.train.baseline_decay < 1.0) || !(c.train.baseline_lr >= 0.0)) {
    throw ConfigError{"baseline decay must be in [0, 1) and its learning rate >= 0"};
  }
  validate(c.optimizer);
  const auto& e = c.exploration;
  if (!(e.temperature > 0.0) || !std::isfinite(e.temperature)) {
    throw ConfigError{"exploration.temperature must be > 0"};
  }
  if (!(e.anneal_fraction >= 0.0 && e.anneal_fraction <= 1.0)) {
    throw ConfigError{"exploration.anneal_fraction must be in [0, 1]"};
  }
  if (!(e.coverage_weight >= 0.0) || !(e.entropy_weight >= 0.0)) {
    throw ConfigError{"exploration weights must be >= 0"};
  }
  if (c.eval_rollouts < 1) {
    throw ConfigError{"eval.rollouts must be >= 1"};
  }
  if (c.run_id.empty() || c.run_id.find('/') != std::string::npos) {
    throw ConfigError{"output.run_id must be a non-empty file-name fragment"};
  }
}

namespace detail {

using Json = nlohmann::json;

inline void reject_unknown(const Json& obj, std::string_view section, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) {
    throw ConfigError{"config section '" + std::string{section} + "' must be an object"};
  }
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (auto key : keys) {
      known = known || key == k;
    }
    if (!known) {
      throw ConfigError{"unknown config key '" + (section.empty() ? k : std::string{section} + "." + k) + "'"};
    }
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out, std::string_view section) {
  if (!obj.contains(key)) {
    return;
  }
  try {
    const auto& v = obj.at(key);
    if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) {
        throw ConfigError{"expected a non-negative integer"};
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) {
        throw ConfigError{"expected a number"};
      }
    }
    out = v.template get<T>();
  } catch (const std::exception& e) {
    throw ConfigError{"bad value for '" + std::string{section} + "." + key + "': " + e.what()};
  }
}

}  // namespace detail

/// Parses a config document; missing keys keep their defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  using detail::read;
  ExperimentConfig c;
  detail::reject_unknown(j, "", {"task", "data", "model", "toy", "train", "optimizer", "exploration", "eval", "output"});
  read(j, "task", c.task, "");
  if (j.contains("data")) {
    const auto& d = j["data"];
    detail::reject_unknown(d, "data", {"train", "test"});
    read(d, "train", c.train_data, "data");
    read(d, "test", c.test_data, "data");
  }
  if (j.contains("model")) {
    const auto& m = j["model"];
    detail::reject_unknown(m, "model", {"canvas", "retina", "scales", "low_res", "hidden1", "hidden2",
                                        "inference_hidden", "classes", "glimpses", "location_std", "q_init"});
    auto& n = c.network;
    read(m, "canvas", n.canvas, "model");
    read(m, "retina", n.glimpse.retina, "model");
    read(m, "scales", n.glimpse.scales, "model");
    read(m, "low_res", n.low_res, "model");
    read(m, "hidden1", n.hidden1, "model");
    read(m, "hidden2", n.hidden2, "model");
    read(m, "inference_hidden", n.inference_hidden, "model");
    read(m, "classes", n.classes, "model");
    read(m, "glimpses", n.glimpses, "model");
    if (m.contains("location_std")) {
      double sd = 0.0;
      read(m, "location_std", sd, "model");
      if (!(sd > 0.0)) {
        throw ConfigError{"model.location_std must be > 0"};
      }
      n.location_log_std = std::log(sd);
    }
    read(m, "q_init", c.q_init, "model");
  }
  if (j.contains("toy")) {
    const auto& t = j["toy"];
    detail::reject_unknown(t, "toy", {"world", "cells", "scales", "classes", "glimpses", "world_seed", "pool"});
    read(t, "world", c.toy.world, "toy");
    read(t, "cells", c.toy.cells, "toy");
    read(t, "scales", c.toy.scales, "toy");
    read(t, "classes", c.toy.classes, "toy");
    read(t, "glimpses", c.toy.glimpses, "toy");
    read(t, "world_seed", c.toy.world_seed, "toy");
    read(t, "pool", c.toy.pool, "toy");
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    detail::reject_unknown(t, "train", {"estimator", "samples", "batch", "updates", "seed", "threads",
                                        "metrics_every", "checkpoint_every", "probe_resamples",
                                        "probe_examples", "baseline", "baseline_decay", "baseline_lr"});
    auto& r = c.train;
    read(t, "estimator", r.estimator, "train");
    read(t, "samples", r.samples, "train");
    read(t, "batch", r.batch, "train");
    read(t, "updates", r.updates, "train");
    read(t, "seed", r.seed, "train");
    read(t, "threads", r.threads, "train");
    read(t, "metrics_every", r.metrics_every, "train");
    read(t, "checkpoint_every", r.checkpoint_every, "train");
    read(t, "probe_resamples", r.probe_resamples, "train");
    read(t, "probe_examples", r.probe_examples, "train");
    read(t, "baseline", r.baseline, "train");
    read(t, "baseline_decay", r.baseline_decay, "train");
    read(t, "baseline_lr", r.baseline_lr, "train");
  }
  if (j.contains("optimizer")) {
    const auto& o = j["optimizer"];
    detail::reject_unknown(o, "optimizer", {"lr", "beta1", "beta2", "eps"});
    read(o, "lr", c.optimizer.lr, "optimizer");
    read(o, "beta1", c.optimizer.beta1, "optimizer");
    read(o, "beta2", c.optimizer.beta2, "optimizer");
    read(o, "eps", c.optimizer.eps, "optimizer");
  }
  if (j.contains("exploration")) {
    const auto& e = j["exploration"];
    detail::reject_unknown(e, "exploration", {"temperature", "anneal_fraction", "coverage_weight",
                                              "entropy_weight", "coverage_target"});
    read(e, "temperature", c.exploration.temperature, "exploration");
    read(e, "anneal_fraction", c.exploration.anneal_fraction, "exploration");
    read(e, "coverage_weight", c.exploration.coverage_weight, "exploration");
    read(e, "entropy_weight", c.exploration.entropy_weight, "exploration");
    read(e, "coverage_target", c.exploration.coverage_target, "exploration");
  }
  if (j.contains("eval")) {
    detail::reject_unknown(j["eval"], "eval", {"rollouts"});
    read(j["eval"], "rollouts", c.eval_rollouts, "eval");
  }
  if (j.contains("output")) {
    detail::reject_unknown(j["output"], "output", {"dir", "run_id"});
    read(j["output"], "dir", c.output_dir, "output");
    read(j["output"], "run_id", c.run_id, "output");
  }
  validate(c);
  return c;
}

/**
 * Applies one `a.b.c=value` override to a config document. The value is
 * parsed as JSON when possible and taken as a string otherwise.
 */
inline void apply_override(nlohmann::json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError{"override '" + std::string{assignment} + "' is not of the form key=value"};
  }
  const std::string path{assignment.substr(0, eq)};
  const std::string text{assignment.substr(eq + 1)};
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) {
    value = text;
  }
  nlohmann::json* node = &doc;
  std::stringstream parts{path};
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(parts, key, '.')) {
    if (key.empty()) {
      throw ConfigError{"override path '" + path + "' has an empty component"};
    }
    keys.push_back(key);
  }
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    if (!node->is_object()) {
      throw ConfigError{"override path '" + path + "' crosses a non-object value"};
    }
    node = &(*node)[keys[i]];
    if (node->is_null()) {
      *node = nlohmann::json::object();
    }
  }
  if (!node->is_object()) {
    throw ConfigError{"override path '" + path + "' crosses a non-object value"};
  }
  (*node)[keys.back()] = std::move(value);
}

/// Reads a config file (empty path = defaults), applies overrides, validates.
inline ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  nlohmann::json doc = nlohmann::json::object();
  if (!path.empty()) {
    std::ifstream in{path};
    if (!in) {
      throw ConfigError{"cannot open config file '" + path + "'"};
    }
    doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
      throw ConfigError{"config file '" + path + "' is not valid JSON"};
    }
  }
  for (const auto& o : overrides) {
    apply_override(doc, o);
  }
  return config_from_json(doc);
}

/// Full config as JSON, every field present (written next to run outputs).
inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["task"] = c.task;
  j["data"] = {{"train", c.train_data}, {"test", c.test_data}};
  const auto& n = c.network;
  j["model"] = {{"canvas", n.canvas},
                {"retina", n.glimpse.retina},
                {"scales", n.glimpse.scales},
                {"low_res", n.low_res},
                {"hidden1", n.hidden1},
                {"hidden2", n.hidden2},
                {"inference_hidden", n.inference_hidden},
                {"classes", n.classes},
                {"glimpses", n.glimpses},
                {"location_std", std::exp(n.location_log_std)},
                {"q_init", c.q_init}};
  j["toy"] = {{"world", c.toy.world},       {"cells", c.toy.cells},       {"scales", c.toy.scales},
              {"classes", c.toy.classes},   {"glimpses", c.toy.glimpses}, {"world_seed", c.toy.world_seed},
              {"pool", c.toy.pool}};
  const auto& t = c.train;
  j["train"] = {{"estimator", t.estimator},
                {"samples", t.samples},
                {"batch", t.batch},
                {"updates", t.updates},
                {"seed", t.seed},
                {"threads", t.threads},
                {"metrics_every", t.metrics_every},
                {"checkpoint_every", t.checkpoint_every},
                {"probe_resamples", t.probe_resamples},
                {"probe_examples", t.probe_examples},
                {"baseline", t.baseline},
                {"baseline_decay", t.baseline_decay},
                {"baseline_lr", t.baseline_lr}};
  j["optimizer"] = {{"lr", c.optimizer.lr}, {"beta1", c.optimizer.beta1}, {"beta2", c.optimizer.beta2},
                    {"eps", c.optimizer.eps}};
  const auto& e = c.exploration;
  j["exploration"] = {{"temperature", e.temperature},
                      {"anneal_fraction", e.anneal_fraction},
                      {"coverage_weight", e.coverage_weight},
                      {"entropy_weight", e.entropy_weight},
                      {"coverage_target", e.coverage_target}};
  j["eval"] = {{"rollouts", c.eval_rollouts}};
  j["output"] = {{"dir", c.output_dir}, {"run_id", c.run_id}};
  return j;
}

}  // namespace wsram

#endif  // WSRAM_TRAINING_CONFIG_HPP
