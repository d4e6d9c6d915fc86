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

#ifndef WSRAM_TRAINING_TRAINER_HPP
#define WSRAM_TRAINING_TRAINER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <wsram/diffnet/layers.hpp>
#include <wsram/diffnet/parameter_vector.hpp>
#include <wsram/env/mnist.hpp>
#include <wsram/env/toy_world.hpp>
#include <wsram/errors.hpp>
#include <wsram/estimators/estimators.hpp>
#include <wsram/estimators/importance_weights.hpp>
#include <wsram/estimators/variance_probe.hpp>
#include <wsram/model/classify.hpp>
#include <wsram/model/tabular_model.hpp>
#include <wsram/model/trajectory.hpp>
#include <wsram/rng.hpp>
#include <wsram/training/adam.hpp>
#include <wsram/training/config.hpp>
#include <wsram/training/exploration.hpp>
#include <wsram/training/metrics.hpp>

/**
 * \file
 * \brief Wake-sleep training loop.
 *
 * One update:
 *   1. draw a batch (substream "batch", u);
 *   2. per example (substream "rollout", u, i), in parallel: M rollouts from
 *      the estimator's proposal at the annealed temperature, importance
 *      weights (resampled once if degenerate, then skipped), one untempered
 *      prior rollout for the training error;
 *   3. per example, in parallel: estimator seeds plus exploration seeds,
 *      backpropagated into a private theta buffer, and wake-q coefficients
 *      into a private eta buffer;
 *   4. buffers summed in example order, then one Adam step each.
 * Results do not depend on the thread count.
 */

namespace wsram {

template <typename Ctx>
struct TrainingSet {
  std::size_t size = 0;
  std::function<const Ctx&(std::size_t)> context;
  std::function<std::size_t(std::size_t)> label;
};

/// View over a dataset; the dataset must outlive the view.
inline TrainingSet<Image> image_training_set(const Dataset& ds) {
  return TrainingSet<Image>{ds.size(), [&ds](std::size_t i) -> const Image& { return ds.examples[i].image; },
                            [&ds](std::size_t i) { return ds.examples[i].label; }};
}

/// `pool` labels drawn from the world's label distribution (substream "dataset").
inline TrainingSet<ToyInput> toy_training_set(const ToyWorld& world, std::size_t pool, std::uint64_t seed) {
  if (pool == 0) {
    throw ConfigError{"toy label pool must be non-empty"};
  }
  auto labels = std::make_shared<std::vector<std::size_t>>();
  Rng rng = make_rng(seed, "dataset");
  for (std::size_t i = 0; i < pool; ++i) {
    labels->push_back(sample(Categorical{[&] {
                               std::vector<double> l;
                               for (double p : world.label_distribution) {
                                 l.push_back(std::log(p));
                               }
                               return l;
                             }()},
                             rng));
  }
  static const ToyInput input{};
  return TrainingSet<ToyInput>{pool, [](std::size_t) -> const ToyInput& { return input; },
                               [labels](std::size_t i) { return (*labels)[i]; }};
}

namespace detail {

/// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first error.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) {
          fn(i);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  for (auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

inline std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) {
    return requested;
  }
  return std::max<unsigned>(1, std::thread::hardware_concurrency());
}

}  // namespace detail

struct TrainerOptions {
  EstimatorTag tag = EstimatorTag::wsram_q_c;
  std::size_t samples = 5;
  std::size_t batch = 32;
  std::uint64_t total_updates = 0;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::uint64_t metrics_every = 100;
  AdamConfig optimizer{};
  ExplorationConfig exploration{};
  std::string baseline = "ema";
  double baseline_decay = 0.99;
  double baseline_lr = 1e-3;
  std::size_t probe_resamples = 8;
  std::size_t probe_examples = 4;
  std::size_t degenerate_window = 1000;
  double degenerate_limit = 0.1;

  static TrainerOptions from(const ExperimentConfig& c) {
    TrainerOptions o;
    o.tag = c.estimator();
    o.samples = c.train.samples;
    o.batch = c.train.batch;
    o.total_updates = c.train.updates;
    o.seed = c.train.seed;
    o.threads = detail::resolve_threads(c.train.threads);
    o.metrics_every = c.train.metrics_every;
    o.optimizer = c.optimizer;
    o.exploration = c.exploration;
    o.baseline = c.train.baseline;
    o.baseline_decay = c.train.baseline_decay;
    o.baseline_lr = c.train.baseline_lr;
    o.probe_resamples = c.train.probe_resamples;
    o.probe_examples = c.train.probe_examples;
    return o;
  }
};

struct ExampleStats {
  bool skipped = false;
  bool error = false;
  double f_hat = 0.0;
  double lm_hat = 0.0;
  double ess = 0.0;
  double scale_entropy = 0.0;
};

struct TrainStepResult {
  std::uint64_t update = 0;  // updates completed after this step
  double temperature = 1.0;
  std::size_t examples = 0;
  std::size_t skipped = 0;
  double train_error = 0.0;
  double f_hat = 0.0;
  double lm_hat = 0.0;
  double ess = 0.0;
  double scale_entropy = 0.0;
  std::vector<ExampleStats> per_example;
  bool theta_stepped = false;
  bool eta_stepped = false;
};

/// Running sums between two metrics flushes.
struct MetricsWindow {
  std::uint64_t examples = 0;
  std::uint64_t usable = 0;
  double errors = 0.0;
  double f_hat = 0.0;
  double lm_hat = 0.0;
  double ess = 0.0;
  double scale_entropy = 0.0;

  void add(const ExampleStats& s) {
    ++examples;
    errors += s.error ? 1.0 : 0.0;
    scale_entropy += s.scale_entropy;
    if (!s.skipped) {
      ++usable;
      f_hat += s.f_hat;
      lm_hat += s.lm_hat;
      ess += s.ess;
    }
  }

  [[nodiscard]] TrainingMetrics summary(std::uint64_t update) const {
    TrainingMetrics m;
    m.update = update;
    const double n = static_cast<double>(examples);
    const double u = static_cast<double>(usable);
    const double nan = std::nan("");
    m.train_error = examples ? errors / n : nan;
    m.scale_entropy = examples ? scale_entropy / n : nan;
    m.f_hat = usable ? f_hat / u : nan;
    m.lm_hat = usable ? lm_hat / u : nan;
    m.ess = usable ? ess / u : nan;
    return m;
  }
};

/// Moving-average or learned (linear in baseline_features) reward baseline for VAR+c.
class RewardBaseline {
 public:
  RewardBaseline() = default;
  RewardBaseline(std::string kind, std::size_t feature_dim, double decay, double lr)
      : kind_{std::move(kind)}, decay_{decay} {
    adam_cfg_.lr = lr;
    if (kind_ == "learned") {
      layer_ = Layer{{LayerKind::dense, feature_dim, 1, Activation::identity}, params_, "baseline"};
      adam_ = AdamState{params_.size()};
    }
  }

  [[nodiscard]] bool learned() const noexcept { return kind_ == "learned"; }

  /// Baseline for one example; `batch_mean` stands in before the average has any history.
  [[nodiscard]] double value(std::span<const double> features, double batch_mean) const {
    if (learned()) {
      return layer_.forward(params_, features).output[0];
    }
    return ready_ ? ema_ : batch_mean;
  }

  /// One update from (features, target log-likelihood) pairs.
  void update(const std::vector<std::vector<double>>& features, const std::vector<double>& targets) {
    if (targets.empty()) {
      return;
    }
    if (!learned()) {
      double mean = 0.0;
      for (double t : targets) {
        mean += t;
      }
      mean /= static_cast<double>(targets.size());
      ema_ = ready_ ? decay_ * ema_ + (1.0 - decay_) * mean : mean;
      ready_ = true;
      return;
    }
    const double inv = 1.0 / static_cast<double>(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto tape = layer_.forward(params_, features[i]);
      const std::vector<double> d{(tape.output[0] - targets[i]) * inv};
      layer_.backward(tape, d, params_);
    }
    adam_step(params_, adam_, adam_cfg_, nullptr);
  }

  [[nodiscard]] double ema() const noexcept { return ema_; }
  [[nodiscard]] bool ema_ready() const noexcept { return ready_; }
  [[nodiscard]] const ParameterVector& params() const noexcept { return params_; }
  [[nodiscard]] const AdamState& adam() const noexcept { return adam_; }

  void restore(double ema, bool ready, std::span<const double> params, AdamState adam) {
    ema_ = ema;
    ready_ = ready;
    if (params.size() != params_.size()) {
      throw ConfigError{"baseline parameters do not match the configured baseline"};
    }
    params_.assign(params);
    adam_ = std::move(adam);
  }

 private:
  std::string kind_ = "ema";
  double decay_ = 0.99;
  double ema_ = 0.0;
  bool ready_ = false;
  ParameterVector params_;
  Layer layer_;
  AdamState adam_;
  AdamConfig adam_cfg_{};
};

/// Everything besides the model parameters that a resumed run needs.
struct TrainerState {
  std::uint64_t update = 0;
  AdamState adam_theta;
  AdamState adam_eta;
  double baseline_ema = 0.0;
  bool baseline_ready = false;
  std::vector<double> baseline_params;
  AdamState adam_baseline;
  MetricsWindow window;
  std::deque<std::pair<std::uint64_t, std::uint64_t>> degenerate;  // (skipped, examples) per update
  std::vector<std::size_t> last_batch;
};

template <GlimpseModel Model>
class Trainer {
 public:
  using Ctx = typename Model::context_type;
  using Traj = typename Model::trajectory_type;

  Trainer(Model& model, TrainingSet<Ctx> data, TrainerOptions opt)
      : model_{model}, data_{std::move(data)}, opt_{std::move(opt)},
        adam_theta_{model.theta().size()}, adam_eta_{model.eta().size()} {
    if (data_.size == 0) {
      throw ConfigError{"training set is empty"};
    }
    if (is_wake_q(opt_.tag)) {
      throw ConfigError{"WAKE-Q tags cannot drive training on their own"};
    }
    if (opt_.samples == 0 || opt_.batch == 0) {
      throw ConfigError{"M and batch size must be >= 1"};
    }
    validate(opt_.optimizer);
    baseline_ = RewardBaseline{opt_.baseline, model_.baseline_features(data_.context(0)).size(),
                               opt_.baseline_decay, opt_.baseline_lr};
  }

  [[nodiscard]] std::uint64_t update() const noexcept { return update_; }
  [[nodiscard]] const TrainerOptions& options() const noexcept { return opt_; }
  [[nodiscard]] const Model& model() const noexcept { return model_; }
  [[nodiscard]] const RewardBaseline& baseline() const noexcept { return baseline_; }

  /// Linear anneal from the initial temperature to 1 over the first anneal_fraction of updates.
  [[nodiscard]] double temperature(std::uint64_t u) const {
    const auto& e = opt_.exploration;
    const double span = e.anneal_fraction * static_cast<double>(opt_.total_updates);
    if (!(span > 0.0)) {
      return 1.0;
    }
    const double frac = std::min(1.0, static_cast<double>(u) / span);
    return e.temperature + (1.0 - e.temperature) * frac;
  }

  [[nodiscard]] std::vector<std::size_t> batch_indices(std::string_view stream, std::uint64_t u) const {
    Rng rng = make_rng(opt_.seed, stream, u);
    std::uniform_int_distribution<std::size_t> pick{0, data_.size - 1};
    std::vector<std::size_t> idx(opt_.batch);
    for (auto& i : idx) {
      i = pick(rng);
    }
    return idx;
  }

  /// One wake-p (and, for +q tags, wake-q) update on a fresh batch.
  TrainStepResult train_step() {
    const std::uint64_t u = update_;
    const double tau = temperature(u);
    const auto batch = batch_indices("batch", u);
    auto rolled = roll_batch(batch, "rollout", u, tau);

    const std::size_t b = batch.size();
    const double inv_b = 1.0 / static_cast<double>(b);
    const EstimatorTag tag = opt_.tag;
    const bool cv = uses_control_variate(tag);
    const bool wake_q = uses_inference_network(tag);

    CoverageStatistics coverage;
    for (const auto& r : rolled) {
      if (!r.stats.skipped) {
        add_coverage(coverage, std::span<const Traj>{r.trajs});
      }
    }
    const auto loc_seed = coverage_seed(coverage, opt_.exploration.coverage_target, opt_.exploration.coverage_weight);

    // Baselines for VAR+c, fixed before any parameter moves.
    std::vector<double> baselines(b, 0.0);
    std::vector<std::vector<double>> features;
    std::vector<double> targets;
    if (tag == EstimatorTag::var_c) {
      double batch_mean = 0.0;
      std::size_t count = 0;
      for (const auto& r : rolled) {
        for (const auto& t : r.trajs) {
          batch_mean += t.log_likelihood;
          ++count;
        }
      }
      batch_mean = count ? batch_mean / static_cast<double>(count) : 0.0;
      for (std::size_t i = 0; i < b; ++i) {
        features.push_back(model_.baseline_features(data_.context(batch[i])));
        baselines[i] = baseline_.value(features.back(), batch_mean);
        double mean = 0.0;
        for (const auto& t : rolled[i].trajs) {
          mean += t.log_likelihood;
        }
        targets.push_back(rolled[i].trajs.empty() ? 0.0 : mean / static_cast<double>(rolled[i].trajs.size()));
      }
    }

    theta_buf_.resize(b);
    eta_buf_.resize(wake_q ? b : 0);
    const double ent = opt_.exploration.entropy_weight / static_cast<double>(opt_.samples);
    const std::array<double, 2> loc{loc_seed[0] * static_cast<double>(b), loc_seed[1] * static_cast<double>(b)};
    detail::parallel_for(b, opt_.threads, [&](std::size_t i) {
      auto& gt = theta_buf_[i];
      gt.assign(model_.theta().size(), 0.0);
      if (wake_q) {
        eta_buf_[i].assign(model_.eta().size(), 0.0);
      }
      const auto& r = rolled[i];
      if (r.stats.skipped) {
        return;
      }
      const std::span<const Traj> trajs{r.trajs};
      std::vector<PredictionSeed> seeds =
          is_variational(tag) ? variational_seeds(trajs, baselines[i]) : wsram_seeds(trajs, *r.weights, cv);
      for (auto& s : seeds) {
        s.entropy += ent;
        s.location[0] += loc[0];
        s.location[1] += loc[1];
      }
      apply_prediction_seeds(model_, trajs, std::span<const PredictionSeed>{seeds}, inv_b, gt);
      if (wake_q) {
        const auto coefs = wake_q_coefficients(*r.weights, cv);
        for (std::size_t m = 0; m < trajs.size(); ++m) {
          model_.backprop_inference(trajs[m], inv_b * coefs[m], eta_buf_[i]);
        }
      }
    });

    TrainStepResult res = summarize(rolled, tau);
    if (res.skipped < b) {
      reduce_into(model_.theta().grads(), theta_buf_, -1.0);
      adam_step(model_.theta(), adam_theta_, opt_.optimizer);
      res.theta_stepped = true;
      if (wake_q) {
        reduce_into(model_.eta().grads(), eta_buf_, 1.0);
        adam_step(model_.eta(), adam_eta_, opt_.optimizer);
        res.eta_stepped = true;
      }
      if (tag == EstimatorTag::var_c) {
        std::vector<std::vector<double>> f;
        std::vector<double> t;
        for (std::size_t i = 0; i < b; ++i) {
          if (!rolled[i].stats.skipped) {
            f.push_back(std::move(features[i]));
            t.push_back(targets[i]);
          }
        }
        baseline_.update(f, t);
      }
    }
    ++update_;
    res.update = update_;
    last_batch_ = batch;
    for (const auto& s : res.per_example) {
      window_.add(s);
    }
    track_degenerate(res.skipped, res.examples);
    return res;
  }

  /// Metrics of the current parameters on a batch from substream "initial", no update.
  TrainingMetrics initial_metrics() {
    const auto batch = batch_indices("initial", update_);
    const auto rolled = roll_batch(batch, "initial-rollout", update_, temperature(update_));
    MetricsWindow w;
    for (const auto& r : rolled) {
      w.add(r.stats);
    }
    last_batch_ = batch;
    auto m = w.summary(update_);
    m.grad_variance = probe(update_);
    return m;
  }

  /// True when the last step completed a metrics interval.
  [[nodiscard]] bool flush_due() const noexcept { return update_ % opt_.metrics_every == 0; }
  [[nodiscard]] bool window_empty() const noexcept { return window_.examples == 0; }

  /// Summarizes and clears the current metrics window.
  TrainingMetrics flush() {
    auto m = window_.summary(update_);
    m.grad_variance = probe(update_);
    window_ = MetricsWindow{};
    return m;
  }

  /// Throws TrainingAbort when the degenerate rate over the trailing window is too high.
  /// Partial windows are checked only when `final` is set.
  void check_degenerate(bool final = false) const {
    if (degenerate_.empty() || (!final && degenerate_.size() < opt_.degenerate_window)) {
      return;
    }
    std::uint64_t skipped = 0;
    std::uint64_t total = 0;
    for (const auto& [s, n] : degenerate_) {
      skipped += s;
      total += n;
    }
    const double rate = total ? static_cast<double>(skipped) / static_cast<double>(total) : 0.0;
    if (rate > opt_.degenerate_limit) {
      throw TrainingAbort{"degenerate importance weights in " + std::to_string(skipped) + " of " +
                          std::to_string(total) + " examples over the last " + std::to_string(degenerate_.size()) +
                          " updates (ending at update " + std::to_string(update_) + ")"};
    }
  }

  [[nodiscard]] TrainerState state() const {
    TrainerState s;
    s.update = update_;
    s.adam_theta = adam_theta_;
    s.adam_eta = adam_eta_;
    s.baseline_ema = baseline_.ema();
    s.baseline_ready = baseline_.ema_ready();
    const auto bp = baseline_.params().values();
    s.baseline_params.assign(bp.begin(), bp.end());
    s.adam_baseline = baseline_.adam();
    s.window = window_;
    s.degenerate = degenerate_;
    s.last_batch = last_batch_;
    return s;
  }

  void restore(const TrainerState& s) {
    if (s.adam_theta.m.size() != model_.theta().size() || s.adam_eta.m.size() != model_.eta().size()) {
      throw ConfigError{"optimizer state does not match the model"};
    }
    update_ = s.update;
    adam_theta_ = s.adam_theta;
    adam_eta_ = s.adam_eta;
    baseline_.restore(s.baseline_ema, s.baseline_ready, s.baseline_params, s.adam_baseline);
    window_ = s.window;
    degenerate_ = s.degenerate;
    last_batch_ = s.last_batch;
  }

 private:
  struct Rolled {
    std::vector<Traj> trajs;
    std::optional<ImportanceWeightSet> weights;
    ExampleStats stats;
  };

  std::vector<Rolled> roll_batch(const std::vector<std::size_t>& batch, std::string_view stream, std::uint64_t u,
                                 double tau) const {
    std::vector<Rolled> out(batch.size());
    detail::parallel_for(batch.size(), opt_.threads, [&](std::size_t i) { out[i] = roll(batch[i], stream, u, i, tau); });
    return out;
  }

  Rolled roll(std::size_t example, std::string_view stream, std::uint64_t u, std::size_t i, double tau) const {
    Rng rng = make_rng(opt_.seed, stream, u, i);
    const Ctx& ctx = data_.context(example);
    const std::size_t y = data_.label(example);
    const Proposal prop = proposal_for(opt_.tag);
    Rolled r;
    for (int attempt = 0; attempt < 2 && !r.weights; ++attempt) {
      r.trajs.clear();
      for (std::size_t m = 0; m < opt_.samples; ++m) {
        r.trajs.push_back(model_.rollout(ctx, y, prop, rng, tau));
      }
      try {
        r.weights = importance_weights(std::span<const Traj>{r.trajs});
      } catch (const DegenerateWeightsError&) {
        if (attempt == 1) {
          std::clog << "warning: degenerate importance weights at update " << u << ", example " << i
                    << "; skipped\n";
        }
      }
    }
    r.stats.skipped = !r.weights.has_value();
    if (r.weights) {
      const auto bounds = bound_estimates(*r.weights);
      r.stats.f_hat = bounds.f_hat;
      r.stats.lm_hat = bounds.lm_hat;
      r.stats.ess = ess(*r.weights);
    }
    double h = 0.0;
    std::size_t steps = 0;
    for (const auto& t : r.trajs) {
      for (double e : t.step_scale_entropy) {
        h += e;
        ++steps;
      }
    }
    r.stats.scale_entropy = steps ? h / static_cast<double>(steps) : 0.0;
    const auto check = model_.rollout(ctx, y, Proposal::prior, rng, 1.0);
    const auto best = std::max_element(check.class_log_probs.begin(), check.class_log_probs.end());
    r.stats.error = static_cast<std::size_t>(best - check.class_log_probs.begin()) != y;
    return r;
  }

  static TrainStepResult summarize(const std::vector<Rolled>& rolled, double tau) {
    TrainStepResult res;
    res.temperature = tau;
    MetricsWindow w;
    for (const auto& r : rolled) {
      w.add(r.stats);
      res.per_example.push_back(r.stats);
    }
    res.examples = rolled.size();
    res.skipped = rolled.size() - w.usable;
    const auto m = w.summary(0);
    res.train_error = m.train_error;
    res.f_hat = m.f_hat;
    res.lm_hat = m.lm_hat;
    res.ess = m.ess;
    res.scale_entropy = m.scale_entropy;
    return res;
  }

  static void reduce_into(std::span<double> dst, const std::vector<std::vector<double>>& bufs, double sign) {
    std::fill(dst.begin(), dst.end(), 0.0);
    for (const auto& g : bufs) {
      for (std::size_t k = 0; k < dst.size(); ++k) {
        dst[k] += g[k];
      }
    }
    if (sign != 1.0) {
      for (double& v : dst) {
        v *= sign;
      }
    }
  }

  void track_degenerate(std::size_t skipped, std::size_t examples) {
    degenerate_.emplace_back(skipped, examples);
    while (degenerate_.size() > opt_.degenerate_window) {
      degenerate_.pop_front();
    }
    check_degenerate(false);
  }

  /// Mean per-coordinate variance of the configured estimator on the head of the last batch.
  double probe(std::uint64_t u) const {
    if (opt_.probe_resamples < 2 || opt_.probe_examples == 0 || last_batch_.empty()) {
      return std::nan("");
    }
    const std::size_t n = std::min(opt_.probe_examples, last_batch_.size());
    std::vector<Ctx> contexts;
    std::vector<std::size_t> labels;
    std::vector<double> baselines;
    for (std::size_t i = 0; i < n; ++i) {
      contexts.push_back(data_.context(last_batch_[i]));
      labels.push_back(data_.label(last_batch_[i]));
      baselines.push_back(baseline_.value(model_.baseline_features(contexts.back()), baseline_.ema()));
    }
    try {
      return probe_estimator(opt_.tag, model_, std::span<const Ctx>{contexts}, labels, opt_.samples,
                             opt_.probe_resamples, derive_seed(opt_.seed, "probe", u), baselines)
          .variance;
    } catch (const DegenerateWeightsError&) {
      return std::nan("");
    }
  }

  Model& model_;
  TrainingSet<Ctx> data_;
  TrainerOptions opt_;
  AdamState adam_theta_;
  AdamState adam_eta_;
  RewardBaseline baseline_;
  std::uint64_t update_ = 0;
  MetricsWindow window_;
  std::deque<std::pair<std::uint64_t, std::uint64_t>> degenerate_;
  std::vector<std::size_t> last_batch_;
  std::vector<std::vector<double>> theta_buf_;
  std::vector<std::vector<double>> eta_buf_;
};

/// Fraction of examples whose classify() argmax differs from the label.
template <GlimpseModel Model>
double evaluate(const Model& model, const TrainingSet<typename Model::context_type>& data, std::size_t rollouts,
                std::uint64_t seed, std::size_t threads = 1) {
  if (data.size == 0) {
    throw ConfigError{"evaluation set is empty"};
  }
  std::vector<unsigned char> wrong(data.size, 0);
  detail::parallel_for(data.size, threads, [&](std::size_t i) {
    Rng rng = make_rng(seed, "eval", i);
    wrong[i] = classify(model, data.context(i), rollouts, rng).predicted != data.label(i) ? 1 : 0;
  });
  std::size_t errors = 0;
  for (auto w : wrong) {
    errors += w;
  }
  return static_cast<double>(errors) / static_cast<double>(data.size);
}

}  // namespace wsram

#endif  // WSRAM_TRAINING_TRAINER_HPP
