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

#ifndef WSRAM_TRAINING_DIAGNOSTICS_HPP
#define WSRAM_TRAINING_DIAGNOSTICS_HPP

#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include <wsram/estimators/estimators.hpp>
#include <wsram/estimators/variance_probe.hpp>
#include <wsram/training/metrics.hpp>

namespace wsram {

struct DiagnosticRow {
  EstimatorTag tag = EstimatorTag::var;
  double variance = 0.0;
  double standard_error = 0.0;
  double mean_ess = 0.0;
  std::size_t resamples = 0;
};

/**
 * Gradient-variance probe and mean ESS of each estimator on one fixed batch.
 * Every tag uses the same probe seed, so tags sharing a proposal see the
 * same trajectories.
 */
template <GlimpseModel Model>
std::vector<DiagnosticRow> diagnose(const Model& model, std::span<const typename Model::context_type> contexts,
                                    std::span<const std::size_t> labels, std::size_t samples,
                                    std::size_t resamples, std::uint64_t seed,
                                    std::span<const double> baselines = {},
                                    std::span<const EstimatorTag> tags = all_estimator_tags) {
  std::vector<DiagnosticRow> rows;
  for (EstimatorTag tag : tags) {
    const auto p = probe_estimator(tag, model, contexts, labels, samples, resamples, seed, baselines);
    rows.push_back(DiagnosticRow{tag, p.variance, p.standard_error, p.mean_ess, p.resamples});
  }
  return rows;
}

inline void write_diagnostics_text(const std::vector<DiagnosticRow>& rows, std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %-24s %-24s %s\n", "estimator", "grad-variance", "std-error", "mean-ESS");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-10s %-24.17g %-24.17g %.17g\n", std::string{to_string(r.tag)}.c_str(),
                  r.variance, r.standard_error, r.mean_ess);
    out << line;
  }
}

inline nlohmann::json diagnostics_json(const std::vector<DiagnosticRow>& rows, std::size_t samples,
                                       std::size_t examples) {
  nlohmann::json j;
  j["samples"] = samples;
  j["examples"] = examples;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"estimator", std::string{to_string(r.tag)}},
                         {"grad_variance", r.variance},
                         {"std_error", r.standard_error},
                         {"mean_ess", r.mean_ess},
                         {"resamples", r.resamples}});
  }
  return j;
}

}  // namespace wsram

#endif  // WSRAM_TRAINING_DIAGNOSTICS_HPP
