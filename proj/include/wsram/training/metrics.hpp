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

#ifndef WSRAM_TRAINING_METRICS_HPP
#define WSRAM_TRAINING_METRICS_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include <wsram/errors.hpp>

/**
 * \file
 * \brief Line-delimited metrics records and the merged CSV export.
 *
 * One JSON object per line, keys in this order:
 *   schema_version, run_id, update, train_error, f_hat, lm_hat, ess,
 *   grad_variance, scale_entropy, wall_clock
 * Reals are printed with 17 significant digits; a missing value (gradient
 * probe disabled, no usable weights in the window) is `null`. wall_clock is
 * always last so determinism checks can cut it off.
 */

namespace wsram {

inline constexpr int metrics_schema_version = 1;

struct TrainingMetrics {
  std::uint64_t update = 0;
  double train_error = 0.0;
  double f_hat = 0.0;
  double lm_hat = 0.0;
  double ess = 0.0;
  double grad_variance = std::nan("");
  double scale_entropy = 0.0;
  double wall_clock = 0.0;
};

struct MetricsRecord {
  int schema_version = metrics_schema_version;
  std::string run_id;
  TrainingMetrics metrics;
};

inline std::string format_real(double v) {
  if (!std::isfinite(v)) {
    return "null";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string metrics_line(const std::string& run_id, const TrainingMetrics& m) {
  std::string s = "{\"schema_version\":" + std::to_string(metrics_schema_version);
  s += ",\"run_id\":" + nlohmann::json(run_id).dump();
  s += ",\"update\":" + std::to_string(m.update);
  s += ",\"train_error\":" + format_real(m.train_error);
  s += ",\"f_hat\":" + format_real(m.f_hat);
  s += ",\"lm_hat\":" + format_real(m.lm_hat);
  s += ",\"ess\":" + format_real(m.ess);
  s += ",\"grad_variance\":" + format_real(m.grad_variance);
  s += ",\"scale_entropy\":" + format_real(m.scale_entropy);
  s += ",\"wall_clock\":" + format_real(m.wall_clock);
  s += "}";
  return s;
}

inline std::filesystem::path metrics_path(const std::filesystem::path& dir, const std::string& run_id) {
  return dir / ("metrics-" + run_id + ".jsonl");
}

class MetricsWriter {
 public:
  MetricsWriter(const std::filesystem::path& path, std::string run_id, bool append = false)
      : run_id_{std::move(run_id)}, out_{path, append ? std::ios::app : std::ios::trunc} {
    if (!out_) {
      throw InputFormatError{"cannot open metrics file " + path.string()};
    }
  }

  void write(const TrainingMetrics& m) {
    out_ << metrics_line(run_id_, m) << '\n';
    out_.flush();
  }

 private:
  std::string run_id_;
  std::ofstream out_;
};

namespace detail {

inline double json_real(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) {
    throw InputFormatError{"metrics record lacks '" + std::string{key} + "' in " + where};
  }
  const auto& v = j.at(key);
  if (v.is_null()) {
    return std::nan("");
  }
  if (!v.is_number()) {
    throw InputFormatError{"metrics field '" + std::string{key} + "' is not a number in " + where};
  }
  return v.get<double>();
}

}  // namespace detail

/// Reads every record of a metrics file; run_id defaults to the file-name fragment.
inline std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path) {
  std::ifstream in{path};
  if (!in) {
    throw InputFormatError{"cannot open metrics file " + path.string()};
  }
  std::vector<MetricsRecord> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    const std::string where = path.string() + ":" + std::to_string(lineno);
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw InputFormatError{"malformed metrics line " + where};
    }
    MetricsRecord r;
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
      throw InputFormatError{"metrics record without schema_version at " + where};
    }
    r.schema_version = j["schema_version"].get<int>();
    if (r.schema_version != metrics_schema_version) {
      throw InputFormatError{"unsupported metrics schema version " + std::to_string(r.schema_version) +
                             " at " + where};
    }
    r.run_id = j.value("run_id", std::string{});
    if (!j.contains("update") || !j["update"].is_number_unsigned()) {
      throw InputFormatError{"metrics record without update index at " + where};
    }
    r.metrics.update = j["update"].get<std::uint64_t>();
    r.metrics.train_error = detail::json_real(j, "train_error", where);
    r.metrics.f_hat = detail::json_real(j, "f_hat", where);
    r.metrics.lm_hat = detail::json_real(j, "lm_hat", where);
    r.metrics.ess = detail::json_real(j, "ess", where);
    r.metrics.grad_variance = detail::json_real(j, "grad_variance", where);
    r.metrics.scale_entropy = detail::json_real(j, "scale_entropy", where);
    r.metrics.wall_clock = detail::json_real(j, "wall_clock", where);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::string csv_real(double v) { return std::isfinite(v) ? format_real(v) : std::string{}; }

/**
 * Merged CSV, one row per record in file order:
 *   run_id,update,train_error,f_hat,lm_hat,ess,grad_variance
 * Mixed schema versions across files raise InputFormatError.
 */
inline void export_curves(const std::vector<std::filesystem::path>& files, std::ostream& out) {
  std::optional<int> version;
  std::vector<std::vector<MetricsRecord>> all;
  for (const auto& f : files) {
    auto rows = read_metrics(f);
    for (const auto& r : rows) {
      if (version && *version != r.schema_version) {
        throw InputFormatError{"metrics files mix schema versions"};
      }
      version = r.schema_version;
    }
    all.push_back(std::move(rows));
  }
  out << "run_id,update,train_error,f_hat,lm_hat,ess,grad_variance\n";
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::string fallback = files[i].stem().string();
    if (fallback.rfind("metrics-", 0) == 0) {
      fallback = fallback.substr(8);
    }
    for (const auto& r : all[i]) {
      const auto& m = r.metrics;
      out << (r.run_id.empty() ? fallback : r.run_id) << ',' << m.update << ',' << csv_real(m.train_error) << ','
          << csv_real(m.f_hat) << ',' << csv_real(m.lm_hat) << ',' << csv_real(m.ess) << ','
          << csv_real(m.grad_variance) << '\n';
    }
  }
}

}  // namespace wsram

#endif  // WSRAM_TRAINING_METRICS_HPP
