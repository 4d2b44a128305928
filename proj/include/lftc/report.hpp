// Copyright 2026 The lftc Authors
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

// Evaluation reports and their JSON / CSV forms. See docs/report-schema.md.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lftc/classifier.hpp"
#include "lftc/csv.hpp"

namespace lftc {

inline constexpr int kReportSchemaVersion = 1;

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;

  friend bool operator==(const ConfidenceInterval&, const ConfidenceInterval&) = default;
};

/// Normal-approximation 95% interval: mean ± 1.96 · s / sqrt(n), with s the
/// sample standard deviation. Needs at least two values.
inline std::optional<ConfidenceInterval> ci95(const std::vector<double>& values) {
  if (values.size() < 2) return std::nullopt;
  // Shifted by the first value so identical inputs give exactly zero width.
  const double n = double(values.size());
  const double shift = values.front();
  double sum = 0.0, sum_sq = 0.0;
  for (double v : values) {
    sum += v - shift;
    sum_sq += (v - shift) * (v - shift);
  }
  const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
  return ConfidenceInterval{shift + sum / n, 1.96 * std::sqrt(var) / std::sqrt(n)};
}

struct ReportConfig {
  std::size_t step_size = 0;
  std::size_t max_compressors = 0;
  std::string mcc_backend;
  int mcc_level = 0;
  bool adaptive_level = false;
  std::string dictionary_mode;
  std::string aggregate;
  std::string ncd_backend;
  int ncd_level = 0;
  std::size_t k = 1;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  std::size_t shots = 0;  // 0 = full training set
  std::size_t trials = 1;

  friend bool operator==(const ReportConfig&, const ReportConfig&) = default;
};

inline ReportConfig echo_config(const PipelineConfig& c, std::uint64_t seed = 0, std::size_t shots = 0,
                                std::size_t trials = 1) {
  ReportConfig r;
  r.step_size = c.plan.step_size;
  r.max_compressors = c.plan.max_compressors;
  r.mcc_backend = std::string(to_string(c.mcc_backend.kind));
  r.mcc_level = c.mcc_backend.level;
  r.adaptive_level = c.mcc_backend.adaptive_level;
  r.dictionary_mode = std::string(to_string(c.dictionary_mode));
  r.aggregate = std::string(to_string(c.aggregate));
  r.ncd_backend = std::string(to_string(c.knn.backend.kind));
  r.ncd_level = c.knn.backend.level;
  r.k = c.knn.k;
  r.threads = c.threads;
  r.seed = seed;
  r.shots = shots;
  r.trials = trials;
  return r;
}

struct ReportTimings {
  double list_build_seconds = 0.0;
  double mcc_seconds = 0.0;
  double cr_seconds = 0.0;
  double total_seconds = 0.0;

  friend bool operator==(const ReportTimings&, const ReportTimings&) = default;
};

struct EvalReport {
  int schema_version = kReportSchemaVersion;
  std::string dataset;
  std::string variant;
  ReportConfig config;
  double accuracy = 0.0;
  std::map<std::string, double> per_class;
  ReportTimings timings;
  std::vector<double> trials;  // per-trial accuracies (few-shot runs)
  std::optional<ConfidenceInterval> ci95;
  std::size_t samples = 0;
  std::size_t correct = 0;
  std::size_t errors = 0;
  std::size_t fallbacks = 0;
  std::size_t ncd_calls = 0;
  std::uint64_t train_checksum = 0;
  std::uint64_t test_checksum = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Millisecond resolution, matching what the timers can meaningfully resolve.
inline double round_ms(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

inline EvalReport make_report(const std::string& dataset, const PipelineConfig& config, const Evaluation& ev,
                              std::uint64_t seed = 0) {
  EvalReport r;
  r.dataset = dataset;
  r.variant = std::string(to_string(config.variant));
  r.config = echo_config(config, seed);
  r.accuracy = ev.accuracy;
  r.per_class = {ev.per_class.begin(), ev.per_class.end()};
  r.timings = {round_ms(ev.timings.list_build_seconds), round_ms(ev.timings.mcc_seconds),
               round_ms(ev.timings.cr_seconds), round_ms(ev.timings.total_seconds)};
  r.samples = ev.predictions.size();
  r.correct = ev.correct;
  r.errors = ev.errors;
  r.fallbacks = ev.fallbacks;
  r.ncd_calls = ev.ncd_calls;
  r.train_checksum = ev.train_checksum;
  r.test_checksum = ev.test_checksum;
  return r;
}

inline void to_json(nlohmann::json& j, const ReportConfig& c) {
  j = {{"step_size", c.step_size},   {"max_compressors", c.max_compressors}, {"mcc_backend", c.mcc_backend},
       {"mcc_level", c.mcc_level},   {"adaptive_level", c.adaptive_level},   {"dictionary_mode", c.dictionary_mode},
       {"aggregate", c.aggregate},   {"ncd_backend", c.ncd_backend},         {"ncd_level", c.ncd_level},
       {"k", c.k},                   {"threads", c.threads},                 {"seed", c.seed},
       {"shots", c.shots},           {"trials", c.trials}};
}

inline void from_json(const nlohmann::json& j, ReportConfig& c) {
  j.at("step_size").get_to(c.step_size);
  j.at("max_compressors").get_to(c.max_compressors);
  j.at("mcc_backend").get_to(c.mcc_backend);
  j.at("mcc_level").get_to(c.mcc_level);
  j.at("adaptive_level").get_to(c.adaptive_level);
  j.at("dictionary_mode").get_to(c.dictionary_mode);
  j.at("aggregate").get_to(c.aggregate);
  j.at("ncd_backend").get_to(c.ncd_backend);
  j.at("ncd_level").get_to(c.ncd_level);
  j.at("k").get_to(c.k);
  j.at("threads").get_to(c.threads);
  j.at("seed").get_to(c.seed);
  j.at("shots").get_to(c.shots);
  j.at("trials").get_to(c.trials);
}

inline void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{
      {"schema_version", r.schema_version},
      {"dataset", r.dataset},
      {"variant", r.variant},
      {"config", r.config},
      {"accuracy", r.accuracy},
      {"per_class", r.per_class},
      {"timings",
       {{"list_build_seconds", r.timings.list_build_seconds},
        {"mcc_seconds", r.timings.mcc_seconds},
        {"cr_seconds", r.timings.cr_seconds},
        {"total_seconds", r.timings.total_seconds}}},
      {"counts",
       {{"samples", r.samples},
        {"correct", r.correct},
        {"errors", r.errors},
        {"fallbacks", r.fallbacks},
        {"ncd_calls", r.ncd_calls}}},
      {"split", {{"train_checksum", r.train_checksum}, {"test_checksum", r.test_checksum}}},
  };
  if (!r.trials.empty()) j["trials"] = r.trials;
  if (r.ci95) j["ci95"] = {{"mean", r.ci95->mean}, {"half_width", r.ci95->half_width}};
}

inline void from_json(const nlohmann::json& j, EvalReport& r) {
  j.at("schema_version").get_to(r.schema_version);
  if (r.schema_version != kReportSchemaVersion) {
    throw ValidationError("report: unsupported schema version " + std::to_string(r.schema_version));
  }
  j.at("dataset").get_to(r.dataset);
  j.at("variant").get_to(r.variant);
  j.at("config").get_to(r.config);
  j.at("accuracy").get_to(r.accuracy);
  j.at("per_class").get_to(r.per_class);
  const auto& t = j.at("timings");
  t.at("list_build_seconds").get_to(r.timings.list_build_seconds);
  t.at("mcc_seconds").get_to(r.timings.mcc_seconds);
  t.at("cr_seconds").get_to(r.timings.cr_seconds);
  t.at("total_seconds").get_to(r.timings.total_seconds);
  const auto& c = j.at("counts");
  c.at("samples").get_to(r.samples);
  c.at("correct").get_to(r.correct);
  c.at("errors").get_to(r.errors);
  c.at("fallbacks").get_to(r.fallbacks);
  c.at("ncd_calls").get_to(r.ncd_calls);
  const auto& s = j.at("split");
  s.at("train_checksum").get_to(r.train_checksum);
  s.at("test_checksum").get_to(r.test_checksum);
  r.trials.clear();
  if (j.contains("trials")) j.at("trials").get_to(r.trials);
  r.ci95.reset();
  if (j.contains("ci95")) r.ci95 = ConfidenceInterval{j["ci95"].at("mean").get<double>(), j["ci95"].at("half_width").get<double>()};
}

inline std::string report_to_string(const EvalReport& r, int indent = 2) { return nlohmann::json(r).dump(indent); }

inline EvalReport report_from_string(const std::string& text) {
  try {
    return nlohmann::json::parse(text).get<EvalReport>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report: ") + e.what());
  }
}

inline std::vector<std::string> summary_header() {
  return {"dataset", "variant",  "step_size", "max_compressors", "mcc_level", "k",  "threads", "shots",
          "trials",  "accuracy", "ci95_half_width", "list_build_seconds", "mcc_seconds", "cr_seconds", "total_seconds"};
}

inline std::vector<std::string> summary_row(const EvalReport& r) {
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  };
  return {r.dataset,
          r.variant,
          std::to_string(r.config.step_size),
          std::to_string(r.config.max_compressors),
          std::to_string(r.config.mcc_level),
          std::to_string(r.config.k),
          std::to_string(r.config.threads),
          std::to_string(r.config.shots),
          std::to_string(r.config.trials),
          num(r.accuracy),
          r.ci95 ? num(r.ci95->half_width) : std::string(),
          num(r.timings.list_build_seconds),
          num(r.timings.mcc_seconds),
          num(r.timings.cr_seconds),
          num(r.timings.total_seconds)};
}

/// CSV with one header line and one row per report.
inline std::string summary_csv(const std::vector<EvalReport>& reports) {
  std::string out = csv::format_row(summary_header());
  for (const auto& r : reports) out += csv::format_row(summary_row(r));
  return out;
}

}  // namespace lftc
