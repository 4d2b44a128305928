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

// Experiment drivers behind the `lftc` command: single evaluations, repeated
// few-shot trials, head-to-head timing against the NCD baseline, and grid sweeps.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lftc/bundle.hpp"
#include "lftc/classifier.hpp"
#include "lftc/corpus.hpp"
#include "lftc/report.hpp"

namespace lftc {

enum class Command { eval, fewshot, sweep, compare };

struct RunSpec {
  Command command = Command::eval;
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  std::string label_column = "label";
  std::string text_column = "text";
  CsvOptions csv;
  std::string dataset;  // defaults to a name derived from train_path

  PipelineConfig pipeline;
  std::uint64_t seed = 0;
  std::size_t shots = 5;
  std::size_t trials = 10;

  std::optional<std::filesystem::path> out;       // JSON report(s)
  std::optional<std::filesystem::path> summary;   // CSV summary rows
  std::optional<std::filesystem::path> audit;     // JSON lines, one per prediction
  std::optional<std::filesystem::path> bundle;    // compressor-list cache

  // Sweep grid. An empty axis keeps the single value from `pipeline`.
  std::vector<std::size_t> sweep_step_sizes;
  std::vector<int> sweep_levels;
  std::vector<std::size_t> sweep_caps;

  void validate() const {
    if (train_path.empty()) throw ValidationError("--train is required");
    if (test_path.empty()) throw ValidationError("--test is required");
    pipeline.validate();
    if (command == Command::fewshot) {
      if (shots < 1) throw ValidationError("--shots must be >= 1");
      if (trials < 1) throw ValidationError("--trials must be >= 1");
    }
    if (command == Command::sweep && sweep_step_sizes.empty() && sweep_levels.empty() && sweep_caps.empty()) {
      throw ValidationError("sweep: empty grid (give --sweep-step-sizes, --sweep-levels or --sweep-caps)");
    }
    for (std::size_t s : sweep_step_sizes) {
      if (s < 1) throw ValidationError("sweep: step sizes must be >= 1");
    }
    for (int level : sweep_levels) {
      Backend b = pipeline.mcc_backend;
      b.level = level;
      b.validate();
    }
  }
};

/// Name used in reports: the explicit dataset name, else the train file's
/// directory when the file is called train.csv, else its stem.
inline std::string dataset_name(const RunSpec& spec) {
  if (!spec.dataset.empty()) return spec.dataset;
  const auto stem = spec.train_path.stem().string();
  if ((stem == "train" || stem == "training") && spec.train_path.has_parent_path()) {
    const auto parent = spec.train_path.parent_path().filename().string();
    if (!parent.empty()) return parent;
  }
  return stem;
}

struct LoadedSplit {
  Corpus train;
  Corpus test;
};

inline LoadedSplit load_split(const RunSpec& spec) {
  const auto label = parse_column(spec.label_column);
  const auto text = parse_column(spec.text_column);
  return {load_csv(spec.train_path, label, text, spec.csv), load_csv(spec.test_path, label, text, spec.csv)};
}

inline nlohmann::json audit_record(const Prediction& p) {
  nlohmann::json j = {{"sample_index", p.sample_index}, {"truth", p.truth},         {"predicted", p.predicted},
                      {"ncd_calls", p.ncd_calls},       {"tie", p.tie},             {"fallback", p.fallback}};
  if (p.candidate_pair) {
    nlohmann::json scores = nlohmann::json::object();
    for (const auto& s : p.candidate_pair->scores) scores[s.label] = s.score;
    j["candidate_pair"] = {{"first", p.candidate_pair->first}, {"second", p.candidate_pair->second}, {"scores", scores}};
  }
  nlohmann::json nearest = nlohmann::json::array();
  for (const auto& n : p.nearest) nearest.push_back({{"index", n.index}, {"label", n.label}, {"distance", n.distance}});
  j["nearest"] = std::move(nearest);
  if (!p.error.empty()) j["error"] = p.error;
  return j;
}

inline void write_audit(const std::filesystem::path& path, const std::vector<Prediction>& predictions) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write audit file '" + path.string() + "'");
  for (const auto& p : predictions) out << audit_record(p).dump() << '\n';
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
}

inline BundleHeader bundle_header(const Corpus& train, const PipelineConfig& config) {
  return {config.mcc_backend, config.plan,      config.dictionary_mode,
          config.separator,   config.variant == Variant::lftc_mcc, train.checksum()};
}

/// Builds the classifier, reusing or refreshing a bundle when one is configured.
inline Classifier make_classifier(const Corpus& train, const PipelineConfig& config,
                                  const std::optional<std::filesystem::path>& bundle_path) {
  if (!bundle_path || config.variant == Variant::baseline_ncd) return Classifier(train, config);
  const BundleHeader wanted = bundle_header(train, config);
  if (std::filesystem::exists(*bundle_path)) {
    try {
      Bundle b = load_bundle(*bundle_path);
      if (b.header == wanted) return Classifier(train, config, std::move(b.lists));
    } catch (const ValidationError&) {
      // Unreadable or stale bundles are rebuilt below.
    }
  }
  Classifier c(train, config);
  save_bundle(*bundle_path, Bundle{wanted, c.lists()});
  return c;
}

/// Evaluates one configuration on an already-loaded split.
inline std::pair<EvalReport, Evaluation> evaluate_split(const std::string& dataset, const Corpus& train,
                                                        const Corpus& test, const PipelineConfig& config,
                                                        std::uint64_t seed,
                                                        const std::optional<std::filesystem::path>& bundle = {}) {
  const auto t0 = detail::Clock::now();
  const Classifier classifier = make_classifier(train, config, bundle);
  const double build = detail::seconds_since(t0);
  Evaluation ev = evaluate(classifier, test, build);
  return {make_report(dataset, config, ev, seed), std::move(ev)};
}

inline void emit(const RunSpec& spec, const nlohmann::json& doc, const std::vector<EvalReport>& rows) {
  if (spec.out) write_text(*spec.out, doc.dump(2) + "\n");
  if (spec.summary) write_text(*spec.summary, summary_csv(rows));
}

inline EvalReport run_eval(const RunSpec& spec) {
  spec.validate();
  const auto split = load_split(spec);
  auto [report, ev] = evaluate_split(dataset_name(spec), split.train, split.test, spec.pipeline, spec.seed, spec.bundle);
  if (spec.audit) write_audit(*spec.audit, ev.predictions);
  emit(spec, nlohmann::json(report), {report});
  return report;
}

/// Repeated seeded few-shot draws of the training set, all evaluated on the full test set.
inline EvalReport run_fewshot(const RunSpec& spec) {
  spec.validate();
  const auto split = load_split(spec);
  const FewShotSpec fs{spec.shots, spec.seed, spec.trials};

  EvalReport combined;
  std::vector<Prediction> audit;
  std::map<std::string, double> per_class_sum;
  for (std::size_t t = 0; t < spec.trials; ++t) {
    const Corpus train = few_shot_sample(split.train, fs, t);
    auto [r, ev] = evaluate_split(dataset_name(spec), train, split.test, spec.pipeline, spec.seed);
    if (t == 0) combined = r;
    else {
      combined.timings.list_build_seconds += r.timings.list_build_seconds;
      combined.timings.mcc_seconds += r.timings.mcc_seconds;
      combined.timings.cr_seconds += r.timings.cr_seconds;
      combined.timings.total_seconds += r.timings.total_seconds;
      combined.samples += r.samples;
      combined.correct += r.correct;
      combined.errors += r.errors;
      combined.fallbacks += r.fallbacks;
      combined.ncd_calls += r.ncd_calls;
    }
    for (const auto& [label, acc] : r.per_class) per_class_sum[label] += acc;
    combined.trials.push_back(r.accuracy);
    if (spec.audit) audit.insert(audit.end(), ev.predictions.begin(), ev.predictions.end());
  }

  double mean = 0.0;
  for (double a : combined.trials) mean += a;
  combined.accuracy = mean / double(combined.trials.size());
  combined.per_class.clear();
  for (const auto& [label, sum] : per_class_sum) combined.per_class[label] = sum / double(spec.trials);
  combined.ci95 = ci95(combined.trials);
  combined.config = echo_config(spec.pipeline, spec.seed, spec.shots, spec.trials);
  for (double* t : {&combined.timings.list_build_seconds, &combined.timings.mcc_seconds, &combined.timings.cr_seconds,
                    &combined.timings.total_seconds}) {
    *t = round_ms(*t);
  }
  combined.train_checksum = split.train.checksum();

  if (spec.audit) write_audit(*spec.audit, audit);
  emit(spec, nlohmann::json(combined), {combined});
  return combined;
}

struct CompareResult {
  EvalReport lftc;
  EvalReport baseline;
  double speed_ratio = 0.0;  // baseline total_seconds / lftc total_seconds
};

/// lftc against baseline-ncd on the identical split with identical worker counts.
inline CompareResult run_compare(const RunSpec& spec) {
  spec.validate();
  const auto split = load_split(spec);
  PipelineConfig lftc_cfg = spec.pipeline;
  lftc_cfg.variant = Variant::lftc;
  PipelineConfig base_cfg = spec.pipeline;
  base_cfg.variant = Variant::baseline_ncd;

  CompareResult out;
  out.lftc = evaluate_split(dataset_name(spec), split.train, split.test, lftc_cfg, spec.seed, spec.bundle).first;
  out.baseline = evaluate_split(dataset_name(spec), split.train, split.test, base_cfg, spec.seed).first;
  if (out.lftc.train_checksum != out.baseline.train_checksum || out.lftc.test_checksum != out.baseline.test_checksum) {
    throw std::logic_error("compare: variants saw different splits");
  }
  const double lftc_t = std::max(out.lftc.timings.total_seconds, 1e-3);
  out.speed_ratio = out.baseline.timings.total_seconds / lftc_t;

  emit(spec,
       {{"lftc", out.lftc}, {"baseline", out.baseline}, {"speed_ratio", out.speed_ratio}},
       {out.lftc, out.baseline});
  return out;
}

/// One report per (step size, level, cap) grid point, run serially.
inline std::vector<EvalReport> run_sweep(const RunSpec& spec) {
  spec.validate();
  const auto split = load_split(spec);
  auto axis = [](auto values, auto fallback) {
    if (values.empty()) values.push_back(fallback);
    return values;
  };
  const auto steps = axis(spec.sweep_step_sizes, spec.pipeline.plan.step_size);
  const auto levels = axis(spec.sweep_levels, spec.pipeline.mcc_backend.level);
  const auto caps = axis(spec.sweep_caps, spec.pipeline.plan.max_compressors);

  std::vector<EvalReport> reports;
  for (std::size_t step : steps) {
    for (int level : levels) {
      for (std::size_t cap : caps) {
        PipelineConfig cfg = spec.pipeline;
        cfg.plan.step_size = step;
        cfg.plan.max_compressors = cap;
        cfg.mcc_backend.level = level;
        reports.push_back(evaluate_split(dataset_name(spec), split.train, split.test, cfg, spec.seed).first);
      }
    }
  }
  emit(spec, nlohmann::json(reports), reports);
  return reports;
}

}  // namespace lftc
