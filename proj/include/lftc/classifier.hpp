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

// End-to-end pipelines.
//
//   lftc          compressor lists shortlist two classes, NCD-KNN over their samples decides
//   lftc-mcc      as lftc, but each class has one dictionary built from its whole text
//   lftc-cr       compressor lists only; the lowest-scoring class is the answer
//   baseline-ncd  NCD-KNN over every training sample, no shortlist

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lftc/common.hpp"
#include "lftc/compression.hpp"
#include "lftc/corpus.hpp"
#include "lftc/cr.hpp"
#include "lftc/mcc.hpp"
#include "lftc/parallel.hpp"

namespace lftc {

enum class Variant { lftc, lftc_mcc, lftc_cr, baseline_ncd };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::lftc: return "lftc";
    case Variant::lftc_mcc: return "lftc-mcc";
    case Variant::lftc_cr: return "lftc-cr";
    case Variant::baseline_ncd: return "baseline-ncd";
  }
  return "unknown";
}

inline Variant parse_variant(std::string_view name) {
  if (name == "lftc") return Variant::lftc;
  if (name == "lftc-mcc") return Variant::lftc_mcc;
  if (name == "lftc-cr") return Variant::lftc_cr;
  if (name == "baseline-ncd" || name == "gzip") return Variant::baseline_ncd;
  throw ValidationError("unknown variant '" + std::string(name) + "' (expected lftc, lftc-mcc, lftc-cr or baseline-ncd)");
}

/// Bytes of class text a whole-class dictionary is built from (lftc-mcc).
inline constexpr std::size_t kWholeClassDictionaryInput = 2 * 1024 * 1024;

struct PipelineConfig {
  Variant variant = Variant::lftc;
  SegmentPlan plan;
  KnnConfig knn;
  Backend mcc_backend = Backend::zstd(3);
  DictionaryMode dictionary_mode = DictionaryMode::trained;
  Aggregate aggregate = Aggregate::mean;
  Bytes separator = Bytes(kDefaultSeparator);
  std::size_t threads = 1;

  void validate() const {
    if (threads < 1) throw ValidationError("threads must be >= 1");
    plan.validate();
    knn.validate();
    mcc_backend.validate();
    if (variant != Variant::baseline_ncd && !mcc_backend.dictionary_capable()) {
      throw ValidationError("variant '" + std::string(to_string(variant)) + "' needs a dictionary-capable backend, got '" +
                            std::string(to_string(mcc_backend.kind)) + "'");
    }
  }
};

struct Prediction {
  std::size_t sample_index = 0;
  ClassId predicted;
  ClassId truth;
  std::optional<CandidatePair> candidate_pair;
  std::vector<NcdNeighbor> nearest;  // the k nearest, for audit output
  std::size_t ncd_calls = 0;
  bool fallback = false;  // single-class training data or empty gold set
  bool tie = false;       // vote tie resolved by the closest neighbour
  std::string error;      // non-empty when prediction failed; counted as incorrect
  double elapsed_seconds = 0.0;
  double mcc_seconds = 0.0;
  double cr_seconds = 0.0;

  bool correct() const { return error.empty() && predicted == truth; }
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace detail

/// A trained pipeline: compressor lists and cached reference sizes are built
/// once at construction and shared read-only by every prediction.
class Classifier {
 public:
  Classifier(const Corpus& train, PipelineConfig config) : Classifier(train, std::move(config), std::nullopt) {}

  /// Reuses prebuilt lists (for example from a bundle) instead of training them.
  Classifier(const Corpus& train, PipelineConfig config, std::optional<ClassLists> prebuilt)
      : config_(std::move(config)), train_(std::make_shared<const Corpus>(train)) {
    config_.validate();
    const auto t0 = detail::Clock::now();
    const ListOptions options{config_.dictionary_mode, config_.separator};

    if (prebuilt) {
      if (config_.variant == Variant::baseline_ncd) {
        throw ValidationError("baseline-ncd does not use compressor lists");
      }
      for (const auto& label : train_->classes()) {
        if (!prebuilt->contains(label)) throw ValidationError("prebuilt lists lack class '" + label + "'");
      }
      lists_ = std::move(*prebuilt);
    } else {
      switch (config_.variant) {
        case Variant::lftc:
        case Variant::lftc_cr:
          lists_ = build_all_lists(*train_, config_.plan, config_.mcc_backend, options, config_.threads);
          break;
        case Variant::lftc_mcc:
          lists_ = build_whole_class_lists(options);
          break;
        case Variant::baseline_ncd:
          break;
      }
    }
    if (config_.variant != Variant::lftc_cr) {
      reference_.emplace(train_, config_.knn.backend, config_.threads);
    }
    build_seconds_ = detail::seconds_since(t0);
  }

  const PipelineConfig& config() const noexcept { return config_; }
  const Corpus& train() const noexcept { return *train_; }
  const ClassLists& lists() const noexcept { return lists_; }
  double build_seconds() const noexcept { return build_seconds_; }

  /// Classifies one text. Never throws for per-sample failures; they are
  /// recorded in Prediction::error.
  Prediction predict(ByteView text, std::size_t sample_index = 0, ClassId truth = {}) const {
    Prediction p;
    p.sample_index = sample_index;
    p.truth = std::move(truth);
    const auto t0 = detail::Clock::now();
    try {
      if (text.empty()) throw ValidationError("empty query text");
      if (config_.variant == Variant::baseline_ncd) {
        predict_baseline(text, p);
      } else {
        predict_with_lists(text, p);
      }
    } catch (const std::exception& e) {
      p.error = e.what();
      p.predicted.clear();
    }
    p.elapsed_seconds = detail::seconds_since(t0);
    return p;
  }

 private:
  ClassLists build_whole_class_lists(const ListOptions& options) const {
    const auto& classes = train_->classes();
    std::vector<ClassCompressorList> built(classes.size());
    parallel_for(classes.size(), config_.threads, [&](std::size_t i) {
      Bytes text = concat_class_text(*train_, classes[i], options.separator);
      ClassCompressorList list;
      list.label = classes[i];
      list.total_length = text.size();
      list.available_segments = 1;
      list.segment_count = 1;
      const std::size_t used = std::min(text.size(), kWholeClassDictionaryInput);
      SourceSpan span{classes[i], 0, 0, used, false};
      list.compressors.emplace_back(config_.mcc_backend,
                                    train_dictionary(config_.mcc_backend, ByteView(text).substr(0, used), span,
                                                     options.dictionary_mode));
      built[i] = std::move(list);
    });
    ClassLists lists;
    for (auto& l : built) {
      ClassId key = l.label;
      lists.emplace(std::move(key), std::move(l));
    }
    return lists;
  }

  void predict_with_lists(ByteView text, Prediction& p) const {
    const auto t_mcc = detail::Clock::now();
    auto scores = score_query(lists_, text, config_.aggregate);
    if (scores.size() < 2) {
      // Single-class training data: nothing to choose between.
      p.predicted = scores.front().label;
      p.fallback = true;
      p.mcc_seconds = detail::seconds_since(t_mcc);
      return;
    }
    CandidatePair pair = select_candidates(std::move(scores));
    p.mcc_seconds = detail::seconds_since(t_mcc);

    if (config_.variant == Variant::lftc_cr) {
      p.predicted = pair.first;
      p.candidate_pair = std::move(pair);
      return;
    }

    const auto t_cr = detail::Clock::now();
    CrResult cr = centralized_reason(*reference_, pair, text, config_.knn);
    p.cr_seconds = detail::seconds_since(t_cr);
    p.predicted = std::move(cr.label);
    p.fallback = cr.fallback;
    p.tie = cr.tie;
    p.ncd_calls = cr.ncd_calls;
    p.nearest = std::move(cr.nearest);
    p.candidate_pair = std::move(pair);
  }

  void predict_baseline(ByteView text, Prediction& p) const {
    const auto t_cr = detail::Clock::now();
    std::vector<std::size_t> all(train_->size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    auto neighbors = ncd_neighbors(text, *reference_, all);
    p.ncd_calls = neighbors.size();
    auto decision = knn_vote(std::move(neighbors), config_.knn.k);
    p.predicted = std::move(decision.label);
    p.tie = decision.tie;
    p.nearest = std::move(decision.nearest);
    p.cr_seconds = detail::seconds_since(t_cr);
  }

  PipelineConfig config_;
  std::shared_ptr<const Corpus> train_;
  ClassLists lists_;
  std::optional<NcdReference> reference_;
  double build_seconds_ = 0.0;
};

namespace detail {

inline Prediction predict_as(const Corpus& train, ByteView text, PipelineConfig config, Variant v) {
  config.variant = v;
  config.threads = 1;
  return Classifier(train, std::move(config)).predict(text);
}

}  // namespace detail

// One-shot helpers. Each builds a fresh Classifier; reuse a Classifier to
// amortise list construction over many queries.
inline Prediction predict_lftc(const Corpus& train, ByteView text, const PipelineConfig& config) {
  return detail::predict_as(train, text, config, Variant::lftc);
}
inline Prediction predict_ablation_mcc(const Corpus& train, ByteView text, const PipelineConfig& config) {
  return detail::predict_as(train, text, config, Variant::lftc_mcc);
}
inline Prediction predict_ablation_cr(const Corpus& train, ByteView text, const PipelineConfig& config) {
  return detail::predict_as(train, text, config, Variant::lftc_cr);
}
inline Prediction predict_baseline_ncd(const Corpus& train, ByteView text, const PipelineConfig& config) {
  return detail::predict_as(train, text, config, Variant::baseline_ncd);
}

struct StageTimings {
  double list_build_seconds = 0.0;  // compressor lists and reference sizes
  double mcc_seconds = 0.0;         // summed over samples
  double cr_seconds = 0.0;          // summed over samples
  double total_seconds = 0.0;       // wall clock, build included
};

struct Evaluation {
  std::vector<Prediction> predictions;  // sorted by sample_index
  std::size_t correct = 0;
  std::size_t errors = 0;
  std::size_t fallbacks = 0;
  std::size_t ncd_calls = 0;
  double accuracy = 0.0;
  std::map<ClassId, double> per_class;  // accuracy over test samples of each true class
  StageTimings timings;
  std::uint64_t train_checksum = 0;
  std::uint64_t test_checksum = 0;
};

/// Tallies accuracy and per-class accuracy from prediction records.
inline void tally(Evaluation& ev) {
  std::map<ClassId, std::pair<std::size_t, std::size_t>> per;  // correct, total
  ev.correct = ev.errors = ev.fallbacks = ev.ncd_calls = 0;
  for (const auto& p : ev.predictions) {
    auto& slot = per[p.truth];
    ++slot.second;
    if (p.correct()) {
      ++ev.correct;
      ++slot.first;
    }
    if (!p.error.empty()) ++ev.errors;
    if (p.fallback) ++ev.fallbacks;
    ev.ncd_calls += p.ncd_calls;
  }
  ev.accuracy = ev.predictions.empty() ? 0.0 : double(ev.correct) / double(ev.predictions.size());
  ev.per_class.clear();
  for (const auto& [label, ct] : per) ev.per_class[label] = double(ct.first) / double(ct.second);
}

/// Classifies every test sample with `config.threads` workers.
inline Evaluation evaluate(const Classifier& classifier, const Corpus& test, double build_seconds = -1.0) {
  bool overlap = false;
  for (const auto& label : test.classes()) overlap = overlap || classifier.train().has_class(label);
  if (!overlap) throw ValidationError("evaluate: test labels share nothing with training labels");

  const auto t0 = detail::Clock::now();
  Evaluation ev;
  ev.predictions.resize(test.size());
  parallel_for(test.size(), classifier.config().threads, [&](std::size_t i) {
    ev.predictions[i] = classifier.predict(test[i].text, i, test[i].label);
  });
  tally(ev);
  for (const auto& p : ev.predictions) {
    ev.timings.mcc_seconds += p.mcc_seconds;
    ev.timings.cr_seconds += p.cr_seconds;
  }
  ev.timings.list_build_seconds = build_seconds >= 0.0 ? build_seconds : classifier.build_seconds();
  ev.timings.total_seconds = ev.timings.list_build_seconds + detail::seconds_since(t0);
  ev.train_checksum = classifier.train().checksum();
  ev.test_checksum = test.checksum();
  return ev;
}

inline Evaluation evaluate(const Corpus& train, const Corpus& test, const PipelineConfig& config) {
  const Classifier classifier(train, config);
  return evaluate(classifier, test);
}

}  // namespace lftc
