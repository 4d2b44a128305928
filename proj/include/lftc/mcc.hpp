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

// Multi-compressor classification.
//
// Every class's training texts are concatenated and cut into fixed-size
// segments; each segment becomes one dictionary compressor. A query is
// compressed under every class's compressors and the two classes whose
// compressors find it cheapest become the candidate pair.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "lftc/common.hpp"
#include "lftc/compression.hpp"
#include "lftc/corpus.hpp"
#include "lftc/parallel.hpp"

namespace lftc {

struct SegmentPlan {
  static constexpr std::size_t kUnlimited = 0;

  std::size_t step_size = 65536;
  std::size_t max_compressors = 16;  // kUnlimited for no cap

  void validate() const {
    if (step_size < 1) throw ValidationError("step size must be >= 1");
  }

  friend bool operator==(const SegmentPlan&, const SegmentPlan&) = default;
};

/// ceil(total_len / step_size).
inline std::size_t segment_count(std::size_t total_len, std::size_t step_size) {
  if (total_len < 1) throw ValidationError("segment_count: total length must be >= 1");
  if (step_size < 1) throw ValidationError("segment_count: step size must be >= 1");
  return (total_len - 1) / step_size + 1;
}

/// Which of `available` segments to keep under `cap`: all of them, or `cap`
/// indices spread evenly from the first segment across the full span.
inline std::vector<std::size_t> select_segments(std::size_t available, std::size_t cap) {
  std::vector<std::size_t> out;
  if (cap == SegmentPlan::kUnlimited || available <= cap) {
    out.resize(available);
    std::iota(out.begin(), out.end(), std::size_t(0));
    return out;
  }
  out.reserve(cap);
  for (std::size_t j = 0; j < cap; ++j) out.push_back(j * available / cap);
  return out;
}

/// How per-compressor sizes are combined into one class score.
enum class Aggregate {
  sum,   // plain total over the class's compressors
  mean,  // total divided by the number of compressors
};

inline std::string_view to_string(Aggregate a) { return a == Aggregate::sum ? "sum" : "mean"; }

inline Aggregate parse_aggregate(std::string_view name) {
  if (name == "sum") return Aggregate::sum;
  if (name == "mean") return Aggregate::mean;
  throw ValidationError("unknown score aggregate '" + std::string(name) + "' (expected sum or mean)");
}

struct ListOptions {
  DictionaryMode dictionary_mode = DictionaryMode::trained;
  Bytes separator = Bytes(kDefaultSeparator);
};

struct ClassCompressorList {
  ClassId label;
  std::vector<DictCompressor> compressors;
  std::size_t segment_count = 0;       // compressors kept, after the cap
  std::size_t available_segments = 0;  // ceil(total_length / step_size)
  std::size_t total_length = 0;        // bytes of concatenated class text
};

using ClassLists = std::map<ClassId, ClassCompressorList>;

/// Builds one class's compressor list from its concatenated text.
inline ClassCompressorList build_class_list(const Corpus& corpus, const ClassId& label, const SegmentPlan& plan,
                                            const Backend& backend, const ListOptions& options = {}) {
  plan.validate();
  backend.validate();
  if (!backend.dictionary_capable()) {
    throw ValidationError("build_class_list: backend '" + std::string(to_string(backend.kind)) +
                          "' cannot build dictionaries");
  }
  const Bytes text = concat_class_text(corpus, label, options.separator);

  ClassCompressorList list;
  list.label = label;
  list.total_length = text.size();
  list.available_segments = segment_count(text.size(), plan.step_size);
  for (std::size_t seg : select_segments(list.available_segments, plan.max_compressors)) {
    const std::size_t begin = seg * plan.step_size;
    const std::size_t end = std::min(text.size(), begin + plan.step_size);
    SourceSpan span{label, seg, begin, end, false};
    list.compressors.emplace_back(
        backend, train_dictionary(backend, ByteView(text).substr(begin, end - begin), span, options.dictionary_mode));
  }
  list.segment_count = list.compressors.size();
  return list;
}

/// Builds every class's list; classes are independent and run on `threads` workers.
inline ClassLists build_all_lists(const Corpus& corpus, const SegmentPlan& plan, const Backend& backend,
                                  const ListOptions& options = {}, std::size_t threads = 1) {
  const auto& classes = corpus.classes();
  std::vector<ClassCompressorList> built(classes.size());
  parallel_for(classes.size(), threads, [&](std::size_t i) {
    try {
      built[i] = build_class_list(corpus, classes[i], plan, backend, options);
    } catch (const ValidationError& e) {
      throw ValidationError("class '" + classes[i] + "': " + e.what());
    } catch (const std::exception& e) {
      throw BackendError("class '" + classes[i] + "': " + e.what());
    }
  });
  ClassLists lists;
  for (auto& l : built) {
    ClassId key = l.label;
    lists.emplace(std::move(key), std::move(l));
  }
  return lists;
}

struct ClassScore {
  ClassId label;
  std::uint64_t total = 0;      // sum of dict_compressed_size over the class's compressors
  std::size_t compressors = 0;  // how many sizes went into `total`
  double score = 0.0;           // ranking value under the configured aggregate

  friend bool operator==(const ClassScore&, const ClassScore&) = default;
};

/// Scores a query under every class's list. Output follows the lists' (sorted)
/// class order. Compressions run on `threads` workers; totals are exact integer sums.
inline std::vector<ClassScore> score_query(const ClassLists& lists, ByteView query, Aggregate aggregate = Aggregate::mean,
                                           std::size_t threads = 1) {
  if (lists.empty()) throw ValidationError("score_query: no compressor lists");
  if (query.empty()) throw ValidationError("score_query: empty query");

  struct Job {
    const DictCompressor* comp;
    std::size_t class_slot;
  };
  std::vector<Job> jobs;
  std::vector<ClassScore> scores;
  scores.reserve(lists.size());
  for (const auto& [label, list] : lists) {
    for (const auto& c : list.compressors) jobs.push_back({&c, scores.size()});
    scores.push_back({label, 0, list.compressors.size(), 0.0});
  }

  std::vector<std::size_t> sizes(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) { sizes[i] = jobs[i].comp->compressed_size(query); });
  for (std::size_t i = 0; i < jobs.size(); ++i) scores[jobs[i].class_slot].total += sizes[i];

  for (auto& s : scores) {
    if (s.compressors == 0) throw ValidationError("score_query: class '" + s.label + "' has no compressors");
    s.score = aggregate == Aggregate::sum ? double(s.total) : double(s.total) / double(s.compressors);
  }
  return scores;
}

/// Thrown when fewer than two classes are available to form a candidate pair.
class DegenerateCorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CandidatePair {
  ClassId first;                  // lowest score
  ClassId second;                 // second lowest
  std::vector<ClassScore> scores;  // every class, for auditing and the argmin-only ablation

  friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
};

/// Ranks by (score, label) and returns the two best classes.
inline CandidatePair select_candidates(std::vector<ClassScore> scores) {
  if (scores.size() < 2) {
    throw DegenerateCorpusError("select_candidates: need at least 2 scored classes, got " +
                                std::to_string(scores.size()));
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a].score != scores[b].score) return scores[a].score < scores[b].score;
    return scores[a].label < scores[b].label;
  });
  CandidatePair pair;
  pair.first = scores[order[0]].label;
  pair.second = scores[order[1]].label;
  pair.scores = std::move(scores);
  return pair;
}

}  // namespace lftc
