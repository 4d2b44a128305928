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

// Centralized reasoning: NCD k-nearest-neighbours restricted to the training
// samples of the two candidate classes ("gold" samples).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "lftc/common.hpp"
#include "lftc/compression.hpp"
#include "lftc/corpus.hpp"
#include "lftc/mcc.hpp"
#include "lftc/parallel.hpp"

namespace lftc {

struct KnnConfig {
  std::size_t k = 1;
  Backend backend = Backend::deflate(6);

  void validate() const {
    if (k < 1) throw ValidationError("k must be >= 1");
    backend.validate();
  }

  friend bool operator==(const KnnConfig&, const KnnConfig&) = default;
};

/// Training texts with their compressed sizes computed once up front, so a
/// query costs one compression of (query ∥ sample) per neighbour.
class NcdReference {
 public:
  NcdReference(std::shared_ptr<const Corpus> corpus, Backend backend, std::size_t threads = 1)
      : corpus_(std::move(corpus)), backend_(backend), sizes_(corpus_->size()) {
    backend_.validate();
    parallel_for(corpus_->size(), threads,
                 [&](std::size_t i) { sizes_[i] = compressed_size(backend_, (*corpus_)[i].text); });
  }

  const Corpus& corpus() const noexcept { return *corpus_; }
  const Backend& backend() const noexcept { return backend_; }
  std::size_t size_of(std::size_t corpus_index) const { return sizes_.at(corpus_index); }

 private:
  std::shared_ptr<const Corpus> corpus_;
  Backend backend_;
  std::vector<std::size_t> sizes_;
};

/// Training samples labelled with either candidate class, in corpus order.
/// Nothing is removed: p and q are class labels, not individual texts.
struct GoldData {
  std::vector<std::size_t> corpus_indices;
  CandidatePair source;

  std::size_t size() const noexcept { return corpus_indices.size(); }
};

class EmptyGoldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline GoldData extract_gold(const Corpus& corpus, const CandidatePair& pair) {
  GoldData gold;
  gold.source = pair;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& label = corpus[i].label;
    if (label == pair.first || label == pair.second) gold.corpus_indices.push_back(i);
  }
  if (gold.corpus_indices.empty()) {
    throw EmptyGoldError("no training samples labelled '" + pair.first + "' or '" + pair.second + "'");
  }
  return gold;
}

struct NcdNeighbor {
  double distance = 0.0;
  ClassId label;
  std::size_t index = 0;  // position in the gold (or reference) sample list

  friend bool operator==(const NcdNeighbor&, const NcdNeighbor&) = default;
};

/// NCD from `query` to the reference samples at `corpus_indices`, one neighbour each.
inline std::vector<NcdNeighbor> ncd_neighbors(ByteView query, const NcdReference& reference,
                                              const std::vector<std::size_t>& corpus_indices, std::size_t threads = 1) {
  if (query.empty()) throw ValidationError("ncd_distances: empty query");
  if (corpus_indices.empty()) throw ValidationError("ncd_distances: no reference samples");
  const auto& backend = reference.backend();
  const std::size_t cq = compressed_size(backend, query);

  std::vector<NcdNeighbor> out(corpus_indices.size());
  parallel_for(corpus_indices.size(), threads, [&](std::size_t g) {
    const std::size_t ci = corpus_indices[g];
    const auto& sample = reference.corpus()[ci];
    thread_local Bytes joined;
    joined.assign(query).append(sample.text);
    double d;
    try {
      d = ncd_from_sizes(cq, reference.size_of(ci), compressed_size(backend, joined));
    } catch (const std::exception& e) {
      throw BackendError("ncd: sample " + std::to_string(g) + ": " + e.what());
    }
    out[g] = {d, sample.label, g};
  });
  return out;
}

inline std::vector<NcdNeighbor> ncd_distances(ByteView query, const GoldData& gold, const NcdReference& reference,
                                              std::size_t threads = 1) {
  return ncd_neighbors(query, reference, gold.corpus_indices, threads);
}

/// Uncached form: compresses every gold text as well.
inline std::vector<NcdNeighbor> ncd_distances(ByteView query, const Corpus& corpus, const GoldData& gold,
                                              const KnnConfig& config) {
  std::vector<NcdNeighbor> out;
  out.reserve(gold.size());
  for (std::size_t g = 0; g < gold.size(); ++g) {
    const auto& sample = corpus[gold.corpus_indices[g]];
    out.push_back({ncd(config.backend, query, sample.text), sample.label, g});
  }
  return out;
}

struct KnnDecision {
  ClassId label;
  bool tie = false;                 // several labels shared the top vote count
  std::vector<NcdNeighbor> nearest;  // the k nearest, closest first
};

/// Majority vote among the k nearest by (distance, index). When labels tie on
/// vote count, the single closest neighbour decides.
inline KnnDecision knn_vote(std::vector<NcdNeighbor> neighbors, std::size_t k) {
  if (neighbors.empty()) throw ValidationError("knn_decide: no neighbours");
  if (k < 1) throw ValidationError("knn_decide: k must be >= 1");
  const std::size_t take = std::min(k, neighbors.size());
  auto by_rank = [](const NcdNeighbor& a, const NcdNeighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  };
  std::partial_sort(neighbors.begin(), neighbors.begin() + std::ptrdiff_t(take), neighbors.end(), by_rank);
  neighbors.resize(take);

  std::map<ClassId, std::size_t> votes;
  for (const auto& n : neighbors) ++votes[n.label];
  std::size_t best = 0;
  std::size_t leaders = 0;
  ClassId winner;
  for (const auto& [label, count] : votes) {
    if (count > best) {
      best = count;
      leaders = 1;
      winner = label;
    } else if (count == best) {
      ++leaders;
    }
  }

  KnnDecision d;
  d.tie = leaders > 1;
  d.label = d.tie ? neighbors.front().label : winner;
  d.nearest = std::move(neighbors);
  return d;
}

inline ClassId knn_decide(const std::vector<NcdNeighbor>& neighbors, const KnnConfig& config) {
  return knn_vote(neighbors, config.k).label;
}

struct CrResult {
  ClassId label;
  bool fallback = false;  // no gold samples; label is the pair's first class
  bool tie = false;
  std::size_t ncd_calls = 0;
  std::vector<NcdNeighbor> nearest;
};

inline CrResult centralized_reason(const NcdReference& reference, const CandidatePair& pair, ByteView query,
                                   const KnnConfig& config, std::size_t threads = 1) {
  CrResult result;
  GoldData gold;
  try {
    gold = extract_gold(reference.corpus(), pair);
  } catch (const EmptyGoldError&) {
    result.label = pair.first;
    result.fallback = true;
    return result;
  }
  auto neighbors = ncd_distances(query, gold, reference, threads);
  result.ncd_calls = neighbors.size();
  auto decision = knn_vote(std::move(neighbors), config.k);
  result.label = std::move(decision.label);
  result.tie = decision.tie;
  result.nearest = std::move(decision.nearest);
  return result;
}

/// Diagnostic: one NCD between the query and all gold texts concatenated.
inline double gold_concat_ncd(ByteView query, const GoldData& gold, const NcdReference& reference) {
  Bytes all;
  for (std::size_t ci : gold.corpus_indices) all.append(reference.corpus()[ci].text);
  return ncd(reference.backend(), query, all);
}

}  // namespace lftc
