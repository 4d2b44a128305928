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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lftc/corpus.hpp"
#include "lftc/random.hpp"

namespace lftc::synthetic {

// Seeded text generator where every class draws "motif" words from its own
// letter alphabet, mixed with filler words shared by all classes.
struct MotifSpec {
  std::size_t classes = 3;
  std::size_t motifs_per_class = 24;
  std::size_t shared_words = 48;
  double motif_rate = 0.5;  // probability that a word is a class motif
  std::size_t min_words = 30;
  std::size_t max_words = 60;
};

inline ClassId class_name(std::size_t index) {
  static constexpr std::array<const char*, 8> kNames = {"alpha", "beta",  "gamma", "delta",
                                                        "epsilon", "zeta", "eta",   "theta"};
  return index < kNames.size() ? ClassId(kNames[index]) : "class" + std::to_string(index);
}

class MotifGenerator {
 public:
  MotifGenerator(std::uint64_t seed, MotifSpec spec = {}) : seed_(seed), spec_(spec) {
    if (spec_.classes < 1 || spec_.classes > 26) throw ValidationError("synthetic: classes must be in [1, 26]");
    if (spec_.min_words < 1 || spec_.max_words < spec_.min_words) throw ValidationError("synthetic: bad word range");

    auto rng = StableRng::derive(seed_, {0x766f636162ULL});
    // Split a..z into one contiguous letter block per class.
    const std::size_t block = 26 / spec_.classes;
    for (std::size_t c = 0; c < spec_.classes; ++c) {
      const char first = char('a' + c * block);
      const std::size_t width = block < 3 ? 3 : block;
      std::vector<std::string> words;
      for (std::size_t w = 0; w < spec_.motifs_per_class; ++w) {
        words.push_back(make_word(rng, first, width, 3, 7));
      }
      motifs_.push_back(std::move(words));
    }
    for (std::size_t w = 0; w < spec_.shared_words; ++w) shared_.push_back(make_word(rng, 'a', 26, 2, 6));
  }

  const MotifSpec& spec() const noexcept { return spec_; }

  /// One document of class `cls`; `stream` and `index` select an independent draw.
  LabeledText document(std::size_t cls, std::uint64_t stream, std::uint64_t index) const {
    auto rng = StableRng::derive(seed_, {stream, cls, index});
    const std::size_t words = rng.between(spec_.min_words, spec_.max_words);
    std::string text;
    for (std::size_t i = 0; i < words; ++i) {
      if (i) text.push_back(' ');
      const bool motif = spec_.shared_words == 0 || rng.unit() < spec_.motif_rate;
      const auto& pool = motif ? motifs_[cls] : shared_;
      text += pool[rng.below(pool.size())];
    }
    return {class_name(cls), std::move(text)};
  }

  /// `per_class` documents for every class, grouped by class.
  Corpus training_corpus(std::size_t per_class, std::uint64_t stream = 0) const {
    std::vector<LabeledText> samples;
    for (std::size_t c = 0; c < spec_.classes; ++c) {
      for (std::size_t i = 0; i < per_class; ++i) samples.push_back(document(c, stream, i));
    }
    return Corpus("synthetic-train", std::move(samples));
  }

  /// `count` queries cycling through the classes.
  Corpus query_corpus(std::size_t count, std::uint64_t stream = 1) const {
    std::vector<LabeledText> samples;
    for (std::size_t q = 0; q < count; ++q) samples.push_back(document(q % spec_.classes, stream, q));
    return Corpus("synthetic-test", std::move(samples));
  }

 private:
  static std::string make_word(StableRng& rng, char first, std::size_t width, std::size_t min_len,
                               std::size_t max_len) {
    std::string w;
    const std::size_t len = rng.between(min_len, max_len);
    for (std::size_t i = 0; i < len; ++i) w.push_back(char(first + rng.below(width)));
    return w;
  }

  std::uint64_t seed_;
  MotifSpec spec_;
  std::vector<std::vector<std::string>> motifs_;
  std::vector<std::string> shared_;
};

}  // namespace lftc::synthetic
