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

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lftc/common.hpp"
#include "lftc/csv.hpp"
#include "lftc/random.hpp"

namespace lftc {

struct LabeledText {
  ClassId label;
  Bytes text;

  friend bool operator==(const LabeledText&, const LabeledText&) = default;
};

/// An immutable labelled dataset. Samples keep file order; classes are sorted.
class Corpus {
 public:
  Corpus(std::string name, std::vector<LabeledText> samples)
      : name_(std::move(name)), samples_(std::move(samples)) {
    if (samples_.empty()) throw ValidationError("corpus '" + name_ + "' has no samples");
    std::map<ClassId, std::size_t> counts;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const auto& s = samples_[i];
      if (s.label.empty()) {
        throw ValidationError("corpus '" + name_ + "': sample " + std::to_string(i) + " has an empty label");
      }
      if (s.text.empty()) {
        throw ValidationError("corpus '" + name_ + "': sample " + std::to_string(i) + " has empty text");
      }
      ++counts[s.label];
    }
    classes_.reserve(counts.size());
    for (const auto& [label, n] : counts) {
      classes_.push_back(label);
      class_counts_.push_back(n);
    }
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<LabeledText>& samples() const noexcept { return samples_; }
  const std::vector<ClassId>& classes() const noexcept { return classes_; }
  std::size_t size() const noexcept { return samples_.size(); }
  const LabeledText& operator[](std::size_t i) const { return samples_[i]; }

  bool has_class(const ClassId& label) const {
    return std::binary_search(classes_.begin(), classes_.end(), label);
  }

  std::size_t count(const ClassId& label) const {
    auto it = std::lower_bound(classes_.begin(), classes_.end(), label);
    if (it == classes_.end() || *it != label) return 0;
    return class_counts_[std::size_t(it - classes_.begin())];
  }

  /// Positions of every sample with the given label, ascending.
  std::vector<std::size_t> indices_of(const ClassId& label) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (samples_[i].label == label) out.push_back(i);
    }
    return out;
  }

  /// Order-sensitive fingerprint of labels and texts. Two corpora with the same
  /// checksum are treated as the same split.
  std::uint64_t checksum() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& s : samples_) {
      const std::uint64_t sizes[2] = {s.label.size(), s.text.size()};
      h = fnv1a64(ByteView(reinterpret_cast<const char*>(sizes), sizeof(sizes)), h);
      h = fnv1a64(s.label, h);
      h = fnv1a64(s.text, h);
    }
    return h;
  }

  /// Equality compares content, not the dataset name.
  friend bool operator==(const Corpus& a, const Corpus& b) { return a.samples_ == b.samples_; }

 private:
  std::string name_;
  std::vector<LabeledText> samples_;
  std::vector<ClassId> classes_;
  std::vector<std::size_t> class_counts_;
};

/// A CSV column addressed by 0-based position or by header name.
using ColumnRef = std::variant<std::size_t, std::string>;

/// All-digit strings address by index, anything else by header name.
inline ColumnRef parse_column(const std::string& spec) {
  if (!spec.empty() && std::all_of(spec.begin(), spec.end(), [](unsigned char c) { return c >= '0' && c <= '9'; })) {
    return ColumnRef(std::size_t(std::stoull(spec)));
  }
  return ColumnRef(spec);
}

enum class HeaderMode { automatic, present, absent };

struct CsvOptions {
  char delimiter = ',';
  /// automatic: a header row is expected iff a column is addressed by name.
  HeaderMode header = HeaderMode::automatic;
};

namespace detail {

inline bool is_blank(ByteView s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  });
}

inline std::size_t resolve_column(const ColumnRef& ref, const std::vector<std::string>* header,
                                  const char* role) {
  if (const auto* idx = std::get_if<std::size_t>(&ref)) return *idx;
  const auto& name = std::get<std::string>(ref);
  if (header == nullptr) {
    throw ValidationError(std::string("csv: ") + role + " column '" + name + "' given by name but the file has no header");
  }
  auto it = std::find(header->begin(), header->end(), name);
  if (it == header->end()) throw ValidationError(std::string("csv: unknown ") + role + " column '" + name + "'");
  return std::size_t(it - header->begin());
}

}  // namespace detail

/// Parses CSV text into a corpus, one sample per data row, in file order.
inline Corpus parse_corpus_csv(ByteView content, const ColumnRef& label_column, const ColumnRef& text_column,
                               const CsvOptions& options = {}, std::string name = "corpus") {
  const auto records = csv::parse(content, options.delimiter);
  bool has_header = options.header == HeaderMode::present;
  if (options.header == HeaderMode::automatic) {
    has_header = std::holds_alternative<std::string>(label_column) || std::holds_alternative<std::string>(text_column);
  }
  if (records.empty() || (has_header && records.size() == 1)) {
    throw ValidationError("csv: '" + name + "' contains no data rows");
  }

  const std::vector<std::string>* header = has_header ? &records.front().fields : nullptr;
  const std::size_t label_idx = detail::resolve_column(label_column, header, "label");
  const std::size_t text_idx = detail::resolve_column(text_column, header, "text");
  const std::size_t needed = std::max(label_idx, text_idx) + 1;

  std::vector<LabeledText> samples;
  samples.reserve(records.size());
  for (std::size_t r = has_header ? 1 : 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "row " + std::to_string(r + 1) + " (line " + std::to_string(rec.line) + ")";
    if (rec.fields.size() < needed) {
      throw ValidationError("csv: malformed " + where + ": expected at least " + std::to_string(needed) +
                            " fields, found " + std::to_string(rec.fields.size()));
    }
    const auto& label = rec.fields[label_idx];
    const auto& text = rec.fields[text_idx];
    if (label.empty()) throw ValidationError("csv: empty label field in " + where);
    if (detail::is_blank(text)) throw ValidationError("csv: empty text field in " + where);
    samples.push_back({label, text});
  }
  return Corpus(std::move(name), std::move(samples));
}

/// Loads a labelled CSV file. The corpus is named after the file stem.
inline Corpus load_csv(const std::filesystem::path& path, const ColumnRef& label_column,
                       const ColumnRef& text_column, const CsvOptions& options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("csv: cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus_csv(buf.str(), label_column, text_column, options, path.stem().string());
}

/// Writes "label,text" with a header row; load_csv(path, "label", "text") reads it back.
inline void write_csv(const Corpus& corpus, std::ostream& out, char delimiter = ',') {
  out << csv::format_row({"label", "text"}, delimiter);
  for (const auto& s : corpus.samples()) out << csv::format_row({s.label, s.text}, delimiter);
}

inline void write_csv(const Corpus& corpus, const std::filesystem::path& path, char delimiter = ',') {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("csv: cannot write '" + path.string() + "'");
  write_csv(corpus, out, delimiter);
}

/// Separator placed between texts when a class is concatenated.
inline constexpr ByteView kDefaultSeparator = "\n";

/// All texts of one class in corpus order, joined by `separator`.
inline Bytes concat_class_text(const Corpus& corpus, const ClassId& label, ByteView separator = kDefaultSeparator) {
  if (!corpus.has_class(label)) throw ValidationError("unknown class '" + label + "'");
  Bytes out;
  bool first = true;
  for (const auto& s : corpus.samples()) {
    if (s.label != label) continue;
    if (!first) out.append(separator);
    out.append(s.text);
    first = false;
  }
  return out;
}

struct FewShotSpec {
  std::size_t shots = 5;
  std::uint64_t seed = 0;
  std::size_t trials = 10;
};

/// Draws `spec.shots` samples per class without replacement. The draw for a
/// class depends only on (seed, trial_index, class label); output keeps corpus order.
inline Corpus few_shot_sample(const Corpus& corpus, const FewShotSpec& spec, std::size_t trial_index) {
  if (spec.shots < 1) throw ValidationError("few-shot: shots must be >= 1");
  if (spec.trials < 1) throw ValidationError("few-shot: trials must be >= 1");
  if (trial_index >= spec.trials) {
    throw ValidationError("few-shot: trial index " + std::to_string(trial_index) + " out of range for " +
                          std::to_string(spec.trials) + " trials");
  }
  for (const auto& label : corpus.classes()) {
    const std::size_t available = corpus.count(label);
    if (available < spec.shots) {
      throw ValidationError("few-shot: class '" + label + "' has " + std::to_string(available) +
                            " samples, fewer than " + std::to_string(spec.shots) + " shots");
    }
  }

  std::vector<std::size_t> chosen;
  chosen.reserve(corpus.classes().size() * spec.shots);
  for (const auto& label : corpus.classes()) {
    auto pool = corpus.indices_of(label);
    auto rng = StableRng::derive(spec.seed, {trial_index, fnv1a64(label)});
    // Partial Fisher-Yates: the first `shots` slots become the sample.
    for (std::size_t i = 0; i < spec.shots; ++i) {
      std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    }
    chosen.insert(chosen.end(), pool.begin(), pool.begin() + std::ptrdiff_t(spec.shots));
  }
  std::sort(chosen.begin(), chosen.end());

  std::vector<LabeledText> samples;
  samples.reserve(chosen.size());
  for (std::size_t i : chosen) samples.push_back(corpus[i]);
  return Corpus(corpus.name() + "/" + std::to_string(spec.shots) + "-shot#" + std::to_string(trial_index),
                std::move(samples));
}

}  // namespace lftc
