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

// Reference dictionary compressor.
//
// Sizes are computed exactly as the textbook pipeline describes them: greedy
// longest-match search over a sliding window that is pre-seeded with the
// dictionary, replacement of each match by a (length, offset) token, and
// Shannon entropy coding of the resulting token stream using its own empirical
// symbol frequencies. No bitstream is produced; only the size is needed.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <ranges>
#include <vector>

#include "lftc/common.hpp"

namespace lftc::reflz {

inline constexpr std::size_t kMinMatch = 3;
inline constexpr std::size_t kDefaultWindow = 32 * 1024;

struct Match {
  std::size_t length = 0;
  std::size_t offset = 0;  // distance back from the current position

  friend bool operator==(const Match&, const Match&) = default;
};

/// Hash-chain index over one contiguous buffer. Finds the exact longest match
/// (ties go to the smallest offset) among sources at most `window` bytes back.
/// Matches may overlap the current position, as in LZ77.
class MatchFinder {
 public:
  MatchFinder(ByteView buffer, std::size_t window) : buf_(buffer), window_(window), prev_(buffer.size(), kNone) {
    if (buf_.size() < kMinMatch) return;
    std::vector<std::size_t> head(kHashSize, kNone);
    for (std::size_t i = 0; i + kMinMatch <= buf_.size(); ++i) {
      const std::size_t h = hash(i);
      prev_[i] = head[h];
      head[h] = i;
    }
  }

  Match longest_at(std::size_t cur) const {
    Match best;
    if (cur + kMinMatch > buf_.size()) return best;
    const std::size_t max_len = buf_.size() - cur;
    for (std::size_t s = prev_[cur]; s != kNone; s = prev_[s]) {
      const std::size_t offset = cur - s;
      if (offset > window_) break;  // chains are ordered newest first
      std::size_t len = 0;
      while (len < max_len && buf_[s + len] == buf_[cur + len]) ++len;
      if (len >= kMinMatch && len > best.length) {
        best = {len, offset};
        if (len == max_len) break;
      }
    }
    return best;
  }

 private:
  static constexpr std::size_t kNone = ~std::size_t(0);
  static constexpr std::size_t kHashBits = 16;
  static constexpr std::size_t kHashSize = std::size_t(1) << kHashBits;

  std::size_t hash(std::size_t i) const {
    const std::uint32_t v = std::uint32_t(std::uint8_t(buf_[i])) | (std::uint32_t(std::uint8_t(buf_[i + 1])) << 8) |
                            (std::uint32_t(std::uint8_t(buf_[i + 2])) << 16);
    return (v * 2654435761u) >> (32 - kHashBits);
  }

  ByteView buf_;
  std::size_t window_;
  std::vector<std::size_t> prev_;
};

/// Longest prefix of text[position..] that also starts earlier in window ∥ text[..position].
/// Returns {0, 0} when nothing of at least kMinMatch bytes matches.
inline Match ref_longest_match(ByteView window, ByteView text, std::size_t position) {
  if (position >= text.size()) throw ValidationError("ref_longest_match: position out of range");
  Bytes buffer;
  buffer.reserve(window.size() + text.size());
  buffer.append(window).append(text);
  const MatchFinder finder(buffer, buffer.size());
  return finder.longest_at(window.size() + position);
}

/// Total Shannon code length, in bits, of a symbol stream under its own
/// empirical distribution: sum over occurrences of -log2(count/total).
template <std::ranges::input_range Tokens>
double ref_entropy_coded_size(const Tokens& tokens) {
  using Symbol = std::ranges::range_value_t<Tokens>;
  std::vector<Symbol> sorted(std::ranges::begin(tokens), std::ranges::end(tokens));
  if (sorted.empty()) throw ValidationError("ref_entropy_coded_size: empty token stream");
  std::sort(sorted.begin(), sorted.end());
  const double total = double(sorted.size());
  double bits = 0.0;
  for (auto it = sorted.begin(); it != sorted.end();) {
    auto run_end = std::upper_bound(it, sorted.end(), *it);
    const double count = double(std::distance(it, run_end));
    bits += count * std::log2(total / count);
    it = run_end;
  }
  return bits;
}

/// Token as a single integer symbol: literals are their byte value, matches
/// carry a tag bit plus (length, offset).
using Token = std::uint64_t;

inline constexpr Token literal_token(unsigned char byte) { return byte; }
inline constexpr Token match_token(const Match& m) {
  return (Token(1) << 63) | (Token(m.length & 0x7fffffff) << 32) | Token(m.offset & 0xffffffff);
}

/// Greedy parse of `data` against a window pre-seeded with `dictionary`.
inline std::vector<Token> ref_tokenize(ByteView dictionary, ByteView data, std::size_t window) {
  Bytes buffer;
  buffer.reserve(dictionary.size() + data.size());
  buffer.append(dictionary).append(data);
  const MatchFinder finder(buffer, window);

  std::vector<Token> tokens;
  std::size_t pos = dictionary.size();
  while (pos < buffer.size()) {
    const Match m = finder.longest_at(pos);
    if (m.length >= kMinMatch) {
      tokens.push_back(match_token(m));
      pos += m.length;
    } else {
      tokens.push_back(literal_token(static_cast<unsigned char>(buffer[pos])));
      ++pos;
    }
  }
  return tokens;
}

/// Whole bytes needed for the entropy-coded token stream, at least 1.
inline std::size_t ref_compress_size(ByteView dictionary, ByteView data, std::size_t window = kDefaultWindow) {
  if (data.empty()) throw ValidationError("ref_compress_size: empty data");
  if (window < 1) throw ValidationError("ref_compress_size: window must be >= 1");
  const double bits = ref_entropy_coded_size(ref_tokenize(dictionary, data, window));
  // The epsilon absorbs rounding drift when the exact value is a whole byte count.
  const auto bytes = static_cast<std::size_t>(std::ceil(bits / 8.0 - 1e-9));
  return std::max<std::size_t>(bytes, 1);
}

}  // namespace lftc::reflz
