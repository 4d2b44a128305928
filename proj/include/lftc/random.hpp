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

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "lftc/common.hpp"

namespace lftc {

/// Seedable generator whose output sequence is identical on every platform.
///
/// std::mt19937_64 is fully specified by the standard, but the std::*_distribution
/// adaptors are not, so bounded draws and shuffles are implemented here.
class StableRng {
 public:
  explicit StableRng(std::uint64_t seed) : engine_(seed) {}

  /// Derives an independent stream from a base seed and any number of stream keys.
  static StableRng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t s = splitmix64(seed);
    for (std::uint64_t k : keys) s = splitmix64(s ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    return StableRng(s);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    // Rejection sampling on the largest multiple of bound.
    const std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (limit == 0 || r < limit) return r % bound;
    }
  }

  /// Uniform integer in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double unit() { return double(engine_() >> 11) * 0x1.0p-53; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lftc
