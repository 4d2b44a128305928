// Independent reference implementations used as test oracles. They are
// deliberately naive and share no code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace lftc::oracle {

struct BruteMatch {
  std::size_t length = 0;
  std::size_t offset = 0;
};

/// O(n^2) scan of every earlier start in window ∥ text; longest wins, then
/// the nearest source. Lengths below 3 are reported as no match.
inline BruteMatch longest_match(const std::string& window, const std::string& text, std::size_t position,
                                std::size_t max_back = std::string::npos) {
  const std::string buf = window + text;
  const std::size_t cur = window.size() + position;
  BruteMatch best;
  for (std::size_t s = 0; s < cur; ++s) {
    const std::size_t back = cur - s;
    if (max_back != std::string::npos && back > max_back) continue;
    std::size_t len = 0;
    while (cur + len < buf.size() && buf[s + len] == buf[cur + len]) ++len;
    if (len > best.length || (len == best.length && len > 0 && back < best.offset)) best = {len, back};
  }
  if (best.length < 3) return {};
  return best;
}

/// N · H(p̂) with H = -Σ p log2 p, accumulated in long double from a count map.
template <class T>
long double shannon_bits(const std::vector<T>& symbols) {
  std::map<T, std::size_t> counts;
  for (const auto& s : symbols) ++counts[s];
  const long double n = static_cast<long double>(symbols.size());
  long double h = 0.0L;
  for (const auto& [sym, c] : counts) {
    const long double p = static_cast<long double>(c) / n;
    h -= p * std::log2(p);
  }
  return n * h;
}

struct Neighbor {
  double distance;
  std::string label;
  std::size_t index;
};

/// Full sort by (distance, index), explicit vote table, ties to the closest.
inline std::string knn(std::vector<Neighbor> n, std::size_t k) {
  std::sort(n.begin(), n.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  });
  const std::size_t take = std::min(k, n.size());
  std::vector<std::pair<std::string, std::size_t>> table;
  for (std::size_t i = 0; i < take; ++i) {
    auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == n[i].label; });
    if (it == table.end()) table.push_back({n[i].label, 1});
    else ++it->second;
  }
  std::size_t top = 0;
  for (const auto& e : table) top = std::max(top, e.second);
  std::size_t holders = 0;
  std::string only;
  for (const auto& e : table) {
    if (e.second == top) {
      ++holders;
      only = e.first;
    }
  }
  return holders == 1 ? only : n.front().label;
}

/// (C(xy) - min) / max, written out from the definition.
inline double ncd(double cx, double cy, double cxy) {
  const double lo = cx < cy ? cx : cy;
  const double hi = cx < cy ? cy : cx;
  return (cxy - lo) / hi;
}

}  // namespace lftc::oracle
