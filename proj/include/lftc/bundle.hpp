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

// Compressor-list bundles: built lists saved to disk so repeated runs can skip
// dictionary training. Layout is described in docs/bundle-format.md. The
// format is versioned but carries no compatibility promise across versions.

#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lftc/compression.hpp"
#include "lftc/mcc.hpp"

namespace lftc {

inline constexpr char kBundleMagic[8] = {'L', 'F', 'T', 'C', 'Z', 'L', 'S', 'T'};
inline constexpr std::uint32_t kBundleVersion = 1;

/// Everything a bundle's lists depend on. A bundle is reusable only when its
/// header equals the header of the run that wants it.
struct BundleHeader {
  Backend backend;
  SegmentPlan plan;
  DictionaryMode dictionary_mode = DictionaryMode::trained;
  Bytes separator;
  bool whole_class = false;  // one dictionary per class (lftc-mcc lists)
  std::uint64_t corpus_checksum = 0;

  friend bool operator==(const BundleHeader&, const BundleHeader&) = default;
};

struct Bundle {
  BundleHeader header;
  ClassLists lists;
};

namespace detail {

class BundleWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(char(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(char((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(char((v >> (8 * i)) & 0xff));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void bytes(ByteView b) {
    u64(b.size());
    out_.append(b);
  }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  const std::string& data() const noexcept { return out_; }

 private:
  std::string out_;
};

class BundleReader {
 public:
  explicit BundleReader(ByteView in) : in_(in) {}

  std::uint8_t u8() { return std::uint8_t(take(1)[0]); }
  std::uint32_t u32() {
    auto s = take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | std::uint8_t(s[std::size_t(i)]);
    return v;
  }
  std::uint64_t u64() {
    auto s = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | std::uint8_t(s[std::size_t(i)]);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  Bytes bytes() {
    const std::uint64_t n = u64();
    return Bytes(take(n));
  }
  ByteView take(std::uint64_t n) {
    if (n > in_.size() - pos_) throw ValidationError("bundle: truncated file");
    ByteView s = in_.substr(pos_, std::size_t(n));
    pos_ += std::size_t(n);
    return s;
  }
  bool done() const noexcept { return pos_ == in_.size(); }

 private:
  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize_bundle(const Bundle& bundle) {
  detail::BundleWriter w;
  const auto& h = bundle.header;
  w.raw(kBundleMagic, sizeof(kBundleMagic));
  w.u32(kBundleVersion);
  w.u8(std::uint8_t(h.backend.kind));
  w.i32(h.backend.level);
  w.u8(h.backend.adaptive_level ? 1 : 0);
  w.u64(h.backend.window);
  w.u64(h.plan.step_size);
  w.u64(h.plan.max_compressors);
  w.u8(std::uint8_t(h.dictionary_mode));
  w.bytes(h.separator);
  w.u8(h.whole_class ? 1 : 0);
  w.u64(h.corpus_checksum);

  w.u64(bundle.lists.size());
  for (const auto& [label, list] : bundle.lists) {
    w.bytes(label);
    w.u64(list.total_length);
    w.u64(list.available_segments);
    w.u64(list.compressors.size());
    for (const auto& c : list.compressors) {
      const auto& d = c.dictionary();
      w.u64(d.span.segment_index);
      w.u64(d.span.begin);
      w.u64(d.span.end);
      w.u8(d.span.raw_fallback ? 1 : 0);
      w.u8(d.raw_content ? 1 : 0);
      w.u64(d.overhead_bytes);
      w.bytes(d.payload);
    }
  }
  return w.data();
}

inline Bundle deserialize_bundle(ByteView data) {
  detail::BundleReader r(data);
  if (r.take(sizeof(kBundleMagic)) != ByteView(kBundleMagic, sizeof(kBundleMagic))) {
    throw ValidationError("bundle: bad magic");
  }
  if (const auto v = r.u32(); v != kBundleVersion) {
    throw ValidationError("bundle: unsupported version " + std::to_string(v));
  }
  Bundle b;
  auto& h = b.header;
  const std::uint8_t kind = r.u8();
  if (kind > std::uint8_t(BackendKind::reference_lz)) throw ValidationError("bundle: bad backend kind");
  h.backend.kind = BackendKind(kind);
  h.backend.level = r.i32();
  h.backend.adaptive_level = r.u8() != 0;
  h.backend.window = r.u64();
  h.plan.step_size = r.u64();
  h.plan.max_compressors = r.u64();
  const std::uint8_t mode = r.u8();
  if (mode > std::uint8_t(DictionaryMode::raw)) throw ValidationError("bundle: bad dictionary mode");
  h.dictionary_mode = DictionaryMode(mode);
  h.separator = r.bytes();
  h.whole_class = r.u8() != 0;
  h.corpus_checksum = r.u64();

  const std::uint64_t classes = r.u64();
  for (std::uint64_t i = 0; i < classes; ++i) {
    ClassCompressorList list;
    list.label = r.bytes();
    list.total_length = r.u64();
    list.available_segments = r.u64();
    const std::uint64_t n = r.u64();
    for (std::uint64_t j = 0; j < n; ++j) {
      TrainedDictionary d;
      d.span.label = list.label;
      d.span.segment_index = r.u64();
      d.span.begin = r.u64();
      d.span.end = r.u64();
      d.span.raw_fallback = r.u8() != 0;
      d.raw_content = r.u8() != 0;
      d.overhead_bytes = r.u64();
      d.payload = r.bytes();
      list.compressors.emplace_back(h.backend, std::move(d));
    }
    list.segment_count = list.compressors.size();
    ClassId key = list.label;
    b.lists.emplace(std::move(key), std::move(list));
  }
  if (!r.done()) throw ValidationError("bundle: trailing bytes");
  return b;
}

inline void save_bundle(const std::filesystem::path& path, const Bundle& bundle) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("bundle: cannot write '" + path.string() + "'");
  const auto data = serialize_bundle(bundle);
  out.write(data.data(), std::streamsize(data.size()));
  if (!out) throw ValidationError("bundle: write failed for '" + path.string() + "'");
}

inline Bundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("bundle: cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_bundle(buf.str());
}

}  // namespace lftc
