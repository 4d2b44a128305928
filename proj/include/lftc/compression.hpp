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

// Compressed-size oracles.
//
// Three backends share one interface:
//   zstd          Zstandard frames; supports trained and raw-content dictionaries.
//   deflate       gzip-wrapped DEFLATE via zlib; no dictionary support here.
//   reference-lz  the in-repo greedy LZ + entropy size model (reference_lz.hpp).
//
// Every call is a pure function of (backend, dictionary, input). Scratch state
// (zstd contexts, zlib streams, buffers) is thread_local, so any number of
// workers may call in concurrently.

#pragma once

#include <zdict.h>
#include <zlib.h>
#include <zstd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lftc/common.hpp"
#include "lftc/reference_lz.hpp"

namespace lftc {

enum class BackendKind { zstd, deflate, reference_lz };

inline std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::zstd: return "zstd";
    case BackendKind::deflate: return "deflate";
    case BackendKind::reference_lz: return "reference-lz";
  }
  return "unknown";
}

inline BackendKind parse_backend_kind(std::string_view name) {
  if (name == "zstd") return BackendKind::zstd;
  if (name == "deflate" || name == "gzip") return BackendKind::deflate;
  if (name == "reference-lz" || name == "reflz") return BackendKind::reference_lz;
  throw ValidationError("unknown backend '" + std::string(name) + "' (expected zstd, deflate or reference-lz)");
}

/// Inputs at or above this size are compressed at kAdaptiveLevel when the
/// adaptive rule is enabled (zstd only).
inline constexpr std::size_t kAdaptiveThreshold = 64 * 1024;
inline constexpr int kAdaptiveLevel = 1;

struct Backend {
  BackendKind kind = BackendKind::zstd;
  int level = 3;
  bool adaptive_level = true;
  std::size_t window = reflz::kDefaultWindow;  // reference-lz only

  static Backend zstd(int level = 3) { return {BackendKind::zstd, level, true, reflz::kDefaultWindow}; }
  static Backend deflate(int level = 6) { return {BackendKind::deflate, level, false, reflz::kDefaultWindow}; }
  static Backend reference_lz(std::size_t window = reflz::kDefaultWindow) {
    return {BackendKind::reference_lz, 0, false, window};
  }

  /// Default level for a backend kind.
  static int default_level(BackendKind kind) {
    switch (kind) {
      case BackendKind::zstd: return 3;
      case BackendKind::deflate: return 6;
      case BackendKind::reference_lz: return 0;
    }
    return 0;
  }

  bool dictionary_capable() const noexcept { return kind != BackendKind::deflate; }

  int level_for(std::size_t input_size) const noexcept {
    if (kind == BackendKind::zstd && adaptive_level && input_size >= kAdaptiveThreshold) return kAdaptiveLevel;
    return level;
  }

  void validate() const {
    switch (kind) {
      case BackendKind::zstd:
        if (level < 1 || level > ZSTD_maxCLevel()) {
          throw ValidationError("zstd level must be in [1, " + std::to_string(ZSTD_maxCLevel()) + "], got " +
                                std::to_string(level));
        }
        break;
      case BackendKind::deflate:
        if (level < 1 || level > 9) throw ValidationError("deflate level must be in [1, 9], got " + std::to_string(level));
        break;
      case BackendKind::reference_lz:
        if (window < 1) throw ValidationError("reference-lz window must be >= 1");
        break;
    }
  }

  friend bool operator==(const Backend&, const Backend&) = default;
};

namespace detail {

struct ZstdCCtxDeleter {
  void operator()(ZSTD_CCtx* p) const noexcept { ZSTD_freeCCtx(p); }
};
struct ZstdCDictDeleter {
  void operator()(ZSTD_CDict* p) const noexcept { ZSTD_freeCDict(p); }
};

inline ZSTD_CCtx* thread_cctx() {
  thread_local std::unique_ptr<ZSTD_CCtx, ZstdCCtxDeleter> ctx(ZSTD_createCCtx());
  if (!ctx) throw BackendError("zstd: cannot allocate compression context");
  ZSTD_CCtx_reset(ctx.get(), ZSTD_reset_session_and_parameters);
  return ctx.get();
}

inline std::string& thread_scratch(std::size_t size) {
  thread_local std::string buf;
  if (buf.size() < size) buf.resize(size);
  return buf;
}

inline std::size_t zstd_check(std::size_t rc, const char* what) {
  if (ZSTD_isError(rc)) throw BackendError(std::string("zstd: ") + what + ": " + ZSTD_getErrorName(rc));
  return rc;
}

/// A gzip-wrapped deflate stream kept alive per (thread, level) and reset per call.
class DeflateStream {
 public:
  explicit DeflateStream(int level) {
    if (deflateInit2(&zs_, level, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
      throw BackendError("deflate: deflateInit2 failed at level " + std::to_string(level));
    }
  }
  DeflateStream(const DeflateStream&) = delete;
  DeflateStream& operator=(const DeflateStream&) = delete;
  ~DeflateStream() { deflateEnd(&zs_); }

  /// Compresses into `out` (at least bound() bytes) and returns the compressed length.
  std::size_t run(ByteView data, char* out, std::size_t capacity) {
    if (deflateReset(&zs_) != Z_OK) throw BackendError("deflate: deflateReset failed");
    zs_.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs_.avail_in = static_cast<uInt>(data.size());
    zs_.next_out = reinterpret_cast<Bytef*>(out);
    zs_.avail_out = static_cast<uInt>(capacity);
    const int rc = deflate(&zs_, Z_FINISH);
    if (rc != Z_STREAM_END) throw BackendError("deflate: compression failed (" + std::to_string(rc) + ")");
    return zs_.total_out;
  }

  // A finished gzip stream under-reports its header until it is reset.
  std::size_t bound(std::size_t n) {
    if (deflateReset(&zs_) != Z_OK) throw BackendError("deflate: deflateReset failed");
    return deflateBound(&zs_, static_cast<uLong>(n));
  }

 private:
  z_stream zs_{};
};

inline DeflateStream& thread_deflate(int level) {
  thread_local std::array<std::unique_ptr<DeflateStream>, 10> streams;
  auto& slot = streams.at(static_cast<std::size_t>(level));
  if (!slot) slot = std::make_unique<DeflateStream>(level);
  return *slot;
}

// Compresses `data`; if `keep` is non-null the payload is copied there.
inline std::size_t compress_impl(const Backend& backend, ByteView data, Bytes* keep) {
  switch (backend.kind) {
    case BackendKind::zstd: {
      const std::size_t cap = ZSTD_compressBound(data.size());
      auto& out = thread_scratch(cap);
      const std::size_t n = zstd_check(
          ZSTD_compressCCtx(thread_cctx(), out.data(), cap, data.data(), data.size(), backend.level_for(data.size())),
          "compress");
      if (keep) keep->assign(out.data(), n);
      return n;
    }
    case BackendKind::deflate: {
      if (data.size() > 0xffffffffu) throw BackendError("deflate: input larger than 4 GiB");
      auto& stream = thread_deflate(backend.level);
      const std::size_t cap = stream.bound(data.size());
      auto& out = thread_scratch(cap);
      const std::size_t n = stream.run(data, out.data(), cap);
      if (keep) keep->assign(out.data(), n);
      return n;
    }
    case BackendKind::reference_lz:
      if (keep) throw BackendError("reference-lz produces sizes only, not payloads");
      return reflz::ref_compress_size({}, data, backend.window);
  }
  throw BackendError("unknown backend");
}

}  // namespace detail

/// Length in bytes of the backend's compressed representation of `data`.
inline std::size_t compressed_size(const Backend& backend, ByteView data) {
  if (data.empty()) throw ValidationError("compressed_size: empty input");
  return detail::compress_impl(backend, data, nullptr);
}

/// The compressed payload itself (zstd frame or gzip member).
inline Bytes compress(const Backend& backend, ByteView data) {
  if (data.empty()) throw ValidationError("compress: empty input");
  Bytes out;
  detail::compress_impl(backend, data, &out);
  return out;
}

/// Where a dictionary's bytes came from inside a class's concatenated text.
struct SourceSpan {
  ClassId label;
  std::size_t segment_index = 0;
  std::size_t begin = 0;  // byte range [begin, end)
  std::size_t end = 0;
  bool raw_fallback = false;  // payload is the raw segment rather than a trained dictionary

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct TrainedDictionary {
  Bytes payload;
  SourceSpan span;
  std::size_t overhead_bytes = 0;
  bool raw_content = true;  // false only for zstd-format trained dictionaries

  friend bool operator==(const TrainedDictionary&, const TrainedDictionary&) = default;
};

enum class DictionaryMode {
  trained,  // zstd dictionary builder, raw bytes only if training fails
  raw,      // the segment bytes themselves are the dictionary
};

inline std::string_view to_string(DictionaryMode mode) { return mode == DictionaryMode::trained ? "trained" : "raw"; }

inline DictionaryMode parse_dictionary_mode(std::string_view name) {
  if (name == "trained") return DictionaryMode::trained;
  if (name == "raw") return DictionaryMode::raw;
  throw ValidationError("unknown dictionary mode '" + std::string(name) + "' (expected trained or raw)");
}

/// Training splits a segment into fixed-size samples of this many bytes.
inline constexpr std::size_t kTrainingSampleBytes = 1024;
/// Segments smaller than this are never trained; their raw bytes are used.
inline constexpr std::size_t kMinTrainingBytes = 4 * 1024;
/// Upper bound on a trained dictionary, matching the zstd CLI default.
inline constexpr std::size_t kMaxDictionaryBytes = 112640;

/// Builds a dictionary from one segment of class text.
inline TrainedDictionary train_dictionary(const Backend& backend, ByteView segment, SourceSpan span,
                                          DictionaryMode mode = DictionaryMode::trained) {
  if (segment.empty()) throw ValidationError("train_dictionary: empty segment");
  if (!backend.dictionary_capable()) {
    throw ValidationError("train_dictionary: backend '" + std::string(to_string(backend.kind)) +
                          "' does not support dictionaries");
  }

  TrainedDictionary dict;
  dict.span = std::move(span);
  dict.overhead_bytes = 0;

  if (backend.kind == BackendKind::zstd && mode == DictionaryMode::trained && segment.size() >= kMinTrainingBytes) {
    std::vector<std::size_t> sizes;
    for (std::size_t off = 0; off < segment.size(); off += kTrainingSampleBytes) {
      sizes.push_back(std::min(kTrainingSampleBytes, segment.size() - off));
    }
    const std::size_t capacity = std::min(kMaxDictionaryBytes, segment.size() / 4);
    Bytes buffer(capacity, '\0');
    const std::size_t n = ZDICT_trainFromBuffer(buffer.data(), buffer.size(), segment.data(), sizes.data(),
                                                static_cast<unsigned>(sizes.size()));
    if (!ZDICT_isError(n) && n > 0) {
      buffer.resize(n);
      dict.payload = std::move(buffer);
      dict.raw_content = false;
      return dict;
    }
  }

  dict.payload.assign(segment.data(), segment.size());
  dict.raw_content = true;
  dict.span.raw_fallback = (backend.kind == BackendKind::zstd && mode == DictionaryMode::trained);
  return dict;
}

/// A backend bound to one dictionary. Copies share the immutable dictionary
/// and the prepared zstd dictionary state.
class DictCompressor {
 public:
  DictCompressor(Backend backend, TrainedDictionary dict)
      : backend_(backend), dict_(std::make_shared<const TrainedDictionary>(std::move(dict))) {
    if (!backend_.dictionary_capable()) {
      throw ValidationError("DictCompressor: backend '" + std::string(to_string(backend_.kind)) +
                            "' does not support dictionaries");
    }
    if (dict_->payload.empty()) throw ValidationError("DictCompressor: empty dictionary payload");
    if (backend_.kind == BackendKind::zstd) {
      const auto params = ZSTD_getCParams(backend_.level, 0, dict_->payload.size());
      ZSTD_CDict* cdict = ZSTD_createCDict_advanced(dict_->payload.data(), dict_->payload.size(), ZSTD_dlm_byRef,
                                                    content_type(), params, ZSTD_defaultCMem);
      if (cdict == nullptr) throw BackendError("zstd: cannot load dictionary for " + describe());
      cdict_ = std::shared_ptr<ZSTD_CDict>(cdict, detail::ZstdCDictDeleter{});
    }
  }

  const Backend& backend() const noexcept { return backend_; }
  const TrainedDictionary& dictionary() const noexcept { return *dict_; }

  /// Compressed size of `data` with this dictionary plus the dictionary overhead term.
  std::size_t compressed_size(ByteView data) const {
    if (data.empty()) throw ValidationError("dict_compressed_size: empty input");
    return run(data, nullptr) + dict_->overhead_bytes;
  }

  /// The dictionary-compressed payload (zstd only).
  Bytes compress(ByteView data) const {
    if (data.empty()) throw ValidationError("compress: empty input");
    if (backend_.kind != BackendKind::zstd) throw BackendError("reference-lz produces sizes only, not payloads");
    Bytes out;
    run(data, &out);
    return out;
  }

  ZSTD_dictContentType_e content_type() const noexcept {
    return dict_->raw_content ? ZSTD_dct_rawContent : ZSTD_dct_fullDict;
  }

 private:
  std::string describe() const {
    return "class '" + dict_->span.label + "' segment " + std::to_string(dict_->span.segment_index);
  }

  std::size_t run(ByteView data, Bytes* keep) const {
    if (backend_.kind == BackendKind::reference_lz) {
      return reflz::ref_compress_size(dict_->payload, data, backend_.window);
    }
    const std::size_t cap = ZSTD_compressBound(data.size());
    auto& out = detail::thread_scratch(cap);
    ZSTD_CCtx* cctx = detail::thread_cctx();
    std::size_t rc;
    const int level = backend_.level_for(data.size());
    if (level == backend_.level) {
      rc = ZSTD_compress_usingCDict(cctx, out.data(), cap, data.data(), data.size(), cdict_.get());
    } else {
      detail::zstd_check(ZSTD_CCtx_setParameter(cctx, ZSTD_c_compressionLevel, level), "set level");
      detail::zstd_check(ZSTD_CCtx_loadDictionary_advanced(cctx, dict_->payload.data(), dict_->payload.size(),
                                                           ZSTD_dlm_byRef, content_type()),
                         "load dictionary");
      rc = ZSTD_compress2(cctx, out.data(), cap, data.data(), data.size());
    }
    const std::size_t n = detail::zstd_check(rc, "dictionary compress");
    if (keep) keep->assign(out.data(), n);
    return n;
  }

  Backend backend_;
  std::shared_ptr<const TrainedDictionary> dict_;
  std::shared_ptr<ZSTD_CDict> cdict_;
};

inline std::size_t dict_compressed_size(const DictCompressor& comp, ByteView data) { return comp.compressed_size(data); }

/// (C(xy) - min(C(x), C(y))) / max(C(x), C(y)) from already-known sizes.
inline double ncd_from_sizes(std::size_t cx, std::size_t cy, std::size_t cxy) {
  const std::size_t hi = std::max(cx, cy);
  if (hi == 0) throw ValidationError("ncd: both compressed sizes are zero");
  return (double(cxy) - double(std::min(cx, cy))) / double(hi);
}

/// NCD under any size function `size_of(ByteView) -> integer`. x is placed before y.
template <class SizeFn>
  requires std::invocable<SizeFn&, ByteView>
double ncd(SizeFn&& size_of, ByteView x, ByteView y) {
  if (x.empty() || y.empty()) throw ValidationError("ncd: empty input");
  Bytes xy;
  xy.reserve(x.size() + y.size());
  xy.append(x).append(y);
  return ncd_from_sizes(static_cast<std::size_t>(size_of(x)), static_cast<std::size_t>(size_of(y)),
                        static_cast<std::size_t>(size_of(ByteView(xy))));
}

inline double ncd(const Backend& backend, ByteView x, ByteView y) {
  return ncd([&](ByteView s) { return compressed_size(backend, s); }, x, y);
}

}  // namespace lftc
