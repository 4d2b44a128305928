#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <zlib.h>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace lftc;
using lftc::testing::random_bytes;
using lftc::testing::random_text;
using lftc::testing::repeat;

namespace {

const std::vector<Backend> kAllBackends = {Backend::zstd(3), Backend::deflate(6), Backend::reference_lz()};

// Word-like text from a small alphabet; the same (alphabet, seed family) gives
// statistically similar documents.
std::string wordy(std::uint64_t seed, std::size_t n, char first, std::size_t width, char space = ' ') {
  StableRng rng(seed);
  std::string s;
  while (s.size() < n) {
    const std::size_t len = rng.between(3, 8);
    for (std::size_t i = 0; i < len; ++i) s.push_back(char(first + rng.below(width)));
    s.push_back(space);
  }
  s.resize(n);
  return s;
}

SourceSpan span_for(ByteView seg) { return {"x", 0, 0, seg.size(), false}; }

std::string gunzip(const std::string& gz) {
  z_stream zs{};
  inflateInit2(&zs, 15 + 16);
  std::string out(1 << 20, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(gz.data()));
  zs.avail_in = uInt(gz.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = uInt(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  inflateEnd(&zs);
  return rc == Z_STREAM_END ? out : std::string("<inflate failed>");
}

}  // namespace

TEST(Backend, ParseAndValidate) {
  EXPECT_EQ(parse_backend_kind("zstd"), BackendKind::zstd);
  EXPECT_EQ(parse_backend_kind("gzip"), BackendKind::deflate);
  EXPECT_EQ(parse_backend_kind("reflz"), BackendKind::reference_lz);
  EXPECT_THROW(parse_backend_kind("bzip2"), ValidationError);
  EXPECT_THROW(Backend::zstd(0).validate(), ValidationError);
  EXPECT_THROW(Backend::zstd(ZSTD_maxCLevel() + 1).validate(), ValidationError);
  EXPECT_THROW(Backend::deflate(10).validate(), ValidationError);
  EXPECT_NO_THROW(Backend::deflate(1).validate());
  EXPECT_THROW(Backend::reference_lz(0).validate(), ValidationError);
  EXPECT_FALSE(Backend::deflate().dictionary_capable());
}

TEST(CompressedSize, RunOfOneByteCollapses) {
  // Observed: zstd-3 19, deflate-6 46, reference-lz 1 (two singleton tokens).
  const std::string a(10000, 'a');
  const std::size_t pinned[] = {19, 46, 1};
  for (std::size_t i = 0; i < kAllBackends.size(); ++i) {
    const auto n = compressed_size(kAllBackends[i], a);
    EXPECT_LT(n, 200u);
    EXPECT_NEAR(double(n), double(pinned[i]), std::max(1.0, 0.1 * double(pinned[i]))) << to_string(kAllBackends[i].kind);
  }
}

TEST(CompressedSize, RandomBytesDoNotShrinkUnderDeflate) {
  // Observed on StableRng(2026): 1023 bytes.
  const auto n = compressed_size(Backend::deflate(6), random_bytes(2026, 1000));
  EXPECT_GE(n, 1000u);
  EXPECT_NEAR(double(n), 1023.0, 102.3);
}

TEST(CompressedSize, EmptyInputIsRejected) {
  for (const auto& b : kAllBackends) EXPECT_THROW(compressed_size(b, ""), ValidationError);
}

// Property: deterministic and at least one byte for any non-empty input.
TEST(CompressedSizeProperty, DeterministicAndPositive) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    StableRng rng(seed);
    const std::string x = seed % 2 ? random_bytes(seed, rng.between(1, 3000)) : random_text(seed, rng.between(1, 3000), 'a', 3);
    for (const auto& b : kAllBackends) {
      const auto n = compressed_size(b, x);
      EXPECT_GE(n, 1u);
      EXPECT_EQ(n, compressed_size(b, x));
    }
  }
}

TEST(CompressedSize, DeflateStreamReuseAcrossInputKinds) {
  // Alternating compressible and incompressible inputs on one thread-local stream.
  const Backend b = Backend::deflate(9);
  for (int i = 0; i < 5; ++i) {
    EXPECT_LT(compressed_size(b, std::string(5000, 'z')), 100u);
    EXPECT_GE(compressed_size(b, random_bytes(i, 4000)), 4000u);
  }
}

TEST(CompressedSize, AdaptiveLevelForLargeInputs) {
  const std::string big = wordy(3, kAdaptiveThreshold + 100, 'a', 20);
  Backend high = Backend::zstd(19);
  EXPECT_EQ(high.level_for(big.size()), kAdaptiveLevel);
  EXPECT_EQ(high.level_for(100), 19);
  EXPECT_EQ(compressed_size(high, big), compressed_size(Backend::zstd(kAdaptiveLevel), big));
  high.adaptive_level = false;
  EXPECT_EQ(compressed_size(high, big), ZSTD_compress(std::string(ZSTD_compressBound(big.size()), '\0').data(),
                                                      ZSTD_compressBound(big.size()), big.data(), big.size(), 19));
}

TEST(Interop, GzipPayloadReadsBackWithZlibAndGzipTool) {
  const std::string text = repeat("interoperable gzip member ", 200);
  const Bytes gz = compress(Backend::deflate(6), text);
  EXPECT_EQ(gz.size(), compressed_size(Backend::deflate(6), text));
  ASSERT_GE(gz.size(), 2u);
  EXPECT_EQ(std::uint8_t(gz[0]), 0x1f);
  EXPECT_EQ(std::uint8_t(gz[1]), 0x8b);
  EXPECT_EQ(gunzip(gz), text);

  lftc::testing::TempDir dir;
  lftc::testing::write_file(dir / "x.gz", gz);
  const std::string cmd = "gzip -dc '" + (dir / "x.gz").string() + "' > '" + (dir / "x").string() + "' 2>/dev/null";
  if (std::system("command -v gzip >/dev/null 2>&1") != 0) GTEST_SKIP() << "gzip binary not installed";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(lftc::testing::read_file(dir / "x"), text);
}

TEST(Interop, ZstdFrameDecompresses) {
  const std::string text = wordy(11, 5000, 'a', 10);
  const Bytes frame = compress(Backend::zstd(5), text);
  std::string out(text.size(), '\0');
  const auto n = ZSTD_decompress(out.data(), out.size(), frame.data(), frame.size());
  ASSERT_FALSE(ZSTD_isError(n)) << ZSTD_getErrorName(n);
  EXPECT_EQ(out.substr(0, n), text);
}

TEST(Interop, DictionaryFramesDecompressWithTheDictionary) {
  const std::string seg = wordy(21, 20000, 'a', 12);
  const std::string data = wordy(22, 3000, 'a', 12);
  for (auto mode : {DictionaryMode::trained, DictionaryMode::raw}) {
    const DictCompressor dc(Backend::zstd(3), train_dictionary(Backend::zstd(3), seg, span_for(seg), mode));
    const Bytes frame = dc.compress(data);
    EXPECT_EQ(frame.size(), dc.compressed_size(data));
    ZSTD_DCtx* dctx = ZSTD_createDCtx();
    ZSTD_DCtx_loadDictionary_advanced(dctx, dc.dictionary().payload.data(), dc.dictionary().payload.size(),
                                      ZSTD_dlm_byCopy, dc.content_type());
    std::string out(data.size(), '\0');
    const auto n = ZSTD_decompressDCtx(dctx, out.data(), out.size(), frame.data(), frame.size());
    ZSTD_freeDCtx(dctx);
    ASSERT_FALSE(ZSTD_isError(n)) << ZSTD_getErrorName(n);
    EXPECT_EQ(out.substr(0, n), data) << to_string(mode);
  }
}

TEST(TrainDictionary, ShortRepetitiveSegment) {
  const std::string seg = repeat("abc", 300);
  for (const auto& b : {Backend::zstd(3), Backend::reference_lz()}) {
    const auto d = train_dictionary(b, seg, span_for(seg));
    EXPECT_FALSE(d.payload.empty());
    EXPECT_TRUE(d.raw_content);  // below the training minimum
    const DictCompressor dc(b, d);
    // Six bytes are too few for either backend to show a whole-byte gain:
    // zstd stores such blocks raw and reference-lz hits its one-byte floor.
    EXPECT_LE(dc.compressed_size("abcabc"), compressed_size(b, "abcabc")) << to_string(b.kind);
  }
  // The gain is visible in zstd from a dozen bytes on (observed 15 vs 21)...
  const DictCompressor z(Backend::zstd(3), train_dictionary(Backend::zstd(3), seg, span_for(seg)));
  EXPECT_LT(z.compressed_size(repeat("abc", 4)), compressed_size(Backend::zstd(3), repeat("abc", 4)));
  // ...and in reference-lz bits before rounding: one match token (0 bits) vs a, b, c, match (8 bits).
  EXPECT_EQ(reflz::ref_entropy_coded_size(reflz::ref_tokenize(seg, "abcabc", reflz::kDefaultWindow)), 0.0);
  EXPECT_EQ(reflz::ref_entropy_coded_size(reflz::ref_tokenize("", "abcabc", reflz::kDefaultWindow)), 8.0);

  EXPECT_TRUE(train_dictionary(Backend::zstd(3), seg, span_for(seg)).span.raw_fallback);
  EXPECT_FALSE(train_dictionary(Backend::zstd(3), seg, span_for(seg), DictionaryMode::raw).span.raw_fallback);
}

TEST(TrainDictionary, LargeSegmentIsTrained) {
  const std::string seg = wordy(5, 40000, 'a', 10);
  const auto d = train_dictionary(Backend::zstd(3), seg, span_for(seg));
  EXPECT_FALSE(d.raw_content);
  EXPECT_FALSE(d.span.raw_fallback);
  EXPECT_LE(d.payload.size(), std::min(kMaxDictionaryBytes, seg.size() / 4));
  EXPECT_EQ(ZDICT_getDictID(d.payload.data(), d.payload.size()) != 0, true);
}

TEST(TrainDictionary, Errors) {
  EXPECT_THROW(train_dictionary(Backend::zstd(3), "", {}), ValidationError);
  EXPECT_THROW(train_dictionary(Backend::deflate(6), "abc", {}), ValidationError);
  EXPECT_THROW(DictCompressor(Backend::deflate(6), TrainedDictionary{"abc", {}, 0, true}), ValidationError);
  EXPECT_THROW(DictCompressor(Backend::zstd(3), TrainedDictionary{"", {}, 0, true}), ValidationError);
  const DictCompressor dc(Backend::zstd(3), TrainedDictionary{"abc", {}, 0, true});
  EXPECT_THROW(dc.compressed_size(""), ValidationError);
  const DictCompressor ref(Backend::reference_lz(), TrainedDictionary{"abc", {}, 0, true});
  EXPECT_THROW(ref.compress("abc"), BackendError);
}

TEST(DictCompressedSize, SourceSegmentIsCheaperWithItsDictionary) {
  for (auto mode : {DictionaryMode::trained, DictionaryMode::raw}) {
    for (const auto& b : {Backend::zstd(3), Backend::reference_lz()}) {
      const std::string seg = wordy(8, 6000, 'a', 9);
      const DictCompressor dc(b, train_dictionary(b, seg, span_for(seg), mode));
      EXPECT_LT(dc.compressed_size(seg), compressed_size(b, seg)) << to_string(b.kind) << "/" << to_string(mode);
    }
  }
}

TEST(DictCompressedSize, OverheadIsAdded) {
  TrainedDictionary d{"hello world", {}, 17, true};
  const DictCompressor with(Backend::zstd(3), d);
  d.overhead_bytes = 0;
  const DictCompressor without(Backend::zstd(3), d);
  EXPECT_EQ(with.compressed_size("hello"), without.compressed_size("hello") + 17);
}

// Disjoint vocabularies: the dictionary can neither help nor hurt much.
// Trained dictionaries and reference-lz stay within 5%. A raw zstd dictionary
// shifts the size by up to 5.6% on these seeds, so it gets a 7% band.
TEST(DictCompressedSize, DisjointVocabularyStaysNearPlainSize) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::string seg = wordy(100 + seed, 20000, 'a', 8, ' ');
    const std::string q = wordy(200 + seed, 2000, 'n', 8, '.');
    for (auto mode : {DictionaryMode::trained, DictionaryMode::raw}) {
      for (const auto& b : {Backend::zstd(3), Backend::reference_lz()}) {
        const double band = (b.kind == BackendKind::zstd && mode == DictionaryMode::raw) ? 0.07 : 0.05;
        const DictCompressor dc(b, train_dictionary(b, seg, span_for(seg), mode));
        const double plain = double(compressed_size(b, q));
        const double with = double(dc.compressed_size(q));
        EXPECT_LE(std::fabs(with - plain), band * plain + double(dc.dictionary().overhead_bytes))
            << "seed " << seed << " " << to_string(b.kind) << "/" << to_string(mode);
      }
    }
  }
}

// Property: for inputs of at least 256 bytes drawn from the same class
// generator as the dictionary's segment, the dictionary always helps.
// (iid random letters are not such a source: spurious short matches into a
// raw dictionary can cost more than literals.)
TEST(DictCompressedSizeProperty, SameSourceBenefits) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    StableRng rng(seed);
    synthetic::MotifSpec ms;
    ms.classes = rng.between(2, 5);
    ms.motif_rate = 0.3 + 0.6 * rng.unit();
    const synthetic::MotifGenerator gen(seed, ms);
    const std::size_t cls = rng.below(ms.classes);
    const std::size_t docs = rng.between(10, 120);
    std::string seg;
    for (std::size_t i = 0; i < docs; ++i) seg += (i ? "\n" : "") + gen.document(cls, 0, i).text;
    std::string x;
    const std::size_t target = 256 + rng.below(2000);
    for (std::size_t i = 0; x.size() < target; ++i) x += (i ? "\n" : "") + gen.document(cls, 1, i).text;
    for (auto mode : {DictionaryMode::trained, DictionaryMode::raw}) {
      for (const auto& b : {Backend::zstd(3), Backend::reference_lz()}) {
        const DictCompressor dc(b, train_dictionary(b, seg, span_for(seg), mode));
        EXPECT_LT(dc.compressed_size(x), compressed_size(b, x))
            << "seed " << seed << " " << to_string(b.kind) << "/" << to_string(mode);
      }
    }
  }
}

TEST(DictCompressedSize, ConcurrentCallsMatchSerial) {
  const std::string seg = wordy(1, 30000, 'a', 10);
  const DictCompressor dc(Backend::zstd(3), train_dictionary(Backend::zstd(3), seg, span_for(seg)));
  std::vector<std::string> inputs;
  for (std::uint64_t i = 0; i < 64; ++i) inputs.push_back(wordy(50 + i, 200 + 37 * i, 'a', 10 + i % 5));
  std::vector<std::size_t> serial(inputs.size()), parallel(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) serial[i] = dc.compressed_size(inputs[i]);
  parallel_for(inputs.size(), 8, [&](std::size_t i) { parallel[i] = dc.compressed_size(inputs[i]); });
  EXPECT_EQ(serial, parallel);
}

TEST(Ncd, StubbedSizesFollowTheDefinition) {
  EXPECT_DOUBLE_EQ(ncd_from_sizes(100, 80, 150), (150.0 - 80.0) / 100.0);
  EXPECT_DOUBLE_EQ(ncd_from_sizes(80, 100, 150), 0.7);
  EXPECT_DOUBLE_EQ(ncd_from_sizes(10, 10, 10), 0.0);
  EXPECT_THROW(ncd_from_sizes(0, 0, 5), ValidationError);

  // x is placed before y when forming xy.
  std::vector<std::string> seen;
  auto stub = [&](ByteView s) {
    seen.emplace_back(s);
    return s.size() * 2;
  };
  EXPECT_DOUBLE_EQ(ncd(stub, "ab", "cde"), (10.0 - 4.0) / 6.0);
  EXPECT_NE(std::find(seen.begin(), seen.end(), "abcde"), seen.end());
  EXPECT_THROW(ncd(stub, "", "x"), ValidationError);
}

TEST(Ncd, SelfDistanceIsSmall) {
  const std::string x = repeat("pattern-", 625);  // 5000 bytes
  ASSERT_EQ(x.size(), 5000u);
  for (const auto& b : kAllBackends) {
    const double d = ncd(b, x, x);
    EXPECT_GE(d, 0.0) << to_string(b.kind);
    EXPECT_LE(d, 0.15) << to_string(b.kind);
  }
}

TEST(Ncd, IndependentRandomStringsAreFar) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = random_bytes(seed * 2 + 1, 2000), y = random_bytes(seed * 2 + 2, 2000);
    for (const auto& b : kAllBackends) {
      const double d = ncd(b, x, y);
      EXPECT_GE(d, 0.85) << to_string(b.kind);
      EXPECT_LE(d, 1.1) << to_string(b.kind);
    }
  }
}

// Repeated pattern with 5% of bytes replaced. Pure repeats compress to a few
// bytes under reference-lz, where NCD moves in steps of 1/C.
std::string noisy(std::string s, std::uint64_t seed) {
  StableRng rng(seed + 77);
  for (auto& c : s) {
    if (rng.unit() < 0.05) c = char('a' + rng.below(26));
  }
  return s;
}

// Property: near-symmetric and inside [-0.05, 1.15] on text-like inputs:
// motif documents (same and different classes), noisy repeated patterns, and
// pairs of independent random strings.
TEST(NcdProperty, SymmetryAndRange) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    StableRng rng(seed);
    synthetic::MotifSpec ms;
    ms.classes = rng.between(2, 6);
    const synthetic::MotifGenerator gen(seed, ms);
    auto docs = [&](std::size_t cls, std::uint64_t stream) {
      std::string s;
      const std::size_t n = rng.between(1, 10);
      for (std::size_t i = 0; i < n; ++i) s += (i ? "\n" : "") + gen.document(cls, stream, i).text;
      return s;
    };
    std::vector<std::pair<std::string, std::string>> pairs = {
        {docs(0, 1), docs(0, 2)},
        {docs(0, 1), docs(1, 2)},
        {noisy(repeat(random_text(seed, rng.between(2, 20)), 200), seed),
         noisy(repeat(random_text(seed + 1, rng.between(2, 20)), 150), seed + 1)},
        {random_bytes(seed * 2 + 1, 1500), random_bytes(seed * 2 + 2, 1500)},
    };
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
      const auto& [x, y] = pairs[pi];
      for (const auto& b : kAllBackends) {
        const double xy = ncd(b, x, y), yx = ncd(b, y, x);
        EXPECT_LE(std::fabs(xy - yx), 0.05) << "seed " << seed << " " << to_string(b.kind);
        // Reference-lz on two unrelated patterns is the mixed-statistics case below.
        if (pi == 2 && b.kind == BackendKind::reference_lz) continue;
        for (double d : {xy, yx}) {
          EXPECT_GE(d, -0.05) << "seed " << seed << " " << to_string(b.kind);
          EXPECT_LE(d, 1.15) << "seed " << seed << " pair " << pi << " " << to_string(b.kind);
        }
      }
    }
  }
}

// Inputs with unrelated symbol statistics (text next to random bytes) cost
// more together than apart, because one entropy coder must serve both. NCD
// then exceeds 1.15 on every backend. Reference-lz, with a single static code
// for the whole stream, shows the same on two unrelated noisy patterns.
// Observed maxima over these seeds: 1.26 and 1.24.
TEST(Ncd, MixedStatisticsCanExceedOne) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    StableRng rng(seed);
    const auto x = wordy(seed, rng.between(500, 3000), 'a', rng.between(3, 15));
    const auto y = random_bytes(seed, 1500);
    for (const auto& b : kAllBackends) {
      const double d = ncd(b, x, y);
      EXPECT_GT(d, 0.95) << to_string(b.kind);
      worst = std::max(worst, d);
    }
  }
  EXPECT_GT(worst, 1.15);
  EXPECT_LE(worst, 1.35);

  double ref_worst = 0.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    StableRng rng(seed);
    const auto x = noisy(repeat(random_text(seed, rng.between(2, 20)), 200), seed);
    const auto y = noisy(repeat(random_text(seed + 1, rng.between(2, 20)), 150), seed + 1);
    ref_worst = std::max(ref_worst, ncd(Backend::reference_lz(), x, y));
  }
  EXPECT_GT(ref_worst, 1.15);
  EXPECT_LE(ref_worst, 1.35);
}
