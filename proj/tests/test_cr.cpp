#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace lftc;
using lftc::testing::make_corpus;
using lftc::testing::random_text;

namespace {

Corpus counted(const std::map<std::string, std::size_t>& counts, std::uint64_t seed = 0) {
  std::vector<LabeledText> samples;
  std::size_t i = 0;
  // Interleave classes so gold indices are not a contiguous block.
  bool more = true;
  for (std::size_t round = 0; more; ++round) {
    more = false;
    for (const auto& [label, n] : counts) {
      if (round < n) {
        samples.push_back({label, random_text(seed * 1000 + i++, 200, 'a', 12)});
        more = true;
      }
    }
  }
  return make_corpus(samples);
}

CandidatePair pair_of(const ClassId& p, const ClassId& q) { return {p, q, {}}; }

std::vector<NcdNeighbor> neighbors(std::initializer_list<std::pair<double, const char*>> list) {
  std::vector<NcdNeighbor> out;
  for (const auto& [d, l] : list) out.push_back({d, l, out.size()});
  return out;
}

std::shared_ptr<const Corpus> shared(Corpus c) { return std::make_shared<const Corpus>(std::move(c)); }

}  // namespace

TEST(ExtractGold, FiltersToThePair) {
  const auto c = counted({{"p", 5}, {"q", 7}, {"r", 9}});
  const auto gold = extract_gold(c, pair_of("p", "q"));
  EXPECT_EQ(gold.size(), 12u);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& label = c[gold.corpus_indices[i]].label;
    EXPECT_TRUE(label == "p" || label == "q");
    if (i) {
      EXPECT_LT(gold.corpus_indices[i - 1], gold.corpus_indices[i]);
    }
  }
  EXPECT_EQ(gold.source.first, "p");
}

TEST(ExtractGold, MissingSecondClassLeavesOnlyFirst) {
  const auto c = counted({{"p", 3}, {"r", 4}});
  const auto gold = extract_gold(c, pair_of("p", "q"));
  EXPECT_EQ(gold.size(), 3u);
  NcdReference ref(shared(c), Backend::deflate(6));
  const auto r = centralized_reason(ref, pair_of("p", "q"), "query text", {3, Backend::deflate(6)});
  EXPECT_EQ(r.label, "p");
  EXPECT_FALSE(r.fallback);
  EXPECT_EQ(r.ncd_calls, 3u);
}

TEST(ExtractGold, EmptyGoldFallsBackToFirst) {
  const auto c = counted({{"r", 4}});
  EXPECT_THROW(extract_gold(c, pair_of("p", "q")), EmptyGoldError);
  NcdReference ref(shared(c), Backend::deflate(6));
  const auto r = centralized_reason(ref, pair_of("p", "q"), "query", {});
  EXPECT_EQ(r.label, "p");
  EXPECT_TRUE(r.fallback);
  EXPECT_EQ(r.ncd_calls, 0u);
}

TEST(NcdDistances, ExactCopyIsStrictlyNearest) {
  const std::string query = random_text(999, 400, 'a', 10);
  for (std::size_t where : {0u, 7u, 20u}) {
    std::vector<LabeledText> samples;
    for (std::uint64_t i = 0; i < 20; ++i) samples.push_back({"p", random_text(i, 400, 'a', 10)});
    samples.insert(samples.begin() + std::ptrdiff_t(where), {"q", query});
    const auto c = make_corpus(samples);
    NcdReference ref(shared(c), Backend::deflate(6));
    const auto gold = extract_gold(c, pair_of("p", "q"));
    const auto d = ncd_distances(query, gold, ref);
    ASSERT_EQ(d.size(), 21u);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (i != where) {
        EXPECT_LT(d[where].distance, d[i].distance) << i;
      }
    }
    EXPECT_EQ(knn_decide(d, {1, Backend::deflate(6)}), "q");
  }
}

TEST(NcdDistances, SingleGoldSample) {
  const auto c = make_corpus({{"p", "only sample"}});
  NcdReference ref(shared(c), Backend::deflate(6));
  const auto d = ncd_distances("query", extract_gold(c, pair_of("p", "q")), ref);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].label, "p");
  EXPECT_EQ(d[0].index, 0u);
  EXPECT_TRUE(std::isfinite(d[0].distance));
}

TEST(NcdDistances, CachedMatchesUncachedAndIsDeterministic) {
  const auto c = counted({{"p", 10}, {"q", 10}, {"r", 5}});
  const KnnConfig cfg{1, Backend::deflate(6)};
  NcdReference ref(shared(c), cfg.backend, 4);
  const auto gold = extract_gold(c, pair_of("q", "p"));
  const std::string query = random_text(4242, 300, 'a', 12);
  const auto cached = ncd_distances(query, gold, ref);
  EXPECT_EQ(cached, ncd_distances(query, c, gold, cfg));
  EXPECT_EQ(cached, ncd_distances(query, gold, ref, 8));
  EXPECT_EQ(cached, ncd_distances(query, gold, ref));
  for (std::size_t i = 0; i < cached.size(); ++i) {
    EXPECT_DOUBLE_EQ(cached[i].distance, ncd(cfg.backend, query, c[gold.corpus_indices[i]].text));
  }
  EXPECT_THROW(ncd_distances("", gold, ref), ValidationError);
}

TEST(KnnDecide, Examples) {
  const KnnConfig k1{1, {}}, k2{2, {}}, k3{3, {}};
  EXPECT_EQ(knn_decide(neighbors({{0.4, "p"}, {0.2, "q"}}), k1), "q");
  EXPECT_EQ(knn_decide(neighbors({{0.1, "p"}, {0.2, "q"}}), k2), "p");
  EXPECT_EQ(knn_decide(neighbors({{0.1, "p"}, {0.2, "q"}, {0.3, "q"}}), k3), "q");
  EXPECT_EQ(knn_decide(neighbors({{0.5, "p"}, {0.2, "p"}, {0.9, "p"}}), k3), "p");
  EXPECT_THROW(knn_decide({}, k1), ValidationError);
  EXPECT_THROW(knn_vote(neighbors({{0.1, "p"}}), 0), ValidationError);
}

TEST(KnnDecide, TieGoesToClosestEvenOutsideTheLeaders) {
  // k=5: p,q,q,r,r -> q and r tie on 2 votes, closest neighbour is p.
  const auto d = knn_vote(neighbors({{0.1, "p"}, {0.2, "q"}, {0.3, "q"}, {0.4, "r"}, {0.5, "r"}}), 5);
  EXPECT_TRUE(d.tie);
  EXPECT_EQ(d.label, "p");
  ASSERT_EQ(d.nearest.size(), 5u);
  EXPECT_EQ(d.nearest.front().distance, 0.1);
}

TEST(KnnDecide, EqualDistancesRankByIndex) {
  auto n = neighbors({{0.3, "q"}, {0.3, "p"}});
  EXPECT_EQ(knn_decide(n, {1, {}}), "q");
  std::swap(n[0].label, n[1].label);
  EXPECT_EQ(knn_decide(n, {1, {}}), "p");
}

TEST(KnnDecide, KLargerThanNeighbourCount) {
  const auto d = knn_vote(neighbors({{0.2, "p"}, {0.1, "q"}, {0.3, "p"}}), 10);
  EXPECT_EQ(d.label, "p");
  EXPECT_EQ(d.nearest.size(), 3u);
}

// Property: equal to the brute-force oracle, the label is always present, and
// scaling distances by a positive constant changes nothing.
TEST(KnnProperty, MatchesOracle) {
  StableRng rng(31337);
  const std::size_t ks[] = {1, 2, 3, 5};
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = rng.between(1, 12);
    const std::size_t labels = rng.between(1, 4);
    std::vector<NcdNeighbor> mine;
    std::vector<oracle::Neighbor> theirs;
    std::set<std::string> present;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse distances produce plenty of exact ties.
      const double d = double(rng.below(8)) / 8.0;
      const std::string label(1, char('p' + rng.below(labels)));
      mine.push_back({d, label, i});
      theirs.push_back({d, label, i});
      present.insert(label);
    }
    // Shuffle input order; ranking depends only on (distance, index).
    rng.shuffle(mine);
    for (std::size_t k : ks) {
      const auto got = knn_decide(mine, {k, {}});
      ASSERT_EQ(got, oracle::knn(theirs, k)) << "trial " << t << " k " << k;
      ASSERT_TRUE(present.count(got));
      auto scaled = mine;
      const double c = 0.5 + rng.unit() * 10.0;
      for (auto& s : scaled) s.distance *= c;
      ASSERT_EQ(knn_decide(scaled, {k, {}}), got);
    }
  }
}

// Property: the CR decision is one of the pair, and with all-distinct
// distances it does not depend on the gold order.
TEST(CentralizedReasonProperty, LabelInPairAndOrderInvariant) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    StableRng rng(seed);
    std::vector<LabeledText> samples;
    const char* labels[] = {"p", "q", "r", "s"};
    const std::size_t n = rng.between(4, 24);
    for (std::size_t i = 0; i < n; ++i) {
      samples.push_back({labels[rng.below(4)], random_text(seed * 100 + i, rng.between(50, 400), 'a', 8)});
    }
    const auto c = make_corpus(samples);
    const std::string query = random_text(seed + 5555, 300, 'a', 8);
    const std::size_t k = 1 + rng.below(5);
    const KnnConfig cfg{k, Backend::deflate(6)};
    NcdReference ref(shared(c), cfg.backend);
    const auto pair = pair_of(labels[rng.below(4)], labels[rng.below(4)]);
    const auto r = centralized_reason(ref, pair, query, cfg);
    EXPECT_TRUE(r.label == pair.first || r.label == pair.second);
    EXPECT_EQ(r.label, centralized_reason(ref, pair, query, cfg, 4).label);
    if (r.fallback) continue;

    auto dist = ncd_distances(query, extract_gold(c, pair), ref);
    std::set<double> distinct;
    for (const auto& d : dist) distinct.insert(d.distance);
    if (distinct.size() != dist.size()) continue;
    auto permuted = dist;
    rng.shuffle(permuted);
    for (std::size_t i = 0; i < permuted.size(); ++i) permuted[i].index = i;
    EXPECT_EQ(knn_decide(permuted, cfg), knn_decide(dist, cfg));
  }
}

TEST(CentralizedReason, ExactCopyOfSecondClassSample) {
  const auto c = counted({{"p", 8}, {"q", 8}}, 3);
  const std::string query = c.samples()[5].text;
  const ClassId truth = c.samples()[5].label;
  NcdReference ref(shared(c), Backend::deflate(6));
  const auto r = centralized_reason(ref, pair_of(truth == "p" ? "q" : "p", truth), query, {1, Backend::deflate(6)});
  EXPECT_EQ(r.label, truth);
  EXPECT_EQ(r.ncd_calls, 16u);
  ASSERT_EQ(r.nearest.size(), 1u);
}

TEST(CentralizedReason, ConcatenatedGoldDiagnostic) {
  const auto c = counted({{"p", 4}, {"q", 4}});
  NcdReference ref(shared(c), Backend::deflate(6));
  const double d = gold_concat_ncd("some query", extract_gold(c, pair_of("p", "q")), ref);
  EXPECT_TRUE(std::isfinite(d));
}
