#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "patentrec/bm25.hpp"
#include "patentrec/synthetic.hpp"
#include "test_util.hpp"

namespace patentrec {
namespace {

using testing::make_record;

TEST(Bm25Idf, PositiveEvenForUbiquitousTerms) {
  EXPECT_NEAR(bm25_idf(10, 1), std::log(1.0 + 9.5 / 1.5), 1e-15);
  EXPECT_GT(bm25_idf(10, 10), 0.0);
  EXPECT_GT(bm25_idf(10, 3), bm25_idf(10, 4));
}

CorpusStore tiny() {
  return CorpusStore({make_record("Q", "orbit thruster", "ion thruster for orbit raising"),
                      make_record("A", "orbit", "orbit orbit keeping"),
                      make_record("B", "thruster", "ion thruster nozzle design"),
                      make_record("C", "antenna", "phased antenna array"),
                      make_record("D", "antenna", "phased antenna array")});
}

TEST(Bm25Index, LengthsAndFrequencies) {
  const CorpusStore store = tiny();
  const std::vector<PatentId> pool = {"A", "B", "C", "D"};
  const Bm25Index index = build_bm25(store, pool);
  EXPECT_EQ(index.doc_length(0), 4u);  // orbit orbit orbit keeping
  EXPECT_NEAR(index.average_length(), (4.0 + 5.0 + 4.0 + 4.0) / 4.0, 1e-15);
  EXPECT_EQ(index.doc_freq("antenna"), 2u);
  EXPECT_EQ(index.doc_freq("missing"), 0u);
  EXPECT_EQ(index.term_count(0, "orbit"), 3u);
  EXPECT_EQ(index.term_count(1, "orbit"), 0u);
  EXPECT_THROW(build_bm25(store, std::vector<PatentId>{}), ValidationError);
}

TEST(Bm25Rank, HandComputedScore) {
  const CorpusStore store = tiny();
  const std::vector<PatentId> pool = {"A", "B", "C", "D"};
  const Bm25Index index = build_bm25(store, pool);
  const RankedList r = bm25_rank(index, store.record("Q"), 10);
  ASSERT_EQ(r.items.size(), 4u);
  // A: "orbit" tf 3, len 4, avgdl 4.25.
  const double norm_a = 1.2 * (0.25 + 0.75 * 4.0 / 4.25);
  const double expected_a = bm25_idf(4, 1) * 3.0 * 2.2 / (3.0 + norm_a);
  const auto it = std::find_if(r.items.begin(), r.items.end(), [](auto& s) { return s.id == "A"; });
  ASSERT_NE(it, r.items.end());
  EXPECT_NEAR(it->score, expected_a, 1e-12);
  // Unmatched documents tie at zero and are ordered by id.
  EXPECT_EQ(r.items[2].id, "C");
  EXPECT_EQ(r.items[3].id, "D");
  EXPECT_EQ(r.items[3].score, 0.0);
}

TEST(Bm25Rank, ExcludesQueryAndRespectsK) {
  const CorpusStore store = tiny();
  const std::vector<PatentId> pool = {"Q", "A", "B", "C", "D"};
  const Bm25Index index = build_bm25(store, pool);
  const RankedList r = bm25_rank(index, store.record("Q"), 2);
  ASSERT_EQ(r.items.size(), 2u);
  for (const auto& item : r.items) EXPECT_NE(item.id, "Q");
  EXPECT_EQ(bm25_rank(index, store.record("Q"), 10, {"A"}).items.size(), 3u);
  EXPECT_THROW(bm25_rank(index, store.record("Q"), 0), ValidationError);
}

TEST(Bm25Rank, DuplicateQueryTermsCountOnce) {
  const CorpusStore store = tiny();
  const std::vector<PatentId> pool = {"A", "B", "C", "D"};
  const Bm25Index index = build_bm25(store, pool);
  const PatentRecord once = make_record("X", "orbit", "nothing");
  const PatentRecord thrice = make_record("Y", "orbit orbit", "orbit nothing");
  EXPECT_EQ(bm25_rank(index, once, 4).items, bm25_rank(index, thrice, 4).items);
}

TEST(Bm25Rank, MatchesFormulaOracleExactly) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SyntheticSpec spec;
    spec.n_clusters = 4;
    spec.per_cluster = 25;
    spec.seed = seed;
    const CorpusStore store = generate_synthetic(spec);
    std::vector<PatentId> pool;
    for (const auto& r : store.records()) pool.push_back(r.id);
    const Bm25Index index = build_bm25(store, pool);
    for (std::size_t q = 0; q < store.size(); q += 9) {
      const PatentRecord& query = store.records()[q];
      EXPECT_EQ(bm25_rank(index, query, 100), testing::naive_bm25_rank(store, pool, query, 100));
    }
  }
}

}  // namespace
}  // namespace patentrec
