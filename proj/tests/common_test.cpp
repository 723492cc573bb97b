#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "patentrec/common.hpp"

namespace patentrec {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, DerivedStreamsDiffer) {
  EXPECT_NE(Rng::derive(1, 0), Rng::derive(1, 1));
  EXPECT_NE(Rng::derive(1, 5), Rng::derive(2, 5));
  EXPECT_EQ(Rng::derive(9, 3), Rng::derive(9, 3));
}

TEST(Rng, UniformIndexStaysInRangeAndCoversIt) {
  Rng rng(7);
  std::set<std::size_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const std::size_t v = rng.uniform_index(10);
    ASSERT_LT(v, 10u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 10u);
  EXPECT_THROW(rng.uniform_index(0), std::invalid_argument);
}

TEST(Rng, UniformRealRange) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-2.0, 5.0);
    ASSERT_GE(v, -2.0);
    ASSERT_LT(v, 5.0);
  }
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng rng(11);
  std::vector<int> items(50);
  for (int i = 0; i < 50; ++i) items[i] = i;
  rng.shuffle(items);
  std::vector<int> sorted = items;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Fingerprint, StableAndSensitive) {
  Fingerprint a;
  a.add("abc");
  Fingerprint b;
  b.add("abc");
  EXPECT_EQ(a.hex(), b.hex());
  EXPECT_EQ(a.hex().size(), 16u);
  b.add(std::uint64_t{1});
  EXPECT_NE(a.hex(), b.hex());
  // FNV-1a of the empty input is the offset basis.
  EXPECT_EQ(Fingerprint().hex(), "cbf29ce484222325");
}

TEST(HexFloat, RoundTripsExactly) {
  const double values[] = {0.0, -0.0, 1.0, -3.25, 0.1, 1e-300, 6.02214076e23,
                           std::numeric_limits<double>::denorm_min(),
                           std::numeric_limits<double>::max()};
  for (double v : values) {
    const double back = parse_hex(format_hex(v));
    EXPECT_EQ(std::signbit(back), std::signbit(v));
    EXPECT_EQ(back, v) << format_hex(v);
  }
  EXPECT_THROW(parse_hex("zz"), ParseError);
}

TEST(FormatFixed, Digits) {
  EXPECT_EQ(format_fixed(0.17424, 4), "0.1742");
  EXPECT_EQ(format_fixed(2.0, 2), "2.00");
}

TEST(ArtifactHeader, RoundTrip) {
  ArtifactHeader h{"demo", 3, {{"dim", "75"}, {"seed", "7"}}};
  std::stringstream s;
  write_header(s, h);
  const ArtifactHeader back = read_header(s, "demo", 3);
  EXPECT_EQ(back.kind, "demo");
  EXPECT_EQ(back.version, 3);
  EXPECT_EQ(back.at("dim"), "75");
  EXPECT_THROW(back.at("missing"), ArtifactError);
}

TEST(ArtifactHeader, RejectsWrongKindAndVersion) {
  ArtifactHeader h{"demo", 1, {}};
  std::stringstream a;
  write_header(a, h);
  EXPECT_THROW(read_header(a, "other", 1), ArtifactError);
  std::stringstream b;
  write_header(b, h);
  EXPECT_THROW(read_header(b, "demo", 2), ArtifactError);
  std::stringstream c("hello world\n");
  EXPECT_THROW(read_header(c, "demo", 1), ArtifactError);
  std::stringstream d;
  EXPECT_THROW(read_header(d, "demo", 1), ArtifactError);
}

TEST(SplitWhitespace, Tokens) {
  const auto parts = split_whitespace("  a\tbb   c ");
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[0], "a");
  EXPECT_EQ(parts[1], "bb");
  EXPECT_EQ(parts[2], "c");
}

TEST(RanksBefore, ScoreThenId) {
  EXPECT_TRUE(ranks_before({"b", 0.9}, {"a", 0.5}));
  EXPECT_TRUE(ranks_before({"a", 0.5}, {"b", 0.5}));
  EXPECT_FALSE(ranks_before({"b", 0.5}, {"a", 0.5}));
}

TEST(RankedRows, RoundTrip) {
  std::vector<RankedList> lists = {{"q1", {{"a", 0.75}, {"b", 0.1}}}, {"q2", {{"c", 1.0 / 3.0}}}};
  std::stringstream s;
  write_ranked_rows(s, lists);
  EXPECT_EQ(read_ranked_rows(s), lists);
}

TEST(RankedRows, RejectsBrokenRanks) {
  std::stringstream s("q\t2\ta\t0.5\n");
  EXPECT_THROW(read_ranked_rows(s), ParseError);
  std::stringstream t("q\t1\ta\n");
  EXPECT_THROW(read_ranked_rows(t), ParseError);
}

TEST(Errors, KindsAndLinePrefix) {
  ParseError e("bad json", 12);
  EXPECT_EQ(e.kind(), "parse");
  EXPECT_EQ(e.line(), 12u);
  EXPECT_EQ(std::string(e.what()), "line 12: bad json");
  EXPECT_EQ(ValidationError("x").kind(), "invalid");
  EXPECT_EQ(ArtifactError("x").kind(), "artifact");
  EXPECT_EQ(NumericError("x").kind(), "numeric");
}

}  // namespace
}  // namespace patentrec
