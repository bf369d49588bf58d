#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "spareopt/csv.hpp"
#include "spareopt/error.hpp"
#include "spareopt/rng.hpp"

using namespace spareopt;

TEST(Rng, SameSeedSameSequence) {
  Rng a(7), b(7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, SplitDependsOnSeedNotState) {
  Rng a(99);
  const Rng before = a.split("demand");
  for (int i = 0; i < 10; ++i) a.next_u64();
  Rng after = a.split("demand");
  Rng copy = before;
  EXPECT_EQ(copy.next_u64(), after.next_u64());
}

TEST(Rng, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, "rep", i));
  seen.insert(derive_seed(42, "other", 0));
  seen.insert(derive_seed(43, "rep", 0));
  EXPECT_EQ(seen.size(), 1002u);
}

TEST(Rng, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Rng, UniformIntCoversRangeInclusive) {
  Rng r(3);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.uniform_int(-2, 2);
    ASSERT_GE(v, -2);
    ASSERT_LE(v, 2);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_EQ(r.uniform_int(4, 4), 4);
}

TEST(Rng, DistributionMomentsRoughlyRight) {
  Rng r(11);
  const int n = 200000;
  double sn = 0, sn2 = 0, se = 0, sg = 0, sp = 0, su = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.standard_normal();
    sn += z;
    sn2 += z * z;
    se += r.exponential(2.0);
    sg += r.gamma(0.5, 3.0);
    sp += static_cast<double>(r.poisson(4.5));
    su += r.uniform01();
  }
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.015);
  EXPECT_NEAR(se / n, 2.0, 0.02);
  EXPECT_NEAR(sg / n, 1.5, 0.02);
  EXPECT_NEAR(sp / n, 4.5, 0.02);
  EXPECT_NEAR(su / n, 0.5, 0.005);
}

TEST(Rng, LargePoissonMean) {
  Rng r(5);
  double s = 0;
  for (int i = 0; i < 20000; ++i) s += static_cast<double>(r.poisson(900.0));
  EXPECT_NEAR(s / 20000, 900.0, 1.0);
}

TEST(Csv, ParsesAndSkipsCommentsAndBlankLines) {
  const auto t = parse_csv("a,b\n# note\n\n1,2\r\n3,4\n");
  ASSERT_EQ(t.header.size(), 2u);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1][0], "3");
  EXPECT_EQ(t.column("b", "t"), 1u);
  EXPECT_THROW(t.column("zz", "t"), ConfigError);
}

TEST(Csv, QuotedFieldsRoundTrip) {
  const std::string field = R"({"a":1,"b":"x"})";
  const auto t = parse_csv("k,v\nrow," + csv_quote(field) + "\n");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][1], field);
}

TEST(Csv, RaggedRowRejected) { EXPECT_THROW(parse_csv("a,b\n1\n"), ConfigError); }

TEST(Csv, MalformedQuotesRejected) {
  EXPECT_THROW(parse_csv("a,b\n\"x,1\n"), ConfigError);
  EXPECT_THROW(parse_csv("a,b\n\"x\"y,1\n"), ConfigError);
  EXPECT_EQ(parse_csv("a,b\n \"x,\"\"y\"\"\" ,1\n").rows[0][0], "x,\"y\"");
}

TEST(Csv, NumberFormattingRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) {
    EXPECT_EQ(parse_number(format_number(v), "t"), v);
  }
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(17.0), "17");
  EXPECT_THROW(parse_number("abc", "t"), ConfigError);
  EXPECT_THROW(parse_number("1.5x", "t"), ConfigError);
}

TEST(Csv, IdentifierCheck) {
  EXPECT_NO_THROW(check_csv_identifier("SP-0001"));
  EXPECT_THROW(check_csv_identifier("a,b"), InvalidInput);
  EXPECT_THROW(check_csv_identifier("a\"b"), InvalidInput);
}
