#include <gtest/gtest.h>

#include <cmath>

#include "freelip/metric_space.hpp"

using namespace freelip;

namespace {

FiniteMetricSpace three_point(double dab) {
  return FiniteMetricSpace({"0", "a", "b"}, {{0, 1, 1}, {1, 0, dab}, {1, dab, 0}});
}

}  // namespace

TEST(Validate, AcceptsHubTriangle) {
  const auto rep = validate(three_point(0.1), ValidationMode::Metric);
  EXPECT_TRUE(rep.ok);
  EXPECT_TRUE(rep.violations.empty());
}

TEST(Validate, ReportsViolationWithSlack) {
  const auto rep = validate(three_point(2.5), ValidationMode::Metric);
  ASSERT_FALSE(rep.ok);
  ASSERT_EQ(rep.violations.size(), 1u);
  const auto& v = rep.violations[0];
  EXPECT_EQ(v.i, 1u);  // a
  EXPECT_EQ(v.j, 0u);  // through the base
  EXPECT_EQ(v.k, 2u);  // b
  EXPECT_NEAR(v.slack, 0.5, 1e-15);
}

TEST(Validate, ReportsEveryViolation) {
  // Two long sides: d(a,b)=5 and d(a,c)=5 both exceed the path through 0.
  const FiniteMetricSpace s({"0", "a", "b", "c"},
                            {{0, 1, 1, 1}, {1, 0, 5, 5}, {1, 5, 0, 1}, {1, 5, 1, 0}});
  const auto rep = validate(s, ValidationMode::Metric);
  EXPECT_FALSE(rep.ok);
  // (a,0,b) and (a,0,c); the routes through c and b are long enough.
  EXPECT_EQ(rep.violations.size(), 2u);
}

TEST(Validate, MetricSpaceIsHalfMetric) {
  EXPECT_TRUE(validate(three_point(0.1), ValidationMode::PMetric, 0.5).ok);
}

TEST(Validate, HalfMetricNeedNotBeMetric) {
  const FiniteMetricSpace s = three_point(2.5);
  EXPECT_FALSE(validate(s, ValidationMode::Metric).ok);
  // sqrt(2.5) = 1.58 <= 2.
  EXPECT_TRUE(validate(s, ValidationMode::PMetric, 0.5).ok);
}

TEST(Validate, RejectsBadP) {
  EXPECT_THROW(validate(three_point(0.1), ValidationMode::PMetric, 0.0), ContractError);
  EXPECT_THROW(validate(three_point(0.1), ValidationMode::PMetric, 1.5), ContractError);
}

TEST(Construction, StructuralErrors) {
  EXPECT_THROW(FiniteMetricSpace({"0", "a"}, {{0, 1}}), StructuralError);
  EXPECT_THROW(FiniteMetricSpace({"0", "a"}, {{0, 1}, {1}}), StructuralError);
  EXPECT_THROW(FiniteMetricSpace({"0", "0"}, {{0, 1}, {1, 0}}), StructuralError);
  EXPECT_THROW(FiniteMetricSpace({}, {}), StructuralError);
}

TEST(Construction, DataErrors) {
  EXPECT_THROW(FiniteMetricSpace({"0", "a"}, {{0, 1}, {2, 0}}), DataError);
  EXPECT_THROW(FiniteMetricSpace({"0", "a"}, {{0, -1}, {-1, 0}}), DataError);
  EXPECT_THROW(FiniteMetricSpace({"0", "a"}, {{0, NAN}, {NAN, 0}}), DataError);
  EXPECT_THROW(FiniteMetricSpace({"0", "a"}, {{0, 0}, {0, 0}}), DataError);
  EXPECT_THROW(FiniteMetricSpace({"0", "a"}, {{1, 1}, {1, 0}}), DataError);
}

TEST(Snowflake, IdentityAtOne) {
  const auto s = three_point(0.1);
  const auto t = snowflake(s, 1.0);
  EXPECT_EQ(t.matrix(), s.matrix());
  EXPECT_EQ(t.labels(), s.labels());
}

TEST(Snowflake, SquareRoot) {
  const FiniteMetricSpace s({"0", "a", "b"}, {{0, 3, 3}, {3, 0, 4}, {3, 4, 0}});
  EXPECT_DOUBLE_EQ(snowflake(s, 0.5).d(1, 2), 2.0);
}

TEST(Snowflake, RandomSpaceStaysMetric) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_space(7, seed);
    EXPECT_TRUE(validate(snowflake(s, 0.7), ValidationMode::Metric).ok) << seed;
  }
}

TEST(Snowflake, Errors) {
  EXPECT_THROW(snowflake(three_point(0.1), 0.0), ContractError);
  EXPECT_THROW(snowflake(three_point(0.1), 1.2), ContractError);
  EXPECT_THROW(snowflake(three_point(2.5), 0.5), ContractError);
}

TEST(Snowflake, ComposesMultiplicatively) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = random_space(6, seed, seed % 2 ? Generator::Euclidean : Generator::UniformShortestPath, 3);
    const double a = 0.3 + 0.07 * static_cast<double>(seed % 10), b = 0.9 - 0.05 * static_cast<double>(seed % 7);
    const auto twice = snowflake(snowflake(s, a), b);
    const auto once = snowflake(s, a * b);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        EXPECT_NEAR(twice.d(i, j), once.d(i, j), 1e-12 * std::max(1.0, once.d(i, j)));
  }
}

TEST(RandomSpace, TwoPoints) {
  const auto s = random_space(2, 99);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_GT(s.d(0, 1), 0.0);
  EXPECT_LE(s.d(0, 1), 1.0);
}

TEST(RandomSpace, Deterministic) {
  for (auto gen : {Generator::UniformShortestPath, Generator::Euclidean}) {
    const auto a = random_space(8, 1234, gen, 3);
    const auto b = random_space(8, 1234, gen, 3);
    EXPECT_EQ(a.matrix(), b.matrix());  // bit-for-bit
    EXPECT_NE(a.matrix(), random_space(8, 1235, gen, 3).matrix());
  }
}

TEST(RandomSpace, SeededInstancePassesValidation) {
  EXPECT_TRUE(validate(random_space(6, 42), ValidationMode::Metric).ok);
}

TEST(RandomSpace, RejectsTinyN) { EXPECT_THROW(random_space(1, 0), ContractError); }

// Every metric space is a p-metric space for every p in (0, 1].
TEST(Property, MetricImpliesPMetric) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const auto gen = seed % 3 == 0 ? Generator::Euclidean : Generator::UniformShortestPath;
    const auto s = random_space(3 + seed % 7, seed, gen, 1 + seed % 4);
    ASSERT_TRUE(validate(s, ValidationMode::Metric).ok);
    for (double p : {0.1, 0.25, 0.5, 0.75, 1.0}) EXPECT_TRUE(validate(s, ValidationMode::PMetric, p).ok) << seed;
    ++checked;
  }
  EXPECT_GE(checked, 100);
}

TEST(Space, IdsAreDistinct) {
  const auto a = three_point(0.1), b = three_point(0.1);
  EXPECT_NE(a.id(), b.id());
  EXPECT_EQ(a.index_of("b"), 2u);
  EXPECT_THROW(a.index_of("zz"), ContractError);
}
