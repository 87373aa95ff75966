#include <gtest/gtest.h>

#include <set>

#include "jacobi_spectral.hpp"

using namespace jacobi_spectral;

namespace {

std::vector<double> rs(const LevelTable& t) {
  std::vector<double> out;
  for (const auto& l : t.levels()) out.push_back(l.r);
  return out;
}

Params zeros(std::size_t d) { return Params::parse(std::vector<std::string>(d, "0"), std::vector<std::string>(d, "0")); }

}  // namespace

TEST(MultiIndex, TotalDegreeAndOrdering) {
  const MultiIndex k{2, 0, 3};
  EXPECT_EQ(k.total_degree(), 5);
  EXPECT_LT((MultiIndex{0, 2}), (MultiIndex{1, 0}));
  EXPECT_EQ(k.to_string(), "(2,0,3)");
}

TEST(MultiIndex, EnumerationIsLexicographicAndComplete) {
  const auto all = enumerate_total_degree(3, 4);
  EXPECT_EQ(all.size(), 35u);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  EXPECT_EQ(std::set<MultiIndex>(all.begin(), all.end()).size(), all.size());
  for (const auto& k : enumerate_degree_shell(3, 5)) EXPECT_EQ(k.total_degree(), 5);
  EXPECT_EQ(enumerate_degree_shell(3, 5).size(), 21u);
}

TEST(Eigenvalue, Examples) {
  EXPECT_EQ(eigenvalue(MultiIndex{0, 0}, Params({0.3, 0.1}, {0.2, 0.0})), 0.0);
  EXPECT_EQ(eigenvalue(MultiIndex{3}, Params({0.0}, {0.0})), 12.0);
  EXPECT_DOUBLE_EQ(eigenvalue(MultiIndex{1, 2}, Params({0.0, 0.5}, {0.0, 0.0})), 9.0);
}

TEST(Eigenvalue, DimensionMismatch) {
  EXPECT_THROW(eigenvalue(MultiIndex{1, 2, 3}, Params({0.0, 0.5}, {0.0, 0.0})), ShapeError);
}

TEST(BuildLevels, LegendreSquareDegreeTwo) {
  const auto t = build_levels(zeros(2), 2);
  EXPECT_EQ(rs(t), (std::vector<double>{0, 2, 4, 6}));
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t.level(0).cohort, (std::vector<MultiIndex>{MultiIndex{0, 0}}));
  EXPECT_EQ(t.level(1).cohort, (std::vector<MultiIndex>{MultiIndex{0, 1}, MultiIndex{1, 0}}));
  EXPECT_EQ(t.level(2).cohort, (std::vector<MultiIndex>{MultiIndex{1, 1}}));
  EXPECT_EQ(t.level(3).cohort, (std::vector<MultiIndex>{MultiIndex{0, 2}, MultiIndex{2, 0}}));
}

TEST(BuildLevels, DegreeZeroSingleLevel) {
  const auto t = build_levels(Params({0.7}, {-0.3}), 0);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.level(0).r, 0.0);
}

TEST(BuildLevels, LegendreSquareDegreeFourCollision) {
  const auto t = build_levels(zeros(2), 4);
  std::size_t n8 = t.size(), n6 = t.size();
  for (std::size_t n = 0; n < t.size(); ++n) {
    if (t.level(n).r == 8.0) n8 = n;
    if (t.level(n).r == 6.0) n6 = n;
  }
  ASSERT_LT(n8, t.size());
  ASSERT_LT(n6, t.size());
  EXPECT_NE(n6, n8);
  EXPECT_EQ(t.level(n8).cohort, (std::vector<MultiIndex>{MultiIndex{1, 2}, MultiIndex{2, 1}}));
}

TEST(LevelOf, Examples) {
  const auto t = build_levels(zeros(2), 2);
  EXPECT_EQ(t.level_of(MultiIndex{0, 0}), 0u);
  EXPECT_EQ(t.level_of(MultiIndex{1, 1}), 2u);
  EXPECT_EQ(t.level_of(MultiIndex{0, 2}), 3u);
  EXPECT_THROW(t.level_of(MultiIndex{2, 1}), RangeError);
  EXPECT_THROW(t.level(4), RangeError);
}

TEST(LevelTable, InvariantsOnDefaults) {
  const auto t = build_levels(Params::parse({"0", "0.5"}, {"0.25", "0"}), 8);
  EXPECT_TRUE(t.grouped_exactly());
  EXPECT_EQ(t.level(0).r, 0.0);
  EXPECT_EQ(t.level(0).cohort.size(), 1u);
  std::size_t total = 0;
  for (std::size_t n = 0; n < t.size(); ++n) {
    if (n > 0) EXPECT_LT(t.level(n - 1).r, t.level(n).r);
    total += t.level(n).cohort.size();
    for (const auto& k : t.level(n).cohort) {
      EXPECT_EQ(t.level_of(k), n);
      EXPECT_NEAR(eigenvalue(k, t.params()), t.level(n).r, 1e-12);
    }
  }
  EXPECT_EQ(total, 45u);
  EXPECT_EQ(t.basis_size(), 45u);
}

TEST(LevelTable, PartitionCountsMatchBinomial) {
  const int expected[4][5] = {{0}, {1, 2, 3, 4, 5}, {1, 3, 6, 10, 15}, {1, 4, 10, 20, 35}};
  for (std::size_t d = 1; d <= 3; ++d)
    for (int N = 0; N <= 4; ++N) EXPECT_EQ(build_levels(Params(std::vector<double>(d, 0.1), std::vector<double>(d, 0.2)), N).basis_size(),
                                           static_cast<std::size_t>(expected[d][N]));
}

TEST(LevelTable, CompleteBelowWatermark) {
  // alpha=beta=0, d=2, N=2: degree 3 minimum is kappa=(1,2) or (2,1): 2 + 6 = 8.
  EXPECT_EQ(build_levels(zeros(2), 2).complete_below(), 8.0);
  const Params p({0.0, 0.5}, {0.25, 0.0});
  const auto t = build_levels(p, 5);
  double brute = INFINITY;
  for (const auto& k : enumerate_degree_shell(2, 6)) brute = std::min(brute, eigenvalue(k, p));
  EXPECT_DOUBLE_EQ(t.complete_below(), brute);
  // Every level strictly below the watermark is final.
  const auto big = build_levels(p, 12);
  for (std::size_t n = 0; n < t.complete_level_count(); ++n) EXPECT_EQ(t.level(n).cohort, big.level(n).cohort);
}

TEST(LevelTable, MonotoneEmbedding) {
  const Params p = Params::parse({"0", "1/2", "1/3"}, {"1/4", "0", "2/3"});
  for (int N = 0; N < 8; ++N) {
    const auto small = build_levels(p, N);
    const auto big = build_levels(p, N + 1);
    for (std::size_t n = 0; n < small.complete_level_count(); ++n) {
      EXPECT_EQ(small.level(n).cohort, big.level(n).cohort);
      EXPECT_EQ(small.level(n).r, big.level(n).r);
    }
  }
}

TEST(LevelTable, ExactAndToleranceGroupingAgree) {
  for (const char* v : {"0", "1/2", "1/3"}) {
    for (std::size_t d = 1; d <= 3; ++d) {
      const Params p = Params::parse(std::vector<std::string>(d, v), std::vector<std::string>(d, v));
      const auto exact = build_levels(p, 20, Grouping::exact);
      const auto tol = build_levels(p, 20, Grouping::tolerance);
      EXPECT_TRUE(exact.grouped_exactly());
      EXPECT_FALSE(tol.grouped_exactly());
      EXPECT_TRUE(detail::same_levels(exact, tol)) << v << " d=" << d;
    }
  }
}

TEST(LevelTable, ExactGroupingNeedsRationalInput) {
  EXPECT_THROW(build_levels(Params({0.1}, {0.2}), 3, Grouping::exact), ArgumentError);
}

TEST(LevelTable, RnAtLeastNForRationalFamilies) {
  for (const char* v : {"0", "1/2"})
    for (std::size_t d = 1; d <= 3; ++d)
      EXPECT_TRUE(build_levels(Params::parse(std::vector<std::string>(d, v), std::vector<std::string>(d, v)), 20)
                      .satisfies_rn_ge_n());
  EXPECT_TRUE(build_levels(Params({0.0, 0.5}, {0.25, 0.0}), 20).satisfies_rn_ge_n());
}

TEST(LevelTable, RnAtLeastNFailsForGenericThreeDimensionalParameters) {
  // Distinct eigenvalues below R grow like R^{3/2} in d = 3 when nothing collides.
  const auto t = build_levels(Params({0.0, 0.5, 0.1}, {0.25, 0.0, 0.3}), 20);
  EXPECT_FALSE(t.satisfies_rn_ge_n());
}
