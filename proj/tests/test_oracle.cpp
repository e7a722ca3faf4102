// reference values computed by brute force; the library is checked against these
#include <bohrrec/oracle.hpp>

#include <gtest/gtest.h>

using namespace bohrrec;

TEST(OracleCells, BinaryDim8Radius1)
{
  auto T = oracle::enumerate_cells(2, 8, 1);
  ASSERT_EQ(T.subsets.size(), 2u);
  // {0}: at least 6 zeros, C(8,6)+C(8,7)+C(8,8)
  EXPECT_EQ(T.cell_size[0], 37u);
  EXPECT_EQ(T.count_E, 74u);
  EXPECT_EQ(T.count_E0, 37u);
  ASSERT_EQ(T.reps.size(), 1u);
  EXPECT_EQ(T.subsets[T.reps[0]], (std::vector<unsigned>{0}));
}

TEST(OracleCells, EveryVectorInAtMostOneCell)
{
  for (unsigned p : {2u, 3u, 5u})
    for (std::size_t d = 1; d <= (p == 5 ? 3u : 5u); ++d)
      for (std::size_t k = 0; k <= 2; ++k) {
        auto T = oracle::enumerate_cells(p, d, k);
        for (int h : T.cells_hit) EXPECT_LE(h, 1);
      }
}

TEST(OracleCells, TernaryReps)
{
  auto T = oracle::enumerate_cells(3, 2, 0);
  std::vector<std::vector<unsigned>> reps;
  for (auto i : T.reps) reps.push_back(T.subsets[i]);
  std::sort(reps.begin(), reps.end());
  EXPECT_EQ(reps, (std::vector<std::vector<unsigned>>{{0}, {0, 1}}));
}

TEST(OracleCells, FrozenSmallCounts)
{
  // p = 3, d = 4, k = 1 leaves only the constant vectors
  EXPECT_EQ(oracle::enumerate_cells(3, 4, 1).count_E, 3u);
  EXPECT_EQ(oracle::enumerate_cells(2, 5, 2).count_E, 2u);
  EXPECT_EQ(oracle::enumerate_cells(2, 4, 2).count_E, 0u);
  EXPECT_EQ(oracle::enumerate_cells(2, 7, 2).count_E0, 8u);
}

TEST(OracleCells, CapEnforced) { EXPECT_THROW(oracle::enumerate_cells(3, 30, 1), oracle::OracleCapError); }

TEST(OracleAvoid, SpotValues)
{
  EXPECT_EQ(oracle::exhaustive_avoiding({1, 2}, 9), 3u);
  EXPECT_EQ(oracle::exhaustive_avoiding({1}, 10), 5u);
  EXPECT_EQ(oracle::exhaustive_avoiding({1}, 1), 0u);
  EXPECT_EQ(oracle::exhaustive_avoiding({-1}, 2), 1u);
  EXPECT_EQ(oracle::exhaustive_avoiding({3}, 6), 3u);
  EXPECT_THROW(oracle::exhaustive_avoiding({1}, 25), oracle::OracleCapError);
}

TEST(OracleGrid, ShiftByOne)
{
  auto g = oracle::grid_margin({1}, 1, 4096);
  EXPECT_EQ(g.sample_max, make_rational(1, 2));
}

TEST(OracleGrid, OneTwoNearOneThird)
{
  auto g = oracle::grid_margin({1, 2}, 1, 4096);
  EXPECT_LE(g.sample_max, make_rational(1, 3));
  EXPECT_GE(g.upper, make_rational(1, 3));
  EXPECT_LT(g.upper - g.sample_max, make_rational(1, 1000));
}

TEST(OracleRaster, HammingBall)
{
  BoxUnion u = approx_hamming(2, 1, make_rational(1, 4));
  auto r = oracle::rasterize(u, 64);
  // the cell centers never touch the arc ends at m = 64
  EXPECT_EQ(r.estimate, make_rational(3, 4));
}
