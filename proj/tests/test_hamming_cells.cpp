#include "laws.hpp"

#include <gtest/gtest.h>

using namespace bohrrec;

namespace {

GpVector with_counts(const std::vector<std::size_t> &w)
{
  GpVector x{static_cast<unsigned>(w.size()), {}};
  for (unsigned t = 0; t < w.size(); ++t) x.coords.insert(x.coords.end(), w[t], t);
  return x;
}

GpVector zeros_then_ones(std::size_t zeros, std::size_t d)
{
  GpVector x{2, std::vector<unsigned>(d, 1)};
  for (std::size_t j = 0; j < zeros; ++j) x.coords[j] = 0;
  return x;
}

} // namespace

TEST(Weights, Small)
{
  GpVector x{3, {0, 0, 1}};
  EXPECT_EQ(weight_at(x, 0), 2u);
  EXPECT_EQ(weight_at(x, 0) + weight_at(x, 1) + weight_at(x, 2), 3u);
  EXPECT_EQ(weight(x), 1u);
}

TEST(Weights, LargeTernary)
{
  auto x = with_counts({1006, 1006, 988});
  EXPECT_EQ(x.d(), 3000u);
  EXPECT_EQ(weight_at(x, 2), 988u);
}

TEST(Weights, RandomSumToD)
{
  std::mt19937_64 rng(5);
  for (int it = 0; it < 50; ++it) {
    unsigned p = std::vector<unsigned>{2, 3, 5, 7}[rng() % 4];
    GpVector x{p, std::vector<unsigned>(1 + rng() % 40)};
    for (auto &c : x.coords) c = static_cast<unsigned>(rng() % p);
    std::size_t s = 0;
    for (unsigned t = 0; t < p; ++t) s += weight_at(x, t);
    EXPECT_EQ(s, x.d());
  }
}

TEST(Hamming, Contains)
{
  EXPECT_TRUE(hamming_contains(3, 4, 0, GpVector{3, {0, 0, 0, 0}}));
  EXPECT_FALSE(hamming_contains(3, 4, 1, GpVector{3, {1, 0, 2, 0}}));
  EXPECT_TRUE(hamming_contains(3, 4, 4, GpVector{3, {1, 2, 2, 1}}));
  EXPECT_THROW(hamming_contains(3, 5, 1, GpVector{3, {1, 0, 2, 0}}), std::invalid_argument);
}

TEST(Bias, ThresholdExamples)
{
  CellSpec c{3, subset_from_list(3, {0, 1}), 5, 3000};
  EXPECT_TRUE(bias_contains(c, with_counts({1006, 1006, 988})));
  EXPECT_FALSE(bias_contains(c, with_counts({1000, 1012, 988})));
  // exactly at d/p + k is not enough
  EXPECT_FALSE(bias_contains(c, with_counts({1005, 1006, 989})));
}

TEST(Bias, BinaryImpossibleWhenKLarge)
{
  for (std::size_t d = 1; d <= 8; ++d)
    for (std::size_t k = (d + 1) / 2; k <= d; ++k)
      for_each_vector(2, d, [&](const GpVector &x) { EXPECT_FALSE(bias_contains(CellSpec{2, 1, k, d}, x)); });
}

TEST(Bias, ShapeMismatchThrows)
{
  EXPECT_THROW(bias_contains(CellSpec{3, 1, 1, 4}, GpVector{3, {0, 1, 2}}), std::invalid_argument);
  EXPECT_THROW(bias_contains(CellSpec{3, 1, 1, 3}, GpVector{2, {0, 1, 1}}), std::invalid_argument);
}

TEST(Bias, LawsExhaustive)
{
  for (auto [p, d] : laws::law_instances()) {
    auto t = laws::bias_laws(p, d);
    EXPECT_EQ(t.violations, 0u) << (t.first.empty() ? "" : t.first.front());
    EXPECT_GT(t.checks, 0u);
  }
}

TEST(Transversal, Canonical)
{
  auto t3 = orbit_transversal(3);
  ASSERT_EQ(t3.reps.size(), 2u);
  EXPECT_EQ(subset_to_list(3, t3.reps[0]), (std::vector<unsigned>{0}));
  EXPECT_EQ(subset_to_list(3, t3.reps[1]), (std::vector<unsigned>{0, 1}));
  auto t2 = orbit_transversal(2);
  ASSERT_EQ(t2.reps.size(), 1u);
  EXPECT_EQ(subset_to_list(2, t2.reps[0]), (std::vector<unsigned>{0}));
  EXPECT_EQ(orbit_transversal(5).reps.size(), 6u);
  EXPECT_EQ(orbit_transversal(7).reps.size(), 18u);
  EXPECT_THROW(orbit_transversal(4), std::invalid_argument);
}

TEST(Transversal, Validity)
{
  for (unsigned p : {2u, 3u, 5u, 7u}) EXPECT_TRUE(valid_transversal(orbit_transversal(p)));
  auto t = orbit_transversal(3);
  // {1} and {0,2} are another valid choice
  Transversal other{3, {subset_from_list(3, {1}), subset_from_list(3, {0, 2})}, false};
  EXPECT_TRUE(valid_transversal(other));
  Transversal two_in_orbit{3, {subset_from_list(3, {0}), subset_from_list(3, {1})}, false};
  EXPECT_FALSE(valid_transversal(two_in_orbit));
  t.reps.pop_back();
  EXPECT_FALSE(valid_transversal(t));
}

TEST(Family, Membership)
{
  auto E0 = make_family(FamilyKind::E0, 2, 1, 8);
  auto E = make_family(FamilyKind::E, 2, 1, 8);
  EXPECT_TRUE(family_contains(E0, zeros_then_ones(6, 8)));
  EXPECT_FALSE(family_contains(E0, zeros_then_ones(2, 8)));
  EXPECT_TRUE(family_contains(E, zeros_then_ones(2, 8)));
  EXPECT_FALSE(family_contains(E, zeros_then_ones(4, 8)));
  EXPECT_FALSE(family_contains(E, zeros_then_ones(5, 8)));
}

TEST(Family, TranslateIdentityOnConstants)
{
  for (unsigned p : {2u, 3u, 5u}) {
    std::size_t d = 6;
    auto E0 = make_family(FamilyKind::E0, p, 1, d), E = make_family(FamilyKind::E, p, 1, d);
    for (unsigned n = 0; n < p; ++n) {
      GpVector x = all_ones(p, d, n), x1 = add(x, all_ones(p, d));
      // x lies in Bias({n}); x + 1 in Bias({n+1})
      EXPECT_EQ(family_cell(E, x), Subset{1} << n);
      EXPECT_EQ(family_cell(E, x1), Subset{1} << ((n + 1) % p));
      EXPECT_EQ(family_contains(E0, x), n == 0);
    }
  }
}

TEST(Counting, SpecValues)
{
  EXPECT_EQ(count_bias(CellSpec{2, 1, 1, 8}), 37);
  EXPECT_EQ(count_bias(CellSpec{2, 1, 2, 4}), 0);
  for (std::size_t d = 1; d <= 6; ++d)
    for (unsigned p : {2u, 3u, 5u}) EXPECT_EQ(count_bias(CellSpec{p, 1, d, d}), 0) << p << " " << d;
  EXPECT_EQ(count_family(make_family(FamilyKind::E, 2, 1, 8)), 74);
  EXPECT_EQ(count_family(make_family(FamilyKind::E, 3, 1, 4)), oracle::enumerate_cells(3, 4, 1).count_E);
}

TEST(Counting, AgreesWithEnumeration)
{
  for (auto [p, d] : laws::law_instances()) {
    auto t = laws::counting_vs_oracle(p, d);
    EXPECT_EQ(t.violations, 0u) << (t.first.empty() ? "" : t.first.front());
  }
}

TEST(Counting, BinaryDimension1000)
{
  auto fam = make_family(FamilyKind::E, 2, 1, 1000);
  Integer n = count_family(fam);
  Integer total = integer_pow(2, 1000);
  Integer middle = binomial(1000, 499) + binomial(1000, 500) + binomial(1000, 501);
  EXPECT_EQ(n, total - middle);
  Rational f = make_rational(n, total);
  EXPECT_GE(f, make_rational(9, 10));
  EXPECT_NEAR(f.get_d(), 0.9243, 5e-4);
  EXPECT_EQ(count_E_binary(1, 1000), n);
}

TEST(Counting, FamilyConsistency)
{
  for (unsigned p : {2u, 3u, 5u, 7u})
    for (std::size_t d : {10u, 25u, 40u})
      for (std::size_t k : {1u, 2u}) {
        Integer e = count_family(make_family(FamilyKind::E, p, k, d));
        Integer e0 = count_family(make_family(FamilyKind::E0, p, k, d));
        EXPECT_EQ(e, Integer(p) * e0);
      }
}

TEST(Eprime, SmallValue)
{
  // M_8 = max C(8,m) over m <= 5 is C(8,4) = 70
  EXPECT_EQ(eprime_bound(2, 1, 8), make_rational(420, 256));
  EXPECT_THROW(eprime_bound(2, 3, 3), std::invalid_argument);
}

TEST(Eprime, DominatesComplement)
{
  for (unsigned p : {2u, 3u, 5u})
    for (std::size_t d = 2; d <= 60; d += 7)
      for (std::size_t k = 1; k < std::min<std::size_t>(d, 4); ++k) {
        Rational out = Rational(1) - make_rational(count_family(make_family(FamilyKind::E, p, k, d)), integer_pow(p, d));
        EXPECT_GE(eprime_bound(p, k, d), out) << p << " " << k << " " << d;
      }
}

TEST(Eprime, DecaysForBinary)
{
  Rational a = eprime_bound(2, 1, 100), b = eprime_bound(2, 1, 200), c = eprime_bound(2, 1, 400);
  EXPECT_GT(a, b);
  EXPECT_GT(b, c);
  EXPECT_LT(eprime_bound(2, 1, 4000), make_rational(1, 10));
}

TEST(Eprime, TernaryNoDecay)
{
  // the (p-1)^d M_d / p^d factor does not vanish for p >= 3
  EXPECT_GE(eprime_bound(3, 1, 400), Rational(1));
}

TEST(UnionLower, BelowExact)
{
  for (unsigned p : {2u, 3u, 5u})
    for (std::size_t d : {5u, 20u, 60u}) {
      Rational exact = make_rational(count_family(make_family(FamilyKind::E, p, 2, d)), integer_pow(p, d));
      EXPECT_LE(union_lower_fraction(p, 2, d), exact);
    }
}

TEST(GpTile, BinaryRadiusOne)
{
  auto r = gp_tile(2, 1, make_rational(95, 100));
  // least d with |E_0(2,d)| > 0.025 * 2^d by enumeration
  std::size_t expect = 0;
  for (std::size_t d = 1; d <= 12 && !expect; ++d)
    if (Rational(static_cast<long>(oracle::enumerate_cells(2, d, 2).count_E0)) > make_rational(5, 200) * Rational(integer_pow(2, d)))
      expect = d;
  EXPECT_EQ(expect, 5u);
  EXPECT_EQ(r.d, expect);
  EXPECT_TRUE(r.minimal);
  EXPECT_EQ(r.A.k, 2u);
  EXPECT_EQ(r.A1.k, 1u);
  ASSERT_TRUE(r.count_A.has_value());
  EXPECT_EQ(*r.count_A, 1);
}

TEST(GpTile, GuaranteesExhaustive)
{
  auto r = gp_tile(2, 1, make_rational(95, 100));
  for (std::size_t d : {r.d, std::size_t{7}}) {
    auto A = make_family(FamilyKind::E0, 2, 2, d), A1 = make_family(FamilyKind::E0, 2, 1, d);
    std::size_t seen = 0;
    for_each_vector(2, d, [&](const GpVector &x) {
      ++seen;
      if (family_contains(A, x)) {
        EXPECT_TRUE(family_contains(A1, x));
        for_each_vector(2, d, [&](const GpVector &y) {
          if (weight(y) <= 1) {
            EXPECT_TRUE(family_contains(A1, add(x, y)));
          }
        });
      }
      EXPECT_FALSE(family_contains(A1, x) && family_contains(A1, add(x, all_ones(2, d))));
    });
    EXPECT_EQ(seen, std::size_t{1} << d);
  }
}

TEST(GpTile, TernaryCounted)
{
  auto r = gp_tile(3, 1, make_rational(9, 10));
  Rational need = make_rational(1, 10) / 3;
  ASSERT_TRUE(r.count_A.has_value());
  EXPECT_EQ(r.d, 37u);
  EXPECT_TRUE(r.minimal);
  EXPECT_GT(make_rational(*r.count_A, integer_pow(3, r.d)), need);
  Integer prev = count_family(make_family(FamilyKind::E0, 3, 2, r.d - 1));
  EXPECT_LE(make_rational(prev, integer_pow(3, r.d - 1)), need);
}

TEST(GpTile, LargeDimensionLowerBound)
{
  // beyond the exact search the union bound certifies the target
  auto r = gp_tile(5, 1, make_rational(1, 2));
  EXPECT_FALSE(r.count_A.has_value());
  EXPECT_GT(r.fraction_lower, make_rational(1, 2));
  EXPECT_EQ(r.fraction_lower, union_lower_fraction(5, 2, r.d));
}

TEST(GpTile, Errors)
{
  EXPECT_THROW(gp_tile(2, 1, Rational(1)), std::invalid_argument);
  EXPECT_THROW(gp_tile(2, 1, Rational(0)), std::invalid_argument);
  EXPECT_THROW(gp_tile(4, 1, make_rational(1, 2)), std::invalid_argument);
  TileOptions small;
  small.d_max = 10;
  EXPECT_THROW(gp_tile(2, 1, make_rational(1, 100), small), TileCapError);
}

TEST(Enumerate, MatchesCount)
{
  auto fam = make_family(FamilyKind::E0, 3, 1, 6);
  EXPECT_EQ(Integer(static_cast<unsigned long>(enumerate_family(fam).size())), count_family(fam));
}
