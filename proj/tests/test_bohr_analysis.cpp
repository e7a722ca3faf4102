#include <bohrrec.hpp>
#include <bohrrec/oracle.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace bohrrec;

namespace {

Rational q(long a, long b) { return make_rational(a, b); }

std::vector<SymbolicReal> random_symbolic(std::size_t n, std::size_t symbols, std::mt19937_64 &rng, bool with_const)
{
  std::vector<SymbolicReal> v;
  for (std::size_t i = 0; i < n; ++i) {
    SymbolicReal x;
    x.coeffs.assign(symbols + 1, Rational(0));
    if (with_const) x.coeffs[0] = q(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 3));
    for (std::size_t s = 1; s <= symbols; ++s)
      if (rng() % 2) x.coeffs[s] = q(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 4));
    v.push_back(x);
  }
  return v;
}

} // namespace

TEST(TorusNorm, Values)
{
  EXPECT_EQ(torus_norm(q(2, 5)), q(2, 5));
  EXPECT_EQ(torus_norm(q(4, 5)), q(1, 5));
  EXPECT_EQ(torus_norm(q(1, 2)), q(1, 2));
  EXPECT_EQ(torus_norm(q(-7, 3)), q(1, 3));
}

TEST(BH, SpecExamples)
{
  BHSpec b = make_bh({q(1, 2), q(1, 3)}, Rational(0), 1, q(1, 4));
  EXPECT_EQ(bh_contains(b, 0), Tri::yes);
  EXPECT_EQ(bh_contains(b, 2), Tri::yes);
  BHSpec b0 = make_bh({q(1, 2), q(1, 3)}, Rational(0), 0, q(1, 4));
  EXPECT_EQ(bh_contains(b0, 3), Tri::no);
  // 1/2 and 1/3 both far at n = 1
  EXPECT_EQ(bh_contains(b, 1), Tri::no);
}

TEST(BH, RobustnessGivesUnknown)
{
  // ||n/3|| = 1/3 sits within rho|n| of eta
  BHSpec b = make_bh({q(1, 3), q(1, 3)}, q(1, 10), 1, q(3, 10));
  EXPECT_EQ(bh_contains(b, 1), Tri::unknown);
  EXPECT_EQ(bh_contains(b, 0), Tri::yes);
}

TEST(BH, MonotoneInKAndEta)
{
  std::mt19937_64 rng(17);
  for (int it = 0; it < 200; ++it) {
    RatPoint a(4);
    for (auto &c : a) c = q(static_cast<long>(rng() % 50), 50);
    std::size_t k = rng() % 3;
    Rational eta = q(1 + static_cast<long>(rng() % 10), 25), rho = q(static_cast<long>(rng() % 3), 1000);
    long n = static_cast<long>(rng() % 41) - 20;
    if (bh_contains(make_bh(a, rho, k, eta), n) == Tri::yes) {
      EXPECT_EQ(bh_contains(make_bh(a, rho, k + 1, eta), n), Tri::yes);
      EXPECT_EQ(bh_contains(make_bh(a, rho, k, eta + q(1, 50)), n), Tri::yes);
    }
  }
}

TEST(Margin, SingleShift)
{
  auto m = recurrence_margin({1}, 1, q(1, 1000000000));
  EXPECT_EQ(m.lower, q(1, 2));
  EXPECT_EQ(m.upper, q(1, 2));
  EXPECT_EQ(m.witness, (RatPoint{q(1, 2)}));
  for (long s : {2L, 6L, -5L, 13L}) {
    auto r = recurrence_margin({s}, 1, q(1, 1000000));
    EXPECT_EQ(r.lower, q(1, 2)) << s;
    EXPECT_LE(r.upper - r.lower, q(1, 1000000));
  }
}

TEST(Margin, OneTwo)
{
  Rational tol = q(1, 1000000);
  auto m = recurrence_margin({1, 2}, 1, tol);
  EXPECT_LE(m.lower, q(1, 3));
  EXPECT_GE(m.upper, q(1, 3));
  EXPECT_LE(m.upper - m.lower, tol);
  EXPECT_NEAR(m.witness[0].get_d(), 1.0 / 3, 1e-5);
  auto g = oracle::grid_margin({1, 2}, 1, 4096);
  EXPECT_LE(g.sample_max, m.upper);
  EXPECT_GE(g.upper, m.lower);
}

TEST(Margin, BracketsGridOracle)
{
  std::mt19937_64 rng(99);
  for (int it = 0; it < 40; ++it) {
    std::vector<long> S;
    std::size_t n = 1 + rng() % 4;
    while (S.size() < n) {
      long s = static_cast<long>(rng() % 17) - 8;
      if (s != 0 && std::find(S.begin(), S.end(), s) == S.end()) S.push_back(s);
    }
    auto m = recurrence_margin(S, 1, q(1, 100000));
    auto g = oracle::grid_margin(S, 1, 4096);
    EXPECT_LE(g.sample_max, m.upper);
    EXPECT_GE(g.upper, m.lower);
  }
}

TEST(Margin, TwoDimensions)
{
  auto m = recurrence_margin({1, 2, 3}, 2, q(1, 10000));
  auto g = oracle::grid_margin({1, 2, 3}, 2, 256);
  EXPECT_LE(g.sample_max, m.upper);
  EXPECT_GE(g.upper, m.lower);
  // a witness coordinate pair reproduces the lower bound
  Rational v = 1;
  for (long s : {1L, 2L, 3L}) v = std::min(v, std::max(torus_norm(m.witness[0] * s), torus_norm(m.witness[1] * s)));
  EXPECT_EQ(v, m.lower);
}

TEST(Margin, MonotoneUnderSupersets)
{
  std::mt19937_64 rng(5);
  for (int it = 0; it < 20; ++it) {
    std::vector<long> S{1 + static_cast<long>(rng() % 6)};
    auto T = S;
    T.push_back(-1 - static_cast<long>(rng() % 6));
    auto a = recurrence_margin(S, 1, q(1, 10000)), b = recurrence_margin(T, 1, q(1, 10000));
    EXPECT_LE(b.lower, a.upper);
  }
}

TEST(Margin, ZeroInSet)
{
  auto m = recurrence_margin({0, 5}, 2, q(1, 1000));
  EXPECT_EQ(m.upper, Rational(0));
}

TEST(Margin, BudgetFlagged)
{
  MarginOptions o;
  o.node_budget = 50;
  std::vector<long> S;
  for (long s = 1; s <= 25; ++s) S.push_back(s * s + s);
  auto m = recurrence_margin(S, 2, q(1, 1000000000), o);
  EXPECT_FALSE(m.converged);
  EXPECT_LE(m.nodes, 51u);
  EXPECT_LE(m.lower, m.upper);
}

TEST(Recurrent, Examples)
{
  EXPECT_TRUE(is_recurrent({1}, 1, q(6, 10)).recurrent);
  EXPECT_FALSE(is_recurrent({1}, 1, q(4, 10)).recurrent);
  EXPECT_TRUE(is_recurrent({1, 2}, 1, q(34, 100)).recurrent);
  EXPECT_FALSE(is_recurrent({1, 2}, 1, q(33, 100)).recurrent);
  EXPECT_THROW(is_recurrent({1}, 1, Rational(0)), std::invalid_argument);
}

TEST(Translates, Examples)
{
  auto a = check_translates({-1, 0, 1}, 1, q(51, 100), 1);
  EXPECT_TRUE(a.ok);
  auto b = check_translates({0}, 1, q(1, 2), 1);
  EXPECT_FALSE(b.ok);
  ASSERT_TRUE(b.failing_m.has_value());
  EXPECT_EQ(*b.failing_m, 1);
  EXPECT_EQ(translate_order(2), (std::vector<long>{0, 1, -1, 2, -2}));
  EXPECT_EQ(shift_set({3, 1}, 2), (std::vector<long>{-1, 1}));
}

TEST(QLinear, DisjointExamples)
{
  EXPECT_FALSE(q_disjoint({sym_theta(1)}, {sym_theta(1)}));
  EXPECT_TRUE(q_disjoint({sym_theta(1), sym_theta(2)}, {sym_theta(3)}));
  EXPECT_FALSE(q_disjoint({sym_theta(1)}, {sym_theta(1) + sym_const(1)}));
  // a rational coordinate always meets span(beta, 1)
  EXPECT_FALSE(q_disjoint({sym_const(q(1, 2))}, {}));
}

TEST(QLinear, ChooseIndicesExamples)
{
  EXPECT_EQ(choose_indices({sym_theta(1), sym_theta(2)}, {sym_theta(1)}), (std::vector<std::size_t>{1}));
  EXPECT_EQ(choose_indices({sym_theta(1), sym_theta(2), sym_theta(3)}, {sym_theta(4)}), (std::vector<std::size_t>{0, 1}));
  std::vector<SymbolicReal> a{sym_theta(1), sym_theta(2)};
  auto I = choose_indices(a, {sym_theta(1) + sym_theta(2)});
  ASSERT_EQ(I.size(), 1u);
  EXPECT_TRUE(q_disjoint({a[I[0]]}, {sym_theta(1) + sym_theta(2)}));
  EXPECT_THROW(choose_indices({sym_theta(1), sym_theta(1, 2)}, {sym_theta(3)}), std::invalid_argument);
  EXPECT_THROW(choose_indices({sym_theta(1)}, {sym_theta(2)}), std::invalid_argument);
}

TEST(QLinear, ChooseIndicesRandom)
{
  std::mt19937_64 rng(31);
  int tried = 0;
  while (tried < 200) {
    std::size_t d = 2 + rng() % 4, k = 1 + rng() % (d - 1), syms = 1 + rng() % 6;
    auto alpha = random_symbolic(d, syms, rng, true), beta = random_symbolic(k, syms, rng, true);
    if (!independent_with_one(alpha)) continue;
    ++tried;
    auto I = choose_indices(alpha, beta);
    ASSERT_EQ(I.size(), d - k);
    std::vector<SymbolicReal> sub;
    for (auto i : I) sub.push_back(alpha[i]);
    EXPECT_TRUE(q_disjoint(sub, beta));
  }
}

TEST(QLinear, TooManySymbols) { EXPECT_THROW(q_disjoint({sym_theta(40)}, {}), std::invalid_argument); }

TEST(BohrSets, InnerBohrDropsMatchingCoordinate)
{
  SymbolicBH bh{{sym_theta(1), sym_theta(2)}, 1, q(1, 8)};
  auto b = bh_inner_bohr(bh, {sym_theta(1)});
  ASSERT_EQ(b.alpha.size(), 1u);
  EXPECT_EQ(b.alpha[0], sym_theta(2));
  EXPECT_EQ(b.radius, q(1, 8));
  SymbolicBH full{{sym_theta(1), sym_theta(2)}, 0, q(1, 8)};
  EXPECT_EQ(bh_inner_bohr(full, {}).alpha.size(), 2u);
}

TEST(BohrSets, InnerBohrInsideBH)
{
  auto pa = default_proxies();
  SymbolicBH bh{{sym_theta(1), sym_theta(2), sym_theta(3)}, 1, q(1, 6)};
  auto b = bh_inner_bohr(bh, {sym_theta(2) + sym_theta(3)});
  RatPoint alpha;
  for (auto &a : bh.alpha) alpha.push_back(frac(pa.value(a)));
  BHSpec spec = make_bh(alpha, Rational(0), bh.k, bh.eta);
  int members = 0;
  for (long n = -3000; n <= 3000; ++n)
    if (bohr_member(b, n, pa)) {
      ++members;
      EXPECT_NE(bh_contains(spec, n), Tri::no) << n;
    }
  EXPECT_GT(members, 10);
}

TEST(BohrSets, OddIntegers)
{
  // odd integers: n/2 in the window (1/4, 3/4), a Bohr neighborhood with rational frequency
  Box w{{make_interval(q(1, 4), q(1, 2))}};
  BohrSpec odd{{sym_const(q(1, 2))}, q(1, 2), 0, w};
  auto pa = default_proxies();
  for (long n = -25; n <= 25; ++n) EXPECT_EQ(bohr_member(odd, n, pa), (n % 2 != 0)) << n;
  auto r = bohr_intersect_nonempty(odd, odd, 100, pa);
  EXPECT_TRUE(r.trivial);
  ASSERT_TRUE(r.member.has_value());
  EXPECT_NE(*r.member % 2, 0);
  // rational frequencies are never disjoint from anything
  BohrSpec zero{{sym_const(q(1, 3))}, q(1, 4), 0, std::nullopt};
  EXPECT_THROW(bohr_intersect_nonempty(odd, zero), std::invalid_argument);
}

TEST(BohrSets, IndependentIntersection)
{
  Box U{{make_interval(q(-1, 4), q(1, 2))}};
  BohrSpec b1{{sym_theta(1)}, q(1, 4), 0, U}, b2{{sym_theta(2)}, q(1, 4), 0, U};
  auto pa = default_proxies();
  auto r = bohr_intersect_nonempty(b1, b2, 10000, pa);
  EXPECT_TRUE(r.nonempty);
  ASSERT_TRUE(r.member.has_value());
  EXPECT_TRUE(bohr_member(b1, *r.member, pa));
  EXPECT_TRUE(bohr_member(b2, *r.member, pa));
  EXPECT_THROW(bohr_intersect_nonempty(b1, BohrSpec{{sym_theta(1, 2)}, q(1, 4), 0, U}), std::invalid_argument);
}

TEST(BohrSets, ConvergentDenominators)
{
  // 13/8 = [1; 1, 1, 1, 2]
  EXPECT_EQ(convergent_denominators(q(13, 8), 100), (std::vector<long>{1, 2, 3, 8}));
}
