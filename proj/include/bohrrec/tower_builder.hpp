#pragma once

#include "bohr_analysis.hpp"
#include "hamming_cells.hpp"
#include "nonrecurrence.hpp"
#include "rational.hpp"
#include "torus_boxes.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bohrrec {

enum class TowerMode { exact, reduced };

inline const char *to_string(TowerMode m) { return m == TowerMode::exact ? "exact" : "reduced"; }

struct TowerSpec {
  unsigned p = 2;
  std::size_t k = 1;
  Rational epsilon;
  std::size_t d = 0;
  Rational eta;
  TowerMode mode = TowerMode::exact;
  // A = E_0(k+1,d), A1 = E_0(1,d); E = A boxed at 2 eta
  CellFamily A;
  CellFamily A1;
  std::optional<Integer> count_A;
  Rational fraction_lower;  // lower bound on |E(k+1,d)|/p^d, exact when counted
  bool tile_minimal = true;
  std::optional<BoxUnion> E;
  std::optional<BoxUnion> E1;  // closed
  std::vector<WeightedCoord> alpha_star;
  Rational rho;
  Rational separation_bound;  // exact: computed; reduced: analytic lower bound
  Rational mu_E;              // exact: measure; reduced: certified lower bound
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;

  RatPoint alpha_point() const
  {
    RatPoint r;
    for (auto &c : alpha_star)
      for (std::uint64_t i = 0; i < c.count; ++i) r.push_back(c.value);
    return r;
  }
};

enum class FactKind { verified_exact, verified_reduced, sampled, failed };

inline const char *to_string(FactKind f)
{
  switch (f) {
  case FactKind::verified_exact: return "verified-exact";
  case FactKind::verified_reduced: return "verified-reduced";
  case FactKind::sampled: return "sampled";
  default: return "failed";
  }
}

struct Fact {
  FactKind kind = FactKind::failed;
  std::uint64_t trials = 0;
  std::string note;
};

struct TowerCertificate {
  TowerSpec spec;
  std::map<std::string, Fact> checks;
  Rational mu_E;
  Rational separation_min;
  bool valid = false;

  std::vector<std::string> failures() const
  {
    std::vector<std::string> f;
    for (auto &[name, fact] : checks)
      if (fact.kind == FactKind::failed) f.push_back(name);
    return f;
  }
};

struct TowerOptions {
  std::size_t box_cap = default_box_cap;
  std::size_t d_max = 4096;
  std::size_t exact_limit = 0;
  std::uint64_t seed = 1;
  std::uint64_t base_samples = 32;
  std::uint64_t inner_samples = 64;
  std::uint64_t exhaustive_cap = 20'000'000;
};

constexpr unsigned eta_bits = 40;

namespace detail {

// largest a/2^40 (a >= 1) with pred true, pred decreasing in eta
template <class Pred>
std::optional<Rational> largest_dyadic(const Rational &upper_excl, Pred &&pred)
{
  Integer scale = integer_pow(2, eta_bits);
  Integer hi = ceil_of(upper_excl * Rational(scale));  // candidates below hi
  Integer lo = 1;
  if (hi <= lo) return std::nullopt;
  auto at = [&](const Integer &a) { return make_rational(a, scale); };
  if (!pred(at(lo))) return std::nullopt;
  // invariant: pred(lo) true, candidates >= hi excluded
  while (hi - lo > 1) {
    Integer mid = (lo + hi) / 2;
    if (pred(at(mid)))
      lo = mid;
    else
      hi = mid;
  }
  return at(lo);
}

inline std::size_t exact_d_cap(unsigned p, const Rational &eps, std::size_t box_cap)
{
  // beyond this d even the minimal admissible |A| exceeds the cap, or p^d is
  // too large to enumerate
  std::size_t d = 1;
  while (true) {
    Rational need = (Rational(1) - eps) * Rational(integer_pow(p, d)) / p;
    if (need > box_cap || integer_pow(p, d + 1) > 10'000'000) return d;
    ++d;
  }
}

} // namespace detail

inline TowerSpec build_tower(unsigned p, std::size_t k, const Rational &eps, TowerMode mode, const TowerOptions &opt = {})
{
  if (!is_prime(p)) throw std::invalid_argument("modulus is not prime");
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("epsilon must lie in (0,1)");
  TowerSpec t;
  t.p = p;
  t.k = k;
  t.epsilon = eps;
  t.mode = mode;
  t.seed = opt.seed;
  TileOptions to;
  to.exact_limit = opt.exact_limit;
  to.d_max = opt.d_max;
  if (mode == TowerMode::exact) {
    to.d_max = std::min(opt.d_max, detail::exact_d_cap(p, eps, opt.box_cap));
    to.exact_limit = to.d_max;
  }
  TileResult tile;
  try {
    tile = gp_tile(p, k, eps, to);
  } catch (const TileCapError &e) {
    if (mode == TowerMode::exact)
      throw BoxCapError("exact mode: the required |A| exceeds the box cap (no admissible d <= " + std::to_string(to.d_max) +
                        ")");
    throw;
  }
  t.d = tile.d;
  t.A = tile.A;
  t.A1 = tile.A1;
  t.count_A = tile.count_A;
  t.fraction_lower = tile.fraction_lower;
  t.tile_minimal = tile.minimal;
  const std::size_t d = t.d;
  const Rational half_eps = eps / 2;
  const Rational target = Rational(1) - eps;
  t.alpha_star = {WeightedCoord{make_rational(1, static_cast<long>(p)), d}};
  const Rational eta_sup = make_rational(1, 4 * static_cast<long>(p));  // cubes need 4 eta < 1/p

  if (mode == TowerMode::exact) {
    const Rational fracA = make_rational(*t.count_A * p, integer_pow(p, d));  // |E|/p^d
    auto pred = [&](const Rational &eta) {
      Rational shrink = rational_pow(Rational(1) - 4 * p * eta, d);
      return shrink > Rational(1) - half_eps && fracA * shrink > target;
    };
    auto eta = detail::largest_dyadic(eta_sup, pred);
    if (!eta) throw std::runtime_error("no admissible eta");
    t.eta = *eta;
    auto elems = enumerate_family(t.A);
    if (elems.size() > opt.box_cap) throw BoxCapError("exact mode: |A| exceeds the box cap");
    BoxUnion E = cube_embed(elems, p, 2 * t.eta, d);
    BoxUnion U = approx_hamming(d, k, t.eta, false, opt.box_cap);
    BoxUnion E1 = closure(minkowski_sum(E, U, opt.box_cap, false));
    t.mu_E = measure(E);
    RatPoint a = t.alpha_point();
    Rational sep = 1;
    for (unsigned n = 1; n < p; ++n) {
      Rational s = separation(E1, translate(E1, scale_point(a, n)));
      if (s < sep) sep = s;
    }
    t.separation_bound = sep;
    t.rho = sep / (2 * (p - 1));
    t.E = std::move(E);
    t.E1 = std::move(E1);
  } else {
    const Rational L = t.fraction_lower;
    auto pred = [&](const Rational &eta) {
      Rational shrink = Rational(1) - 4 * p * eta * d;  // (1-x)^d >= 1 - dx
      return shrink > Rational(1) - half_eps && L * shrink > target;
    };
    auto eta = detail::largest_dyadic(eta_sup, pred);
    if (!eta) throw std::runtime_error("no admissible eta");
    t.eta = *eta;
    t.mu_E = L / p * (Rational(1) - 4 * p * t.eta * d);
    // off at most 2k coordinates, points of E' and E'+n/p sit in cells at
    // depth >= eta, which forces a point of A1 ∩ (A1 + n1)
    t.separation_bound = 2 * t.eta;
    t.rho = t.separation_bound / (2 * (p - 1));
    t.trials = opt.base_samples * opt.inner_samples;
  }
  return t;
}

namespace detail {

struct CountState {
  std::vector<std::size_t> w;
};

inline std::vector<std::size_t> shifted_counts(const std::vector<std::size_t> &w, unsigned p, unsigned n)
{
  // counts of x + n1
  std::vector<std::size_t> r(p);
  for (unsigned t = 0; t < p; ++t) r[(t + n) % p] = w[t];
  return r;
}

inline bool in_family_counts(const CellFamily &f, const std::vector<std::size_t> &w)
{
  auto C = cell_of_counts(f.p, f.k, f.d, w);
  if (!C) return false;
  return f.kind == FamilyKind::E || f.transversal.contains(*C);
}

inline std::uint64_t hamming_size(unsigned p, std::size_t d, std::size_t k)
{
  Integer s = 0;
  for (std::size_t i = 0; i <= k && i <= d; ++i) s += binomial(d, i) * integer_pow(p - 1, i);
  return s > Integer("18446744073709551615") ? ~std::uint64_t{0} : s.get_ui();
}

// draw x in the given family by rejection on E then rotation to the transversal
inline std::optional<GpVector> sample_member(const CellFamily &f, std::mt19937_64 &rng)
{
  std::uniform_int_distribution<unsigned> res(0, f.p - 1);
  for (int tries = 0; tries < 4096; ++tries) {
    GpVector x{f.p, std::vector<unsigned>(f.d)};
    for (auto &c : x.coords) c = res(rng);
    auto w = residue_counts(x);
    auto C = cell_of_counts(f.p, f.k, f.d, w);
    if (!C) continue;
    for (Subset rep : f.transversal.reps) {
      auto off = orbit_offset(f.p, *C, rep);
      if (!off) continue;
      for (auto &c : x.coords) c = (c + *off) % f.p;
      return x;
    }
  }
  return std::nullopt;
}

} // namespace detail

struct ReducedCheck {
  bool ok = true;
  bool exhaustive = false;
  std::uint64_t trials = 0;
};

// A + H_k inside A1, and A1, A1+1, ..., A1+(p-1)1 pairwise disjoint
inline std::pair<ReducedCheck, ReducedCheck> reduced_checks(const CellFamily &A, const CellFamily &A1, std::size_t k,
                                                            std::uint64_t seed, std::uint64_t base, std::uint64_t inner,
                                                            std::uint64_t exhaustive_cap)
{
  const unsigned p = A.p;
  const std::size_t d = A.d;
  ReducedCheck hk, disj;
  Integer space = integer_pow(p, d);
  std::uint64_t hsz = detail::hamming_size(p, d, k);
  bool small = space <= 10'000'000 && space * Integer(static_cast<unsigned long>(std::min<std::uint64_t>(hsz, 1u << 30))) <= exhaustive_cap;
  if (small) {
    hk.exhaustive = disj.exhaustive = true;
    std::vector<GpVector> ys;
    for_each_vector(p, d, [&](const GpVector &y) {
      if (weight(y) <= k) ys.push_back(y);
    });
    for_each_vector(p, d, [&](const GpVector &x) {
      if (family_contains(A, x)) {
        for (auto &y : ys) {
          ++hk.trials;
          if (!family_contains(A1, add(x, y))) hk.ok = false;
        }
      }
      if (family_contains(A1, x)) {
        for (unsigned n = 1; n < p; ++n) {
          ++disj.trials;
          if (family_contains(A1, add(x, all_ones(p, d, n)))) disj.ok = false;
        }
      }
    });
    return {hk, disj};
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pos(0, d - 1);
  std::uniform_int_distribution<unsigned> nz(1, p - 1);
  for (std::uint64_t b = 0; b < base; ++b) {
    auto x = detail::sample_member(A, rng);
    if (!x) {
      hk.ok = false;
      break;
    }
    auto w = residue_counts(*x);
    for (std::uint64_t i = 0; i < inner; ++i) {
      auto wz = w;
      std::vector<std::size_t> touched;
      while (touched.size() < k) {
        std::size_t j = pos(rng);
        if (std::find(touched.begin(), touched.end(), j) == touched.end()) touched.push_back(j);
      }
      for (auto j : touched) {
        unsigned c = x->coords[j];
        unsigned nc = (c + nz(rng)) % p;
        --wz[c];
        ++wz[nc];
      }
      ++hk.trials;
      if (!detail::in_family_counts(A1, wz)) hk.ok = false;
    }
  }
  for (std::uint64_t b = 0; b < base; ++b) {
    auto x = detail::sample_member(A1, rng);
    if (!x) {
      disj.ok = false;
      break;
    }
    auto w = residue_counts(*x);
    for (unsigned n = 1; n < p; ++n) {
      ++disj.trials;
      if (detail::in_family_counts(A1, detail::shifted_counts(w, p, n))) disj.ok = false;
    }
  }
  return {hk, disj};
}

inline TowerCertificate verify_tower(const TowerSpec &t, const TowerOptions &opt = {})
{
  TowerCertificate c;
  c.spec = t;
  auto put = [&](const std::string &name, bool ok, FactKind kind, std::uint64_t trials = 0, std::string note = {}) {
    c.checks[name] = Fact{ok ? kind : FactKind::failed, trials, std::move(note)};
  };
  const unsigned p = t.p;
  const Rational target = (Rational(1) - t.epsilon) / p;
  bool eta_ok = t.eta > 0 && 4 * p * t.eta < 1;
  put("eta_positive", eta_ok, FactKind::verified_exact);
  put("rho_positive", t.rho > 0, FactKind::verified_exact);
  bool shape_ok = is_prime(p) && t.A.p == p && t.A1.p == p && t.A.d == t.d && t.A1.d == t.d && t.A.k == t.k + 1 &&
                  t.A1.k == 1 && t.A.kind == FamilyKind::E0 && t.A1.kind == FamilyKind::E0 &&
                  valid_transversal(t.A.transversal) && t.A1.transversal.reps == t.A.transversal.reps;
  std::uint64_t rank = 0;
  for (auto &a : t.alpha_star) rank += a.count;
  shape_ok = shape_ok && rank == t.d && t.k < t.d;
  put("spec_shape", shape_ok, FactKind::verified_exact);
  if (!shape_ok) {
    c.valid = false;
    return c;
  }
  if (t.mode == TowerMode::exact) {
    if (!t.E || !t.E1) {
      put("explicit_sets", false, FactKind::verified_exact);
      return c;
    }
    const BoxUnion &E = *t.E, &E1 = *t.E1;
    Rational mu = measure(E);
    c.mu_E = mu;
    put("measure_bound", mu > target, FactKind::verified_exact);
    bool construction = false;
    if (eta_ok && t.count_A) {
      try {
        auto elems = enumerate_family(t.A);
        BoxUnion ref = cube_embed(elems, p, 2 * t.eta, t.d);
        construction = Integer(static_cast<unsigned long>(elems.size())) == *t.count_A && is_subset(ref, E) && is_subset(E, ref) &&
                       mu == Rational(*t.count_A) * rational_pow(make_rational(1, static_cast<long>(p)) - 4 * t.eta, t.d);
      } catch (const std::exception &) {
        construction = false;
      }
    }
    put("E_matches_construction", construction, FactKind::verified_exact);
    put("E1_closed", E1.closed, FactKind::verified_exact);
    put("E_subset_E1", E.d == t.d && E1.d == t.d && is_subset(E, E1), FactKind::verified_exact);
    bool eu = false;
    if (eta_ok) {
      try {
        BoxUnion U = approx_hamming(t.d, t.k, t.eta, false, opt.box_cap);
        eu = is_subset(minkowski_sum(E, U, opt.box_cap, false), E1);
      } catch (const std::exception &) {
        eu = false;
      }
    }
    put("E_plus_U_subset_E1", eu, FactKind::verified_exact);
    RatPoint a = t.alpha_point();
    Rational sep = 1;
    bool any = !E1.boxes.empty();
    if (any) {
      for (unsigned n = 1; n < p; ++n) {
        Rational s = separation(E1, translate(E1, scale_point(a, n)));
        if (s < sep) sep = s;
      }
    } else {
      sep = 0;
    }
    c.separation_min = sep;
    put("translates_separated", sep > 0 && sep >= 2 * (p - 1) * t.rho && sep == t.separation_bound, FactKind::verified_exact);
  } else {
    Rational L = union_lower_fraction(p, t.k + 1, t.d);
    if (t.count_A) L = make_rational(*t.count_A * p, integer_pow(p, t.d));
    bool tile = L > Rational(1) - t.epsilon && t.fraction_lower == L;
    put("tile_bound", tile, FactKind::verified_exact);
    Rational shrink = Rational(1) - 4 * p * t.eta * t.d;
    Rational mu = L / p * shrink;
    c.mu_E = mu;
    put("measure_bound", eta_ok && shrink > 0 && mu > target && mu == t.mu_E, FactKind::verified_reduced);
    auto [hk, disj] =
        reduced_checks(t.A, t.A1, t.k, t.seed, opt.base_samples, opt.inner_samples, opt.exhaustive_cap);
    put("A_plus_Hk_subset_A1", hk.ok, hk.exhaustive ? FactKind::verified_exact : FactKind::sampled, hk.trials);
    put("A1_translates_disjoint", disj.ok, disj.exhaustive ? FactKind::verified_exact : FactKind::sampled, disj.trials);
    bool alpha_ok = t.alpha_star.size() == 1 && t.alpha_star[0].value == make_rational(1, static_cast<long>(p));
    c.separation_min = t.separation_bound;
    put("translates_separated",
        alpha_ok && t.separation_bound == 2 * t.eta && t.separation_bound > 0 && t.separation_bound >= 2 * (p - 1) * t.rho,
        FactKind::verified_reduced);
  }
  c.valid = c.failures().empty();
  return c;
}

struct ExtendResult {
  Tri disjoint = Tri::unknown;
  std::string witnessed_by;
  std::optional<long> s, m;
  std::optional<bool> explicit_disjoint;
};

inline BHSpec tower_bh(const TowerSpec &t, std::optional<Rational> rho = std::nullopt)
{
  return BHSpec{t.alpha_star, rho ? *rho : t.rho, t.k, t.eta};
}

// decides n ∈ S + BH for the tower's ball of rotations; D = union of T^a E, a in A_pos
// rho may be lowered below the tower's radius to keep rho*|n| under eta
inline ExtendResult rohlin_extend(const TowerCertificate &cert, const IntSet &A_pos, const IntSet &S, long n, long n_max,
                                  bool explicit_check = false, std::optional<Rational> rho = std::nullopt)
{
  if (!cert.valid) throw std::invalid_argument("invalid tower certificate");
  const TowerSpec &t = cert.spec;
  Witness pre{static_cast<long>(t.p), normalize_set(S), normalize_set(A_pos), true};
  if (!verify_witness(pre)) throw std::invalid_argument("A_pos does not avoid S inside [p]");
  if ((n < 0 ? -n : n) > n_max) throw std::invalid_argument("n exceeds n_max");
  const Rational r0 = rho ? *rho : t.rho;
  if (!(r0 > 0 && r0 <= t.rho)) throw std::invalid_argument("rho must lie in (0, tower rho]");
  if (!(r0 * (n_max + max_abs(S)) < t.eta)) throw std::invalid_argument("robustness slack swallows eta at n_max");
  ExtendResult r;
  BHSpec bh = tower_bh(t, r0);
  for (long s : pre.S) {
    long m = n - s;
    if (bh_contains(bh, m) == Tri::yes) {
      r.disjoint = Tri::yes;
      r.s = s;
      r.m = m;
      r.witnessed_by = "n = " + std::to_string(s) + " + " + std::to_string(m) + " with " + std::to_string(m) +
                       " in BH; D and D + n alpha are disjoint for every alpha within rho";
      break;
    }
  }
  if (explicit_check && t.mode == TowerMode::exact && t.E) {
    RatPoint a = t.alpha_point();
    BoxUnion D{t.d, false, {}, false};
    for (long s : pre.A) {
      auto tr = translate(*t.E, scale_point(a, s));
      D.boxes.insert(D.boxes.end(), tr.boxes.begin(), tr.boxes.end());
    }
    r.explicit_disjoint = !intersects(D, translate(D, scale_point(a, n)));
  }
  return r;
}

} // namespace bohrrec
