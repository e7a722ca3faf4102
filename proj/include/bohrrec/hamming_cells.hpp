#pragma once

#include "rational.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bohrrec {

// subsets of Z/pZ as bitmasks, bit t <-> residue t
using Subset = std::uint64_t;

constexpr unsigned max_subset_prime = 61;
constexpr unsigned max_transversal_prime = 23;

struct GpVector {
  unsigned p = 2;
  std::vector<unsigned> coords;

  std::size_t d() const { return coords.size(); }
  bool operator==(const GpVector &) const = default;
};

inline void validate(const GpVector &x)
{
  if (!is_prime(x.p)) throw std::invalid_argument("modulus is not prime");
  if (x.coords.empty()) throw std::invalid_argument("dimension must be positive");
  for (unsigned c : x.coords)
    if (c >= x.p) throw std::invalid_argument("coordinate out of range");
}

inline GpVector all_ones(unsigned p, std::size_t d, unsigned n = 1)
{
  return GpVector{p, std::vector<unsigned>(d, n % p)};
}

inline GpVector add(const GpVector &x, const GpVector &y)
{
  if (x.p != y.p || x.d() != y.d()) throw std::invalid_argument("vector shape mismatch");
  GpVector z{x.p, x.coords};
  for (std::size_t j = 0; j < z.d(); ++j) z.coords[j] = (z.coords[j] + y.coords[j]) % x.p;
  return z;
}

inline std::size_t weight(const GpVector &x)
{
  return static_cast<std::size_t>(std::count_if(x.coords.begin(), x.coords.end(), [](unsigned c) { return c != 0; }));
}

inline std::size_t weight_at(const GpVector &x, unsigned t)
{
  return static_cast<std::size_t>(std::count(x.coords.begin(), x.coords.end(), t));
}

inline std::vector<std::size_t> residue_counts(const GpVector &x)
{
  std::vector<std::size_t> w(x.p, 0);
  for (unsigned c : x.coords) ++w[c];
  return w;
}

inline bool hamming_contains(unsigned p, std::size_t d, std::size_t k, const GpVector &x)
{
  if (x.p != p || x.d() != d) throw std::invalid_argument("vector shape mismatch");
  return weight(x) <= k;
}

// ---- subsets of Z/pZ ----

inline Subset full_subset(unsigned p) { return p >= 64 ? ~Subset{0} : ((Subset{1} << p) - 1); }

inline Subset subset_from_list(unsigned p, const std::vector<unsigned> &elems)
{
  if (p > max_subset_prime) throw std::invalid_argument("modulus too large for subset masks");
  Subset s = 0;
  for (unsigned e : elems) {
    if (e >= p) throw std::invalid_argument("subset element out of range");
    s |= Subset{1} << e;
  }
  return s;
}

inline std::vector<unsigned> subset_to_list(unsigned p, Subset s)
{
  std::vector<unsigned> out;
  for (unsigned t = 0; t < p; ++t)
    if (s >> t & 1) out.push_back(t);
  return out;
}

inline bool is_proper_nonempty(unsigned p, Subset s) { return s != 0 && s != full_subset(p) && (s & ~full_subset(p)) == 0; }

// C + n
inline Subset rotate_subset(unsigned p, Subset s, unsigned n)
{
  n %= p;
  if (n == 0) return s;
  Subset full = full_subset(p);
  return ((s << n) | (s >> (p - n))) & full;
}

inline bool subset_lex_less(unsigned p, Subset a, Subset b)
{
  auto la = subset_to_list(p, a), lb = subset_to_list(p, b);
  return std::lexicographical_compare(la.begin(), la.end(), lb.begin(), lb.end());
}

inline unsigned popcount(Subset s) { return static_cast<unsigned>(__builtin_popcountll(s)); }

// ---- bias cells ----

struct CellSpec {
  unsigned p = 2;
  Subset C = 1;
  std::size_t k = 1;
  std::size_t d = 1;
};

inline void validate(const CellSpec &c)
{
  if (!is_prime(c.p)) throw std::invalid_argument("modulus is not prime");
  if (c.p > max_subset_prime) throw std::invalid_argument("modulus too large for subset masks");
  if (!is_proper_nonempty(c.p, c.C)) throw std::invalid_argument("C must be a nonempty proper subset");
  if (c.d == 0) throw std::invalid_argument("dimension must be positive");
}

namespace detail {

// p*w > d + p*k
inline bool count_high(unsigned p, std::size_t d, std::size_t k, std::size_t w)
{
  return static_cast<unsigned long long>(p) * w > d + static_cast<unsigned long long>(p) * k;
}

// p*w < d - p*k
inline bool count_low(unsigned p, std::size_t d, std::size_t k, std::size_t w)
{
  long long lhs = static_cast<long long>(p) * static_cast<long long>(w);
  long long rhs = static_cast<long long>(d) - static_cast<long long>(p) * static_cast<long long>(k);
  return lhs < rhs;
}

inline bool counts_in_bias(unsigned p, Subset C, std::size_t k, std::size_t d, const std::vector<std::size_t> &w)
{
  for (unsigned t = 0; t < p; ++t) {
    bool ok = (C >> t & 1) ? count_high(p, d, k, w[t]) : count_low(p, d, k, w[t]);
    if (!ok) return false;
  }
  return true;
}

// the only C with x in Bias(C,k,d), if any
inline std::optional<Subset> cell_of_counts(unsigned p, std::size_t k, std::size_t d, const std::vector<std::size_t> &w)
{
  Subset C = 0;
  for (unsigned t = 0; t < p; ++t) {
    if (count_high(p, d, k, w[t]))
      C |= Subset{1} << t;
    else if (!count_low(p, d, k, w[t]))
      return std::nullopt;
  }
  if (!is_proper_nonempty(p, C)) return std::nullopt;
  return C;
}

} // namespace detail

inline bool bias_contains(const CellSpec &spec, const GpVector &x)
{
  if (spec.p != x.p || spec.d != x.d()) throw std::invalid_argument("cell spec and vector disagree on p or d");
  return detail::counts_in_bias(spec.p, spec.C, spec.k, spec.d, residue_counts(x));
}

// ---- transversal of the rotation action on proper nonempty subsets ----

struct Transversal {
  unsigned p = 2;
  std::vector<Subset> reps;
  bool canonical = true;

  bool contains(Subset s) const { return std::find(reps.begin(), reps.end(), s) != reps.end(); }
};

inline Subset orbit_min(unsigned p, Subset s)
{
  Subset best = s;
  for (unsigned n = 1; n < p; ++n) {
    Subset r = rotate_subset(p, s, n);
    if (subset_lex_less(p, r, best)) best = r;
  }
  return best;
}

inline Transversal orbit_transversal(unsigned p)
{
  if (!is_prime(p)) throw std::invalid_argument("modulus is not prime");
  if (p > max_transversal_prime) throw std::invalid_argument("modulus too large to enumerate subset orbits");
  Transversal tr{p, {}, true};
  for (Subset s = 1; s < full_subset(p); ++s)
    if (orbit_min(p, s) == s) tr.reps.push_back(s);
  std::sort(tr.reps.begin(), tr.reps.end(), [p](Subset a, Subset b) { return subset_lex_less(p, a, b); });
  return tr;
}

// every rotation orbit meets reps exactly once
inline bool valid_transversal(const Transversal &tr)
{
  if (!is_prime(tr.p) || tr.p > max_transversal_prime) return false;
  for (Subset r : tr.reps)
    if (!is_proper_nonempty(tr.p, r)) return false;
  for (Subset s = 1; s < full_subset(tr.p); ++s) {
    unsigned hits = 0;
    for (unsigned n = 0; n < tr.p; ++n)
      if (tr.contains(rotate_subset(tr.p, s, n))) ++hits;
    // rotations of s are pairwise distinct for prime p
    if (hits != 1) return false;
  }
  return true;
}

// n such that rotate(rep, n) == s
inline std::optional<unsigned> orbit_offset(unsigned p, Subset rep, Subset s)
{
  for (unsigned n = 0; n < p; ++n)
    if (rotate_subset(p, rep, n) == s) return n;
  return std::nullopt;
}

// ---- families E_0(k,d), E(k,d) ----

enum class FamilyKind { E0, E };

struct CellFamily {
  FamilyKind kind = FamilyKind::E0;
  unsigned p = 2;
  std::size_t k = 1;
  std::size_t d = 1;
  Transversal transversal;
};

inline CellFamily make_family(FamilyKind kind, unsigned p, std::size_t k, std::size_t d)
{
  CellFamily f{kind, p, k, d, {}};
  f.transversal = orbit_transversal(p);
  return f;
}

// cell of x within E(k,d), or nullopt when x lies in no bias cell
inline std::optional<Subset> family_cell(const CellFamily &fam, const GpVector &x)
{
  if (fam.p != x.p || fam.d != x.d()) throw std::invalid_argument("family and vector disagree on p or d");
  auto C = detail::cell_of_counts(fam.p, fam.k, fam.d, residue_counts(x));
  if (!C) return std::nullopt;
  if (!bias_contains(CellSpec{fam.p, *C, fam.k, fam.d}, x)) return std::nullopt;
  if (fam.kind == FamilyKind::E0 && !fam.transversal.contains(*C)) return std::nullopt;
  return C;
}

inline bool family_contains(const CellFamily &fam, const GpVector &x) { return family_cell(fam, x).has_value(); }

// ---- exact counting ----

inline Integer count_bias(const CellSpec &spec)
{
  validate(spec);
  const unsigned p = spec.p;
  const std::size_t d = spec.d, k = spec.k;
  std::vector<std::vector<std::size_t>> adm(p);
  for (unsigned t = 0; t < p; ++t)
    for (std::size_t m = 0; m <= d; ++m) {
      bool ok = (spec.C >> t & 1) ? detail::count_high(p, d, k, m) : detail::count_low(p, d, k, m);
      if (ok) adm[t].push_back(m);
    }
  // g[r]: ways to fill r coordinates with residues t..p-1
  std::vector<Integer> g(d + 1, Integer(0));
  for (std::size_t m : adm[p - 1]) g[m] = 1;
  for (unsigned t = p - 1; t-- > 0;) {
    bool last = t == 0;
    std::vector<Integer> h(d + 1, Integer(0));
    std::size_t rlo = last ? d : 0;
    for (std::size_t r = rlo; r <= d; ++r) {
      Integer acc = 0;
      for (std::size_t m : adm[t]) {
        if (m > r) break;
        if (g[r - m] == 0) continue;
        acc += binomial(r, m) * g[r - m];
      }
      h[r] = acc;
    }
    g.swap(h);
  }
  return g[d];
}

inline Integer count_family(const CellFamily &fam)
{
  if (!is_prime(fam.p)) throw std::invalid_argument("modulus is not prime");
  Integer total = 0;
  for (unsigned j = 1; j < fam.p; ++j) {
    Subset C = (Subset{1} << j) - 1;
    total += binomial(fam.p, j) * count_bias(CellSpec{fam.p, C, fam.k, fam.d});
  }
  if (fam.kind == FamilyKind::E) return total;
  Integer q;
  mpz_divexact_ui(q.get_mpz_t(), total.get_mpz_t(), fam.p);
  return q;
}

// |E(k,d)| for p = 2 from the band complement: x is outside E iff
// |w(x;0) - d/2| <= k
inline Integer count_E_binary(std::size_t k, std::size_t d)
{
  Integer band = 0;
  for (std::size_t m = 0; m <= d; ++m) {
    long long twice = 2 * static_cast<long long>(m) - static_cast<long long>(d);
    if (twice >= -2 * static_cast<long long>(k) && twice <= 2 * static_cast<long long>(k)) band += binomial(d, m);
  }
  return integer_pow(2, d) - band;
}

// certified lower bound on |E(k,d)|/p^d: the complement of E is the union
// over t of {w(x;t) within k of d/p}
inline Rational union_lower_fraction(unsigned p, std::size_t k, std::size_t d)
{
  Integer band = 0;
  long long lo = static_cast<long long>(d) - static_cast<long long>(p) * static_cast<long long>(k);
  long long hi = static_cast<long long>(d) + static_cast<long long>(p) * static_cast<long long>(k);
  long long mlo = std::max<long long>(0, (lo + p - 1) / static_cast<long long>(p));
  if (lo < 0) mlo = 0;
  long long mhi = std::min<long long>(static_cast<long long>(d), hi / static_cast<long long>(p));
  for (long long m = mlo; m <= mhi; ++m)
    band += binomial(d, static_cast<unsigned long>(m)) * integer_pow(p - 1, d - static_cast<unsigned long>(m));
  Rational frac_out = make_rational(Integer(p) * band, integer_pow(p, d));
  Rational r = Rational(1) - frac_out;
  return r < 0 ? Rational(0) : r;
}

inline Rational eprime_bound(unsigned p, std::size_t k, std::size_t d)
{
  if (!(k < d)) throw std::invalid_argument("eprime_bound requires k < d");
  // M_d = max C(d,m) over m <= d/p + k
  std::size_t mmax = std::min(d, (d + p * k) / p);
  std::size_t arg = std::min(mmax, d / 2);
  Integer Md = binomial(d, arg);
  Integer num = Integer(p) * Integer(2 * k + 1) * integer_pow(p - 1, d) * Md;
  return make_rational(num, integer_pow(p, d));
}

// ---- GpTile ----

struct TileOptions {
  std::size_t d_max = 4096;
  // largest d searched by exact counting; 0 picks a default per p
  std::size_t exact_limit = 0;
};

struct TileResult {
  unsigned p = 2;
  std::size_t k = 1;
  Rational epsilon;
  std::size_t d = 0;
  CellFamily A;
  CellFamily A1;
  // exact |A| when counted, otherwise a certified lower bound on |E(k+1,d)|/p^d
  std::optional<Integer> count_A;
  Rational fraction_lower;
  bool minimal = true;
};

struct TileCapError : std::runtime_error {
  std::size_t cap;
  Rational best_fraction;
  TileCapError(std::size_t c, Rational best)
      : std::runtime_error("gp_tile: no d <= " + std::to_string(c) + " reaches the target; best fraction " + best.get_str()),
        cap(c), best_fraction(std::move(best))
  {
  }
};

inline std::size_t default_exact_limit(unsigned p)
{
  if (p == 2) return 4096;
  if (p == 3) return 200;
  return 96;
}

namespace detail {

inline Integer count_E(unsigned p, std::size_t k, std::size_t d)
{
  if (p == 2) return count_E_binary(k, d);
  CellFamily fam{FamilyKind::E, p, k, d, {}};
  return count_family(fam);
}

} // namespace detail

inline TileResult gp_tile(unsigned p, std::size_t k, const Rational &eps, const TileOptions &opt = {})
{
  if (!is_prime(p)) throw std::invalid_argument("modulus is not prime");
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("epsilon must lie in (0,1)");
  const Rational target = Rational(1) - eps;  // needed: |E(k+1,d)|/p^d > target
  std::size_t exact_limit = opt.exact_limit ? opt.exact_limit : default_exact_limit(p);
  exact_limit = std::min(exact_limit, opt.d_max);

  auto finish = [&](std::size_t d, std::optional<Integer> cnt, Rational lower, bool minimal) {
    TileResult r;
    r.p = p;
    r.k = k;
    r.epsilon = eps;
    r.d = d;
    r.A = make_family(FamilyKind::E0, p, k + 1, d);
    r.A1 = make_family(FamilyKind::E0, p, 1, d);
    r.count_A = std::move(cnt);
    r.fraction_lower = std::move(lower);
    r.minimal = minimal;
    return r;
  };

  Rational best = 0;
  for (std::size_t d = 1; d <= exact_limit; ++d) {
    Integer cE = detail::count_E(p, k + 1, d);
    Rational f = make_rational(cE, integer_pow(p, d));
    if (f > best) best = f;
    if (f > target) {
      Integer cA;
      mpz_divexact_ui(cA.get_mpz_t(), cE.get_mpz_t(), p);
      return finish(d, cA, f, true);
    }
  }
  if (exact_limit >= opt.d_max) throw TileCapError(opt.d_max, best);

  // galloping then bisection on the certified lower bound
  auto ok = [&](std::size_t d) { return union_lower_fraction(p, k + 1, d) > target; };
  std::size_t lo = exact_limit, hi = std::max<std::size_t>(exact_limit + 1, 2 * exact_limit);
  while (!ok(hi)) {
    Rational f = union_lower_fraction(p, k + 1, hi);
    if (f > best) best = f;
    if (hi >= opt.d_max) throw TileCapError(opt.d_max, best);
    lo = hi;
    hi = std::min(opt.d_max, 2 * hi);
  }
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return finish(hi, std::nullopt, union_lower_fraction(p, k + 1, hi), false);
}

// all of G_p^d in lexicographic order, for small exhaustive work
template <class F>
void for_each_vector(unsigned p, std::size_t d, F &&f)
{
  GpVector x{p, std::vector<unsigned>(d, 0)};
  while (true) {
    f(static_cast<const GpVector &>(x));
    std::size_t j = d;
    while (j > 0 && x.coords[j - 1] + 1 == p) x.coords[--j] = 0;
    if (j == 0) return;
    ++x.coords[j - 1];
  }
}

inline std::vector<GpVector> enumerate_family(const CellFamily &fam, std::size_t cap = 10'000'000)
{
  Integer total = integer_pow(fam.p, fam.d);
  if (total > cap) throw std::length_error("family too large to enumerate");
  std::vector<GpVector> out;
  for_each_vector(fam.p, fam.d, [&](const GpVector &x) {
    if (family_contains(fam, x)) out.push_back(x);
  });
  return out;
}

} // namespace bohrrec
