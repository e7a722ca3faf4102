#pragma once

// Brute-force reference computations. Nothing here calls the counting,
// dynamic programming, box algebra or branch-and-bound code.

#include "rational.hpp"
#include "torus_boxes.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace bohrrec::oracle {

struct OracleCapError : std::length_error {
  using std::length_error::length_error;
};

// ---- bias cells by enumeration ----

struct CellTables {
  unsigned p = 2;
  std::size_t d = 0, k = 0;
  std::uint64_t size = 0;                       // p^d
  std::vector<std::vector<unsigned>> subsets;   // proper nonempty C, as sorted lists
  std::vector<std::size_t> reps;                // indices into subsets of the chosen orbit representatives
  std::vector<int> cell;                        // per vector: index of its cell, -1 if none
  std::vector<int> cells_hit;                   // per vector: how many cells contain it
  std::vector<char> in_E, in_E0;
  std::vector<std::uint64_t> cell_size;         // per subset
  std::uint64_t count_E = 0, count_E0 = 0;
};

inline std::vector<unsigned> decode(std::uint64_t idx, unsigned p, std::size_t d)
{
  std::vector<unsigned> x(d);
  for (std::size_t j = d; j-- > 0;) {
    x[j] = static_cast<unsigned>(idx % p);
    idx /= p;
  }
  return x;
}

inline std::uint64_t encode(const std::vector<unsigned> &x, unsigned p)
{
  std::uint64_t idx = 0;
  for (unsigned c : x) idx = idx * p + c;
  return idx;
}

inline std::uint64_t pow_u64(unsigned p, std::size_t d, std::uint64_t cap)
{
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < d; ++i) {
    n *= p;
    if (n > cap) throw OracleCapError("p^d above the enumeration cap");
  }
  return n;
}

inline bool in_bias_direct(const std::vector<unsigned> &x, unsigned p, std::size_t k, const std::vector<unsigned> &C)
{
  // w > d/p + k on C, w < d/p - k off C, with the fractions cleared
  const long d = static_cast<long>(x.size());
  for (unsigned t = 0; t < p; ++t) {
    long w = 0;
    for (unsigned c : x) w += c == t;
    bool inC = std::find(C.begin(), C.end(), t) != C.end();
    long lhs = static_cast<long>(p) * w;
    if (inC && !(lhs > d + static_cast<long>(p * k))) return false;
    if (!inC && !(lhs < d - static_cast<long>(p * k))) return false;
  }
  return true;
}

inline std::vector<unsigned> shift_list(const std::vector<unsigned> &C, unsigned p, unsigned n)
{
  std::vector<unsigned> r;
  for (unsigned c : C) r.push_back((c + n) % p);
  std::sort(r.begin(), r.end());
  return r;
}

inline CellTables enumerate_cells(unsigned p, std::size_t d, std::size_t k, std::uint64_t cap = 10'000'000)
{
  if (p < 2 || p > 13) throw std::invalid_argument("oracle handles primes 2..13");
  for (unsigned q = 2; q * q <= p; ++q)
    if (p % q == 0) throw std::invalid_argument("modulus is not prime");
  CellTables T;
  T.p = p;
  T.d = d;
  T.k = k;
  T.size = pow_u64(p, d, cap);
  for (unsigned mask = 1; mask + 1 < (1u << p); ++mask) {
    std::vector<unsigned> C;
    for (unsigned t = 0; t < p; ++t)
      if (mask >> t & 1) C.push_back(t);
    T.subsets.push_back(C);
  }
  // representative: lexicographically least list in the rotation orbit
  for (std::size_t i = 0; i < T.subsets.size(); ++i) {
    const auto &C = T.subsets[i];
    bool least = true;
    for (unsigned n = 1; n < p; ++n)
      if (shift_list(C, p, n) < C) least = false;
    if (least) T.reps.push_back(i);
  }
  T.cell.assign(T.size, -1);
  T.cells_hit.assign(T.size, 0);
  T.in_E.assign(T.size, 0);
  T.in_E0.assign(T.size, 0);
  T.cell_size.assign(T.subsets.size(), 0);
  for (std::uint64_t idx = 0; idx < T.size; ++idx) {
    auto x = decode(idx, p, d);
    for (std::size_t i = 0; i < T.subsets.size(); ++i)
      if (in_bias_direct(x, p, k, T.subsets[i])) {
        ++T.cells_hit[idx];
        T.cell[idx] = static_cast<int>(i);
        ++T.cell_size[i];
      }
    if (T.cell[idx] >= 0) {
      T.in_E[idx] = 1;
      ++T.count_E;
      if (std::find(T.reps.begin(), T.reps.end(), static_cast<std::size_t>(T.cell[idx])) != T.reps.end()) {
        T.in_E0[idx] = 1;
        ++T.count_E0;
      }
    }
  }
  return T;
}

// ---- optimal avoiding sets by search ----

inline std::size_t exhaustive_avoiding(const std::vector<long> &S, long N)
{
  if (N < 0) throw std::invalid_argument("N must be nonnegative");
  if (N > 24) throw OracleCapError("N above the exhaustive cap (24)");
  for (long s : S)
    if (s == 0) throw std::invalid_argument("0 in S");
  std::uint32_t allowed = 0;
  for (long a = 0; a < N; ++a) {
    bool ok = true;
    for (long s : S)
      if (a + s < 0 || a + s >= N) ok = false;
    if (ok) allowed |= 1u << a;
  }
  std::vector<std::uint32_t> clash(static_cast<std::size_t>(N), 0);
  for (long a = 0; a < N; ++a)
    for (long s : S) {
      long b = a + s;
      if (b >= 0 && b < N) {
        clash[a] |= 1u << b;
        clash[b] |= 1u << a;
      }
    }
  std::size_t best = 0;
  // choose or skip each position, bounded by what is left
  auto rec = [&](auto &&self, long i, std::uint32_t chosen, std::size_t size) -> void {
    if (size > best) best = size;
    if (i == N) return;
    std::size_t left = static_cast<std::size_t>(__builtin_popcount(allowed >> i));
    if (size + left <= best) return;
    if ((allowed >> i & 1) && !(clash[i] & chosen)) self(self, i + 1, chosen | (1u << i), size + 1);
    self(self, i + 1, chosen, size);
  };
  rec(rec, 0, 0, 0);
  return best;
}

// ---- grid evaluation of the recurrence margin ----

struct GridMargin {
  Rational sample_max;  // attained at a grid point
  Rational upper;       // sample_max + L/(2m)
  std::vector<Rational> argmax;
};

inline GridMargin grid_margin(const std::vector<long> &S, std::size_t d, long m, std::uint64_t cap = 100'000'000)
{
  if (S.empty()) throw std::invalid_argument("S must be nonempty");
  if (m < 2) throw std::invalid_argument("grid needs m >= 2");
  std::uint64_t cells = 1;
  for (std::size_t i = 0; i < d; ++i) {
    cells *= static_cast<std::uint64_t>(m);
    if (cells > cap) throw OracleCapError("m^d above the grid cap");
  }
  long L = 0;
  for (long s : S) L = std::max(L, s < 0 ? -s : s);
  long best = -1;
  std::vector<long> arg(d, 0), g(d, 0);
  for (std::uint64_t c = 0; c < cells; ++c) {
    std::uint64_t r = c;
    for (std::size_t j = 0; j < d; ++j) {
      g[j] = static_cast<long>(r % static_cast<std::uint64_t>(m));
      r /= static_cast<std::uint64_t>(m);
    }
    long v = m;  // in units of 1/m
    for (long s : S) {
      long worst = 0;
      for (std::size_t j = 0; j < d; ++j) {
        long q = ((s % m) * g[j]) % m;
        if (q < 0) q += m;
        worst = std::max(worst, std::min(q, m - q));
      }
      v = std::min(v, worst);
    }
    if (v > best) {
      best = v;
      arg = g;
    }
  }
  GridMargin out;
  out.sample_max = Rational(best) / m;
  out.upper = Rational(2 * best + L) / (2 * m);
  for (long a : arg) out.argmax.push_back(Rational(a) / m);
  return out;
}

// ---- rasterized measure ----

struct Raster {
  std::vector<char> bitmap;
  std::uint64_t hits = 0;
  Rational estimate;
};

inline bool in_arc_plain(const Rational &x, const TorusInterval &iv)
{
  if (iv.length >= 1) return true;
  if (iv.length <= 0) return false;
  // shift x against the arc start and reduce into [0,1)
  Rational y = x - iv.start;
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
  y -= f;
  return y < iv.length;
}

inline Raster rasterize(const BoxUnion &u, long m, std::uint64_t cap = 100'000'000)
{
  if (m < 1) throw std::invalid_argument("grid needs m >= 1");
  std::uint64_t cells = 1;
  for (std::size_t i = 0; i < u.d; ++i) {
    cells *= static_cast<std::uint64_t>(m);
    if (cells > cap) throw OracleCapError("m^d above the raster cap");
  }
  std::vector<Rational> centers(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i) centers[static_cast<std::size_t>(i)] = Rational(2 * i + 1) / (2 * m);
  Raster R;
  R.bitmap.assign(cells, 0);
  std::vector<std::size_t> g(u.d);
  for (std::uint64_t c = 0; c < cells; ++c) {
    std::uint64_t r = c;
    for (std::size_t j = 0; j < u.d; ++j) {
      g[j] = static_cast<std::size_t>(r % static_cast<std::uint64_t>(m));
      r /= static_cast<std::uint64_t>(m);
    }
    bool in = false;
    for (auto &b : u.boxes) {
      bool all = true;
      for (std::size_t j = 0; j < u.d && all; ++j) all = in_arc_plain(centers[g[j]], b.iv[j]);
      if (all) {
        in = true;
        break;
      }
    }
    if (in) {
      R.bitmap[c] = 1;
      ++R.hits;
    }
  }
  R.estimate = Rational(static_cast<unsigned long>(R.hits)) / Rational(static_cast<unsigned long>(cells));
  return R;
}

} // namespace bohrrec::oracle
