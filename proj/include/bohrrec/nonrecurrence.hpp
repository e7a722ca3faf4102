#pragma once

#include "rational.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace bohrrec {

using IntSet = std::vector<long>;  // sorted, unique

inline IntSet normalize_set(IntSet s)
{
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

struct Witness {
  long N = 0;
  IntSet S;
  IntSet A;
  bool optimal = true;

  Rational density() const { return N > 0 ? make_rational(static_cast<long>(A.size()), N) : Rational(0); }
};

struct CyclicWitness {
  long N = 0;
  IntSet S;
  IntSet A;

  Rational density() const { return N > 0 ? make_rational(static_cast<long>(A.size()), N) : Rational(0); }
};

struct UnionCertificate {
  std::vector<CyclicWitness> parts;
  CyclicWitness combined;
};

constexpr unsigned default_window_cap = 24;
constexpr std::uint64_t default_dp_cells = std::uint64_t{1} << 26;

inline long max_abs(const IntSet &S)
{
  long m = 0;
  for (long s : S) m = std::max(m, s < 0 ? -s : s);
  return m;
}

inline bool verify_witness(const Witness &w)
{
  if (w.N < 0) return false;
  for (long s : w.S)
    if (s == 0) return false;
  std::set<long> in;
  long prev = -1;
  for (long a : w.A) {
    if (a < 0 || a >= w.N || a <= prev) return false;
    prev = a;
    in.insert(a);
  }
  for (long a : w.A)
    for (long s : w.S) {
      long b = a + s;
      if (b < 0 || b >= w.N) return false;
      if (in.count(b)) return false;
    }
  return true;
}

inline long mod_floor(long a, long n)
{
  long r = a % n;
  return r < 0 ? r + n : r;
}

inline bool verify_cyclic(const CyclicWitness &w)
{
  if (w.N <= 0) return false;
  std::vector<char> in(static_cast<std::size_t>(w.N), 0);
  long prev = -1;
  for (long a : w.A) {
    if (a < 0 || a >= w.N || a <= prev) return false;
    prev = a;
    in[static_cast<std::size_t>(a)] = 1;
  }
  for (long s : w.S) {
    if (mod_floor(s, w.N) == 0) return false;
    for (long a : w.A)
      if (in[static_cast<std::size_t>(mod_floor(a + s, w.N))]) return false;
  }
  return true;
}

namespace detail {

// maximum subset of positions [0, len) with allowed[i], no two chosen at a
// distance in dist; each position may also be barred by a mask on a fixed
// prefix state (cyclic wrap). Lexicographically least optimum.
struct WindowDP {
  std::size_t len = 0;
  std::vector<char> allowed;
  std::vector<long> dist;  // each in [1, window]
  unsigned window = 0;
  std::uint64_t dp_cells = default_dp_cells;
};

using Mask = std::uint32_t;

inline std::optional<std::vector<std::size_t>> solve_window(const WindowDP &P, Mask init_state = 0,
                                                           const std::vector<Mask> *barred = nullptr,
                                                           Mask prefix = 0, std::size_t *best_out = nullptr)
{
  const unsigned M = P.window;
  const std::size_t nstates = std::size_t{1} << M;
  const Mask full = M == 32 ? ~Mask{0} : static_cast<Mask>(nstates - 1);
  if (static_cast<std::uint64_t>(P.len + 1) * nstates > P.dp_cells) return std::nullopt;
  Mask conflict = 0;
  for (long d : P.dist) conflict |= Mask{1} << (d - 1);
  std::vector<std::vector<std::uint32_t>> best(P.len + 1, std::vector<std::uint32_t>(nstates, 0));
  for (std::size_t i = P.len; i-- > 0;) {
    auto &cur = best[i];
    const auto &nxt = best[i + 1];
    bool can = P.allowed[i] && !(barred && ((*barred)[i] & prefix));
    for (std::size_t st = 0; st < nstates; ++st) {
      Mask s = static_cast<Mask>(st);
      Mask ex = M == 0 ? 0 : static_cast<Mask>((s << 1) & full);
      std::uint32_t v = nxt[ex];
      if (can && !(s & conflict)) {
        Mask in = M == 0 ? 0 : static_cast<Mask>(((s << 1) | 1) & full);
        v = std::max(v, nxt[in] + 1);
      }
      cur[st] = v;
    }
  }
  std::vector<std::size_t> chosen;
  Mask s = init_state & full;
  for (std::size_t i = 0; i < P.len; ++i) {
    bool can = P.allowed[i] && !(barred && ((*barred)[i] & prefix)) && !(s & conflict);
    Mask ex = M == 0 ? 0 : static_cast<Mask>((s << 1) & full);
    Mask in = M == 0 ? 0 : static_cast<Mask>(((s << 1) | 1) & full);
    if (can && best[i + 1][in] + 1 == best[i][s]) {
      chosen.push_back(i);
      s = in;
    } else {
      s = ex;
    }
  }
  if (best_out) *best_out = best[0][init_state & full];
  return chosen;
}

inline std::vector<long> forbidden_distances(const IntSet &S)
{
  std::vector<long> d;
  for (long s : S) d.push_back(s < 0 ? -s : s);
  return normalize_set(d);
}

} // namespace detail

// largest A in [N] with A ∩ (A+S) empty and A+S inside [N]
inline Witness max_avoiding_set(const IntSet &S_in, long N, unsigned window_cap = default_window_cap,
                                std::uint64_t dp_cells = default_dp_cells)
{
  IntSet S = normalize_set(S_in);
  for (long s : S)
    if (s == 0) throw std::invalid_argument("0 in S");
  if (N < 1) throw std::invalid_argument("N must be positive");
  long lo = 0, hi = N - 1;
  for (long s : S) {
    if (s < 0) lo = std::max(lo, -s);
    if (s > 0) hi = std::min(hi, N - 1 - s);
  }
  Witness w{N, S, {}, true};
  if (lo > hi) return w;
  auto dist = detail::forbidden_distances(S);
  long M = dist.empty() ? 0 : dist.back();
  detail::WindowDP P;
  P.len = static_cast<std::size_t>(hi - lo + 1);
  P.allowed.assign(P.len, 1);
  P.dist = dist;
  P.dp_cells = dp_cells;
  // distances longer than the feasible range never bind
  std::vector<long> used;
  for (long d : dist)
    if (d < static_cast<long>(P.len)) used.push_back(d);
  P.dist = used;
  M = used.empty() ? 0 : used.back();
  std::optional<std::vector<std::size_t>> sol;
  if (M <= static_cast<long>(window_cap) && M <= 30) {
    P.window = static_cast<unsigned>(M);
    sol = detail::solve_window(P);
  }
  if (!sol) {
    // greedy, flagged
    std::vector<char> in(P.len, 0);
    std::vector<std::size_t> g;
    for (std::size_t i = 0; i < P.len; ++i) {
      bool ok = true;
      for (long d : used)
        if (static_cast<long>(i) >= d && in[i - static_cast<std::size_t>(d)]) ok = false;
      if (ok) {
        in[i] = 1;
        g.push_back(i);
      }
    }
    sol = g;
    w.optimal = false;
  }
  for (auto i : *sol) w.A.push_back(lo + static_cast<long>(i));
  return w;
}

constexpr unsigned default_cyclic_window_cap = 10;

inline CyclicWitness max_cyclic_avoiding(const IntSet &S_in, long N, unsigned window_cap = default_cyclic_window_cap)
{
  IntSet S = normalize_set(S_in);
  if (N < 1) throw std::invalid_argument("N must be positive");
  std::vector<long> dist;
  for (long s : S) {
    long r = mod_floor(s, N);
    if (r == 0) throw std::invalid_argument("some s is 0 mod N");
    dist.push_back(std::min(r, N - r));
  }
  dist = normalize_set(dist);
  CyclicWitness w{N, S, {}};
  if (dist.empty()) {
    for (long i = 0; i < N; ++i) w.A.push_back(i);
    return w;
  }
  long M = dist.back();
  if (M > static_cast<long>(window_cap)) throw std::invalid_argument("cyclic window over cap");
  const unsigned m = static_cast<unsigned>(M);
  const detail::Mask np = detail::Mask{1} << m;
  detail::WindowDP P;
  P.len = static_cast<std::size_t>(N - M);
  P.allowed.assign(P.len, 1);
  P.dist = dist;
  P.window = m;
  P.dp_cells = std::uint64_t{1} << 40;
  // barred[i]: prefix bits conflicting with position M+i across the wrap
  std::vector<detail::Mask> barred(P.len, 0);
  for (std::size_t i = 0; i < P.len; ++i) {
    long pos = M + static_cast<long>(i);
    for (long d : dist)
      if (pos + d >= N) {
        long j = pos + d - N;
        // window bit b holds position (M-1-b) at the start of the scan
        barred[i] |= detail::Mask{1} << (m - 1 - static_cast<unsigned>(j));
      }
  }
  std::optional<std::vector<long>> best_set;
  std::size_t best_size = 0;
  for (detail::Mask pre = 0; pre < np; ++pre) {
    // prefix positions 0..M-1; bit b of the state is position M-1-b
    std::vector<long> prefix_pos;
    bool ok = true;
    for (unsigned b = 0; b < m; ++b)
      if (pre >> b & 1) prefix_pos.push_back(static_cast<long>(m - 1 - b));
    std::sort(prefix_pos.begin(), prefix_pos.end());
    for (std::size_t x = 0; x < prefix_pos.size() && ok; ++x)
      for (std::size_t y = x + 1; y < prefix_pos.size() && ok; ++y) {
        long g = prefix_pos[y] - prefix_pos[x];
        if (std::binary_search(dist.begin(), dist.end(), g) || std::binary_search(dist.begin(), dist.end(), N - g)) ok = false;
      }
    if (!ok) continue;
    std::size_t tail = 0;
    auto sol = detail::solve_window(P, pre, &barred, pre, &tail);
    std::vector<long> A = prefix_pos;
    for (auto i : *sol) A.push_back(M + static_cast<long>(i));
    std::size_t sz = A.size();
    if (!best_set || sz > best_size || (sz == best_size && A < *best_set)) {
      best_set = A;
      best_size = sz;
    }
  }
  w.A = *best_set;
  return w;
}

inline CyclicWitness finite_set_certificate(const IntSet &S)
{
  for (long s : S)
    if (s == 0) throw std::invalid_argument("0 in S");
  return max_cyclic_avoiding(S, 1 + max_abs(S));
}

inline UnionCertificate union_certificate(const CyclicWitness &w1, const CyclicWitness &w2)
{
  if (std::gcd(w1.N, w2.N) != 1) throw std::invalid_argument("moduli are not coprime");
  if (!verify_cyclic(w1) || !verify_cyclic(w2)) throw std::invalid_argument("invalid part witness");
  UnionCertificate u{{w1, w2}, {}};
  u.combined.N = w1.N * w2.N;
  IntSet S = w1.S;
  S.insert(S.end(), w2.S.begin(), w2.S.end());
  u.combined.S = normalize_set(S);
  for (long n = 0; n < u.combined.N; ++n)
    if (std::binary_search(w1.A.begin(), w1.A.end(), n % w1.N) && std::binary_search(w2.A.begin(), w2.A.end(), n % w2.N))
      u.combined.A.push_back(n);
  if (!verify_cyclic(u.combined)) throw std::logic_error("combined witness failed verification");
  return u;
}

struct DeltaSearch {
  std::optional<Witness> witness;
  Rational best_density;
  long best_N = 0;
};

inline DeltaSearch delta_certificate(const IntSet &S, const Rational &delta, long N_lo, long N_hi)
{
  for (long s : S)
    if (s == 0) throw std::invalid_argument("0 in S");
  DeltaSearch r;
  r.best_density = -1;
  for (long N = std::max(1L, N_lo); N <= N_hi; ++N) {
    Witness w = max_avoiding_set(S, N);
    Rational dens = w.density();
    if (dens > r.best_density) {
      r.best_density = dens;
      r.best_N = N;
    }
    if (dens > delta) {
      r.witness = w;
      return r;
    }
  }
  return r;
}

// interval witness of length L from a cyclic pattern, valid for S whenever
// the pattern avoids S mod N
inline Witness unroll_cyclic(const CyclicWitness &cw, const IntSet &S_in, long L)
{
  IntSet S = normalize_set(S_in);
  CyclicWitness probe{cw.N, S, cw.A};
  if (!verify_cyclic(probe)) throw std::invalid_argument("pattern does not avoid S modulo N");
  long lo = 0, hi = L - 1;
  for (long s : S) {
    if (s < 0) lo = std::max(lo, -s);
    if (s > 0) hi = std::min(hi, L - 1 - s);
  }
  Witness w{L, S, {}, false};
  for (long a = lo; a <= hi; ++a)
    if (std::binary_search(cw.A.begin(), cw.A.end(), mod_floor(a, cw.N))) w.A.push_back(a);
  return w;
}

} // namespace bohrrec
