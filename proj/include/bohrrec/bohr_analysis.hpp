#pragma once

#include "rational.hpp"
#include "torus_boxes.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace bohrrec {

// ---- Bohr-Hamming balls ----

struct WeightedCoord {
  Rational value;
  std::uint64_t count = 1;
};

// coordinates of alpha_star are kept grouped by value; rank is the sum of counts
struct BHSpec {
  std::vector<WeightedCoord> alpha;
  Rational rho;
  std::size_t k = 0;
  Rational eta;

  std::uint64_t rank() const
  {
    std::uint64_t r = 0;
    for (auto &c : alpha) r += c.count;
    return r;
  }
};

inline std::vector<WeightedCoord> group_coords(const RatPoint &alpha)
{
  std::vector<WeightedCoord> g;
  for (auto &a : alpha) {
    Rational v = frac(a);
    auto it = std::find_if(g.begin(), g.end(), [&](const WeightedCoord &w) { return w.value == v; });
    if (it == g.end())
      g.push_back({v, 1});
    else
      ++it->count;
  }
  return g;
}

inline BHSpec make_bh(const RatPoint &alpha, const Rational &rho, std::size_t k, const Rational &eta)
{
  return BHSpec{group_coords(alpha), rho, k, eta};
}

inline void validate(const BHSpec &b)
{
  if (!(b.k < b.rank())) throw std::invalid_argument("BH spec needs k < d");
  if (!(b.eta > 0)) throw std::invalid_argument("BH spec needs eta > 0");
  if (b.rho < 0) throw std::invalid_argument("BH spec needs rho >= 0");
}

enum class Tri { yes, no, unknown };

inline const char *to_string(Tri t)
{
  switch (t) {
  case Tri::yes: return "yes";
  case Tri::no: return "no";
  default: return "unknown";
  }
}

struct BHCount {
  std::uint64_t far = 0, near = 0, uncertain = 0;
};

inline BHCount bh_classify(const BHSpec &spec, long n)
{
  BHCount c;
  Rational slack = spec.rho * (n < 0 ? -n : n);
  Rational hi = spec.eta + slack, lo = spec.eta - slack;
  for (auto &w : spec.alpha) {
    Rational v = torus_norm(w.value * n);
    if (v >= hi)
      c.far += w.count;
    else if (v < lo)
      c.near += w.count;
    else
      c.uncertain += w.count;
  }
  return c;
}

// membership of n in BH(alpha; k, eta) for every alpha within rho of alpha_star
inline Tri bh_contains(const BHSpec &spec, long n)
{
  BHCount c = bh_classify(spec, n);
  if (c.far + c.uncertain <= spec.k) return Tri::yes;
  if (c.far > spec.k) return Tri::no;
  return Tri::unknown;
}

// ---- minimax margin by branch and bound ----

struct MarginResult {
  Rational lower;
  Rational upper;
  RatPoint witness;
  std::uint64_t nodes = 0;
  bool converged = true;
};

struct MarginOptions {
  std::uint64_t node_budget = 4'000'000;
};

namespace detail {

using i128 = __int128;
constexpr int margin_bits = 60;
constexpr int margin_max_level = 58;
constexpr i128 margin_unit = i128(1) << margin_bits;

inline i128 floor_div(i128 a, i128 b)
{
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline i128 norm_units(i128 z)
{
  i128 r = z % margin_unit;
  if (r < 0) r += margin_unit;
  return std::min(r, margin_unit - r);
}

// sup of ||s x|| for x in [lo, hi]
inline i128 sup_norm_interval(long s, i128 lo, i128 hi)
{
  i128 u = s * lo, v = s * hi;
  if (u > v) std::swap(u, v);
  const i128 half = margin_unit / 2;
  if (v - u >= margin_unit) return half;
  i128 nmin = -floor_div(-(u - half), margin_unit);
  i128 nmax = floor_div(v - half, margin_unit);
  if (nmin <= nmax) return half;
  return std::max(norm_units(u), norm_units(v));
}

struct MarginNode {
  std::vector<std::uint64_t> lo;
  std::vector<std::uint8_t> lvl;
  i128 upper = 0;
};

struct NodeOrder {
  bool operator()(const MarginNode &a, const MarginNode &b) const
  {
    if (a.upper != b.upper) return a.upper < b.upper;
    // lexicographically smaller boxes first
    if (a.lo != b.lo) return a.lo > b.lo;
    return a.lvl > b.lvl;
  }
};

struct MarginProblem {
  std::vector<long> S;
  std::size_t d = 1;

  i128 value_at(const std::vector<i128> &x) const
  {
    i128 best = margin_unit;
    for (long s : S) {
      i128 m = 0;
      for (auto xj : x) m = std::max(m, norm_units(s * xj));
      best = std::min(best, m);
      if (best == 0) break;
    }
    return best;
  }

  i128 upper_of(const MarginNode &n) const
  {
    i128 best = margin_unit;
    for (long s : S) {
      i128 m = 0;
      for (std::size_t j = 0; j < d; ++j) {
        i128 lo = n.lo[j], hi = lo + (margin_unit >> n.lvl[j]);
        m = std::max(m, sup_norm_interval(s, lo, hi));
        if (m >= best) break;
      }
      best = std::min(best, m);
      if (best == 0) break;
    }
    return best;
  }

  std::vector<i128> center(const MarginNode &n) const
  {
    std::vector<i128> c(d);
    for (std::size_t j = 0; j < d; ++j) c[j] = i128(n.lo[j]) + (margin_unit >> (n.lvl[j] + 1));
    return c;
  }
};

inline Rational units_to_rational(i128 v)
{
  // v fits in 64 bits here
  Integer num(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
  return make_rational(num, integer_pow(2, margin_bits));
}

inline i128 rational_to_units_floor(const Rational &q)
{
  Integer f = floor_of(q * Rational(integer_pow(2, margin_bits)));
  if (f < 0) return 0;
  if (f > integer_pow(2, 62)) return i128(1) << 62;
  return static_cast<i128>(f.get_ui());
}

struct SearchOutcome {
  i128 best = -1;
  std::vector<i128> witness;
  i128 upper = 0;
  std::uint64_t nodes = 0;
  bool exhausted = false;  // budget hit or unsplittable boxes remain
};

// threshold: when set, boxes whose upper bound is below it are discarded and
// the search stops as soon as a point reaches it
inline SearchOutcome margin_search(const MarginProblem &P, std::optional<i128> tol, std::optional<i128> threshold,
                                   std::uint64_t budget)
{
  SearchOutcome out;
  std::priority_queue<MarginNode, std::vector<MarginNode>, NodeOrder> heap;
  MarginNode root{std::vector<std::uint64_t>(P.d, 0), std::vector<std::uint8_t>(P.d, 0), 0};
  root.upper = P.upper_of(root);
  auto consider = [&](const MarginNode &n) {
    auto c = P.center(n);
    i128 v = P.value_at(c);
    if (v > out.best) {
      out.best = v;
      out.witness = c;
    }
  };
  consider(root);
  out.nodes = 1;
  // the corner 0 is a legitimate point as well
  {
    std::vector<i128> z(P.d, 0);
    i128 v = P.value_at(z);
    if (v > out.best) {
      out.best = v;
      out.witness = z;
    }
  }
  heap.push(root);
  i128 stuck = -1, dropped = -1;
  while (!heap.empty()) {
    const MarginNode &top = heap.top();
    if (threshold) {
      if (out.best >= *threshold) break;
      if (top.upper < *threshold) {
        dropped = std::max(dropped, top.upper);
        heap.pop();
        continue;
      }
    } else if (top.upper - out.best <= *tol) {
      break;
    }
    if (top.upper <= out.best) {
      heap.pop();
      continue;
    }
    if (out.nodes >= budget) {
      out.exhausted = true;
      break;
    }
    MarginNode cur = top;
    heap.pop();
    std::size_t j = 0;
    for (std::size_t t = 1; t < P.d; ++t)
      if (cur.lvl[t] < cur.lvl[j]) j = t;
    if (cur.lvl[j] >= margin_max_level) {
      stuck = std::max(stuck, cur.upper);
      out.exhausted = true;
      continue;
    }
    for (int half = 0; half < 2; ++half) {
      MarginNode ch = cur;
      ch.lvl[j] = static_cast<std::uint8_t>(cur.lvl[j] + 1);
      if (half) ch.lo[j] = cur.lo[j] + static_cast<std::uint64_t>(margin_unit >> ch.lvl[j]);
      ch.upper = P.upper_of(ch);
      ++out.nodes;
      consider(ch);
      if (threshold && ch.upper < *threshold) {
        dropped = std::max(dropped, ch.upper);
        continue;
      }
      if (ch.upper > out.best) heap.push(std::move(ch));
    }
  }
  i128 up = out.best;
  if (!heap.empty()) up = std::max(up, heap.top().upper);
  up = std::max(up, std::max(stuck, dropped));
  out.upper = up;
  return out;
}

inline RatPoint units_point(const std::vector<i128> &x)
{
  RatPoint r;
  for (auto v : x) r.push_back(units_to_rational(v));
  return r;
}

inline MarginProblem make_problem(const std::vector<long> &S, std::size_t d)
{
  if (S.empty()) throw std::invalid_argument("S must be nonempty");
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  for (long s : S)
    if (s > (1L << 40) || s < -(1L << 40)) throw std::invalid_argument("element of S too large for the solver");
  return MarginProblem{S, d};
}

} // namespace detail

// enclosure of sup over alpha of min over s of ||s alpha||
inline MarginResult recurrence_margin(const std::vector<long> &S, std::size_t d, const Rational &tol,
                                      const MarginOptions &opt = {})
{
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  auto P = detail::make_problem(S, d);
  auto o = detail::margin_search(P, detail::rational_to_units_floor(tol), std::nullopt, opt.node_budget);
  MarginResult r;
  r.lower = detail::units_to_rational(o.best);
  r.upper = detail::units_to_rational(o.upper);
  r.witness = detail::units_point(o.witness);
  r.nodes = o.nodes;
  r.converged = (r.upper - r.lower) <= tol;
  return r;
}

struct RecurrenceDecision {
  bool recurrent = false;
  MarginResult margin;
};

struct UndecidedError : std::runtime_error {
  MarginResult margin;
  UndecidedError(const std::string &w, MarginResult m) : std::runtime_error(w), margin(std::move(m)) {}
};

// recurrent iff the margin is below eps; threshold search with the enclosure
// tightened until eps falls outside it
inline RecurrenceDecision is_recurrent(const std::vector<long> &S, std::size_t d, const Rational &eps,
                                       const MarginOptions &opt = {})
{
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  auto P = detail::make_problem(S, d);
  Integer scaled = ceil_of(eps * Rational(integer_pow(2, detail::margin_bits)));
  detail::i128 th = scaled > integer_pow(2, 62) ? (detail::i128(1) << 62) : static_cast<detail::i128>(scaled.get_ui());
  auto o = detail::margin_search(P, std::nullopt, th, opt.node_budget);
  RecurrenceDecision dec;
  dec.margin.lower = detail::units_to_rational(o.best);
  dec.margin.upper = detail::units_to_rational(o.upper);
  dec.margin.witness = detail::units_point(o.witness);
  dec.margin.nodes = o.nodes;
  if (dec.margin.lower >= eps) {
    dec.recurrent = false;
    return dec;
  }
  if (!o.exhausted && dec.margin.upper < eps) {
    dec.recurrent = true;
    return dec;
  }
  dec.margin.converged = false;
  throw UndecidedError("recurrence undecided within node budget", dec.margin);
}

struct TranslateCheck {
  bool ok = true;
  std::optional<long> failing_m;
  std::vector<std::pair<long, RecurrenceDecision>> results;
};

// order 0, 1, -1, 2, -2, ...
inline std::vector<long> translate_order(long M)
{
  std::vector<long> ms{0};
  for (long m = 1; m <= M; ++m) {
    ms.push_back(m);
    ms.push_back(-m);
  }
  return ms;
}

inline std::vector<long> shift_set(const std::vector<long> &S, long m)
{
  std::vector<long> r;
  r.reserve(S.size());
  for (long s : S) r.push_back(s - m);
  std::sort(r.begin(), r.end());
  return r;
}

inline TranslateCheck check_translates(const std::vector<long> &S, std::size_t d, const Rational &eps, long M,
                                       const MarginOptions &opt = {})
{
  TranslateCheck tc;
  for (long m : translate_order(M)) {
    auto dec = is_recurrent(shift_set(S, m), d, eps, opt);
    tc.results.emplace_back(m, dec);
    if (!dec.recurrent) {
      tc.ok = false;
      tc.failing_m = m;
      return tc;
    }
  }
  return tc;
}

// ---- symbolic reals over {1, theta_1, theta_2, ...} ----

constexpr std::size_t default_symbol_cap = 16;

struct SymbolicReal {
  std::vector<Rational> coeffs;  // coeffs[0] is the constant term

  Rational coeff(std::size_t i) const { return i < coeffs.size() ? coeffs[i] : Rational(0); }
  bool is_rational() const
  {
    for (std::size_t i = 1; i < coeffs.size(); ++i)
      if (coeffs[i] != 0) return false;
    return true;
  }
  bool operator==(const SymbolicReal &o) const
  {
    std::size_t n = std::max(coeffs.size(), o.coeffs.size());
    for (std::size_t i = 0; i < n; ++i)
      if (coeff(i) != o.coeff(i)) return false;
    return true;
  }
};

inline SymbolicReal sym_const(const Rational &q) { return SymbolicReal{{q}}; }

inline SymbolicReal sym_theta(std::size_t i, const Rational &c = 1)
{
  if (i == 0) throw std::invalid_argument("symbols are numbered from 1");
  SymbolicReal r;
  r.coeffs.assign(i + 1, Rational(0));
  r.coeffs[i] = c;
  return r;
}

inline SymbolicReal operator+(const SymbolicReal &a, const SymbolicReal &b)
{
  SymbolicReal r;
  std::size_t n = std::max(a.coeffs.size(), b.coeffs.size());
  r.coeffs.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.coeffs[i] = a.coeff(i) + b.coeff(i);
  return r;
}

inline SymbolicReal operator*(const Rational &c, const SymbolicReal &a)
{
  SymbolicReal r = a;
  for (auto &x : r.coeffs) x *= c;
  return r;
}

inline SymbolicReal operator-(const SymbolicReal &a, const SymbolicReal &b) { return a + Rational(-1) * b; }

namespace detail {

inline std::size_t basis_size(const std::vector<SymbolicReal> &v)
{
  std::size_t n = 1;
  for (auto &x : v) n = std::max(n, x.coeffs.size());
  return n;
}

// reduced row echelon form of the columns; returns pivot columns
inline std::vector<std::size_t> rref(std::vector<std::vector<Rational>> &m, std::size_t cols)
{
  std::vector<std::size_t> piv;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < m.size(); ++c) {
    std::size_t r = row;
    while (r < m.size() && m[r][c] == 0) ++r;
    if (r == m.size()) continue;
    std::swap(m[r], m[row]);
    Rational inv = Rational(1) / m[row][c];
    for (auto &x : m[row]) x *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == row || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (std::size_t t = 0; t < cols; ++t) m[i][t] -= f * m[row][t];
    }
    piv.push_back(c);
    ++row;
  }
  return piv;
}

// matrix whose columns are the given vectors
inline std::vector<std::vector<Rational>> column_matrix(const std::vector<SymbolicReal> &cols, std::size_t n)
{
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(cols.size(), Rational(0)));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < n; ++r) m[r][c] = cols[c].coeff(r);
  return m;
}

inline std::size_t rank_of(const std::vector<SymbolicReal> &vs)
{
  if (vs.empty()) return 0;
  std::size_t n = basis_size(vs);
  auto m = column_matrix(vs, n);
  return rref(m, vs.size()).size();
}

// kernel basis of the column matrix, one vector per free column
inline std::vector<std::vector<Rational>> kernel_of(const std::vector<SymbolicReal> &cols)
{
  std::size_t n = basis_size(cols);
  auto m = column_matrix(cols, n);
  auto piv = rref(m, cols.size());
  std::vector<std::vector<Rational>> ker;
  std::vector<char> is_piv(cols.size(), 0);
  for (auto c : piv) is_piv[c] = 1;
  for (std::size_t f = 0; f < cols.size(); ++f) {
    if (is_piv[f]) continue;
    std::vector<Rational> v(cols.size(), Rational(0));
    v[f] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m[r][f];
    ker.push_back(std::move(v));
  }
  return ker;
}

inline void check_symbol_cap(const std::vector<SymbolicReal> &v)
{
  if (basis_size(v) > default_symbol_cap + 1) throw std::invalid_argument("too many symbols");
}

} // namespace detail

// span(alpha) meets span(beta, 1) only in 0
inline bool q_disjoint(const std::vector<SymbolicReal> &alpha, const std::vector<SymbolicReal> &beta)
{
  std::vector<SymbolicReal> b1 = beta;
  b1.push_back(sym_const(1));
  std::vector<SymbolicReal> all = alpha;
  all.insert(all.end(), b1.begin(), b1.end());
  detail::check_symbol_cap(all);
  return detail::rank_of(alpha) + detail::rank_of(b1) == detail::rank_of(all);
}

inline bool independent_with_one(const std::vector<SymbolicReal> &alpha)
{
  std::vector<SymbolicReal> a = alpha;
  a.push_back(sym_const(1));
  return detail::rank_of(a) == a.size();
}

// indices (0-based) I' of size d - k with span(alpha_I') disjoint from span(beta, 1)
inline std::vector<std::size_t> choose_indices(const std::vector<SymbolicReal> &alpha, const std::vector<SymbolicReal> &beta)
{
  const std::size_t d = alpha.size(), k = beta.size();
  if (!(k < d)) throw std::invalid_argument("choose_indices needs k < d");
  std::vector<SymbolicReal> all = alpha;
  all.insert(all.end(), beta.begin(), beta.end());
  detail::check_symbol_cap(all);
  if (!independent_with_one(alpha)) throw std::invalid_argument("alpha together with 1 is not independent over Q");
  std::vector<std::size_t> I(d);
  for (std::size_t i = 0; i < d; ++i) I[i] = i;
  while (true) {
    std::vector<SymbolicReal> cols;
    for (auto i : I) cols.push_back(alpha[i]);
    cols.insert(cols.end(), beta.begin(), beta.end());
    cols.push_back(sym_const(1));
    auto ker = detail::kernel_of(cols);
    std::optional<std::size_t> drop;
    for (auto &v : ker) {
      for (std::size_t t = 0; t < I.size(); ++t)
        if (v[t] != 0) {
          drop = t;
          break;
        }
      if (drop) break;
    }
    if (!drop) break;
    I.erase(I.begin() + static_cast<long>(*drop));
  }
  if (I.size() < d - k) throw std::logic_error("choose_indices removed more than k indices");
  I.resize(d - k);
  return I;
}

// ---- Bohr sets ----

struct BohrSpec {
  std::vector<SymbolicReal> alpha;
  Rational radius;
  long center = 0;
  // B(alpha; U) for a box U instead of the radius ball when present
  std::optional<Box> window;

  bool operator==(const BohrSpec &o) const
  {
    return alpha == o.alpha && radius == o.radius && center == o.center && window == o.window;
  }
};

struct SymbolicBH {
  std::vector<SymbolicReal> alpha;
  std::size_t k = 0;
  Rational eta;
};

inline BohrSpec bh_inner_bohr(const SymbolicBH &bh, const std::vector<SymbolicReal> &beta)
{
  if (beta.size() > bh.k) throw std::invalid_argument("beta has more than k coordinates");
  if (!(bh.k < bh.alpha.size())) throw std::invalid_argument("BH needs k < d");
  auto idx = choose_indices(bh.alpha, beta);
  idx.resize(bh.alpha.size() - bh.k);
  BohrSpec b;
  for (auto i : idx) b.alpha.push_back(bh.alpha[i]);
  b.radius = bh.eta;
  b.center = 0;
  return b;
}

// rational stand-ins for the symbols: theta_i -> frac(sqrt(q_i)), q_i the i-th prime
struct ProxyAssignment {
  std::vector<Rational> theta;  // theta[0] unused

  Rational value(const SymbolicReal &x) const
  {
    Rational v = x.coeff(0);
    for (std::size_t i = 1; i < x.coeffs.size(); ++i) {
      if (x.coeffs[i] == 0) continue;
      if (i >= theta.size()) throw std::invalid_argument("no proxy for symbol");
      v += x.coeffs[i] * theta[i];
    }
    return v;
  }
};

inline ProxyAssignment default_proxies(std::size_t symbols = default_symbol_cap, unsigned bits = 64)
{
  ProxyAssignment pa;
  pa.theta.push_back(Rational(0));
  unsigned long q = 2;
  for (std::size_t i = 1; i <= symbols; ++i) {
    while (!is_prime(q)) ++q;
    Integer scaled = Integer(q) * integer_pow(2, 2 * bits), root;
    mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
    pa.theta.push_back(frac(make_rational(root, integer_pow(2, bits))));
    ++q;
  }
  return pa;
}

inline bool bohr_member(const BohrSpec &b, long n, const ProxyAssignment &pa)
{
  RatPoint v;
  for (auto &a : b.alpha) v.push_back(frac(pa.value(a) * (n - b.center)));
  if (b.window) return point_in_box(*b.window, v);
  for (auto &x : v)
    if (!(torus_norm(x) < b.radius)) return false;
  return true;
}

// denominators of continued-fraction convergents of x up to qmax
inline std::vector<long> convergent_denominators(const Rational &x, long qmax)
{
  std::vector<long> out;
  Rational y = frac(x);
  Integer a = y.get_num(), b = y.get_den();
  Integer k0 = 1, k1 = 0;
  while (b != 0) {
    Integer t = a / b;
    Integer r = a - t * b;
    Integer k2 = t * k1 + k0;
    if (k2 > qmax) break;
    if (k2 > 0 && (out.empty() || out.back() != k2.get_si())) out.push_back(k2.get_si());
    k0 = k1;
    k1 = k2;
    a = b;
    b = r;
  }
  return out;
}

struct IntersectResult {
  bool nonempty = false;
  bool trivial = false;
  std::optional<long> member;
};

namespace detail {

inline std::optional<long> find_member(const std::vector<const BohrSpec *> &bs, long n_max, const ProxyAssignment &pa)
{
  auto ok = [&](long n) {
    for (auto *b : bs)
      if (!bohr_member(*b, n, pa)) return false;
    return true;
  };
  std::vector<long> cand;
  for (auto *b : bs)
    for (auto &a : b->alpha)
      for (long q : convergent_denominators(frac(pa.value(a)), n_max)) {
        for (auto *c : bs) {
          cand.push_back(c->center + q);
          cand.push_back(c->center - q);
        }
      }
  for (auto *b : bs) cand.push_back(b->center);
  for (long n : cand)
    if (n != 0 && (n < 0 ? -n : n) <= n_max && ok(n)) return n;
  for (long m = 1; m <= n_max; ++m) {
    if (ok(m)) return m;
    if (ok(-m)) return -m;
  }
  if (ok(0)) return 0;
  return std::nullopt;
}

} // namespace detail

inline IntersectResult bohr_intersect_nonempty(const BohrSpec &b1, const BohrSpec &b2, long n_max = 10000,
                                               const ProxyAssignment &pa = default_proxies())
{
  IntersectResult r;
  if (b1 == b2) {
    r.trivial = true;
    r.member = detail::find_member({&b1}, n_max, pa);
    if (!r.member) throw std::invalid_argument("Bohr set has no certified member in range");
    r.nonempty = true;
    return r;
  }
  if (!q_disjoint(b1.alpha, b2.alpha)) throw std::invalid_argument("frequency vectors are not disjoint");
  if (!detail::find_member({&b1}, n_max, pa) || !detail::find_member({&b2}, n_max, pa))
    throw std::invalid_argument("a Bohr set has no certified member in range");
  r.nonempty = true;
  r.member = detail::find_member({&b1, &b2}, n_max, pa);
  return r;
}

} // namespace bohrrec
