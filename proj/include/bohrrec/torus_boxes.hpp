#pragma once

#include "hamming_cells.hpp"
#include "rational.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bohrrec {

// [start, start+length) mod 1
struct TorusInterval {
  Rational start;
  Rational length;

  bool full() const { return length >= 1; }
  bool empty() const { return length <= 0; }
  bool operator==(const TorusInterval &) const = default;
};

inline TorusInterval make_interval(const Rational &start, const Rational &length)
{
  if (length < 0) throw std::invalid_argument("negative interval length");
  if (length >= 1) return TorusInterval{Rational(0), Rational(1)};
  return TorusInterval{frac(start), length};
}

// [lo, hi) read on the circle; hi may be below lo to mean a wrap
inline TorusInterval interval_from_to(const Rational &lo, const Rational &hi)
{
  Rational a = frac(lo), b = hi - lo;
  if (b > 1) b = 1;
  return make_interval(a, b);
}

struct Box {
  std::vector<TorusInterval> iv;

  std::size_t d() const { return iv.size(); }
  bool operator==(const Box &) const = default;
};

using RatPoint = std::vector<Rational>;

struct BoxUnion {
  std::size_t d = 1;
  bool closed = false;
  std::vector<Box> boxes;
  bool disjoint = true;  // false: boxes may overlap, measure() splits first
};

struct BoxCapError : std::length_error {
  using std::length_error::length_error;
};

constexpr std::size_t default_box_cap = 1'000'000;

namespace detail {

struct Piece {
  Rational lo, hi;  // 0 <= lo < hi <= 1
};

inline std::vector<Piece> pieces_of(const TorusInterval &a)
{
  std::vector<Piece> out;
  if (a.empty()) return out;
  if (a.full()) {
    out.push_back({Rational(0), Rational(1)});
    return out;
  }
  Rational end = a.start + a.length;
  if (end <= 1) {
    out.push_back({a.start, end});
  } else {
    out.push_back({Rational(0), end - 1});
    out.push_back({a.start, Rational(1)});
  }
  return out;
}

// sorted disjoint pieces back to arcs, joining across 0
inline std::vector<TorusInterval> arcs_of(std::vector<Piece> ps)
{
  std::vector<TorusInterval> out;
  std::sort(ps.begin(), ps.end(), [](const Piece &x, const Piece &y) { return x.lo < y.lo; });
  std::vector<Piece> merged;
  for (auto &p : ps) {
    if (p.hi <= p.lo) continue;
    if (!merged.empty() && merged.back().hi >= p.lo) {
      if (p.hi > merged.back().hi) merged.back().hi = p.hi;
    } else {
      merged.push_back(p);
    }
  }
  if (merged.size() >= 2 && merged.front().lo == 0 && merged.back().hi == 1) {
    Piece first = merged.front();
    merged.erase(merged.begin());
    Piece &last = merged.back();
    out.reserve(merged.size());
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) out.push_back({merged[i].lo, merged[i].hi - merged[i].lo});
    out.push_back({last.lo, (Rational(1) - last.lo) + first.hi});
    return out;
  }
  for (auto &p : merged) {
    if (p.lo == 0 && p.hi == 1)
      out.push_back({Rational(0), Rational(1)});
    else
      out.push_back({p.lo, p.hi - p.lo});
  }
  return out;
}

inline std::vector<TorusInterval> arc_intersect(const TorusInterval &a, const TorusInterval &b)
{
  std::vector<Piece> out;
  for (auto &x : pieces_of(a))
    for (auto &y : pieces_of(b)) {
      Rational lo = std::max(x.lo, y.lo), hi = std::min(x.hi, y.hi);
      if (lo < hi) out.push_back({lo, hi});
    }
  return arcs_of(std::move(out));
}

inline bool arcs_meet(const TorusInterval &a, const TorusInterval &b)
{
  if (a.empty() || b.empty()) return false;
  if (a.full() || b.full()) return true;
  // half-open arcs meet iff one start lies in the other
  Rational db = frac(b.start - a.start);
  if (db < a.length) return true;
  Rational da = frac(a.start - b.start);
  return da < b.length;
}

inline std::vector<TorusInterval> arc_difference(const TorusInterval &a, const TorusInterval &b)
{
  std::vector<Piece> cur = pieces_of(a);
  for (auto &y : pieces_of(b)) {
    std::vector<Piece> next;
    for (auto &x : cur) {
      if (y.hi <= x.lo || x.hi <= y.lo) {
        next.push_back(x);
        continue;
      }
      if (x.lo < y.lo) next.push_back({x.lo, y.lo});
      if (y.hi < x.hi) next.push_back({y.hi, x.hi});
    }
    cur.swap(next);
  }
  return arcs_of(std::move(cur));
}

inline bool boxes_meet(const Box &a, const Box &b)
{
  for (std::size_t j = 0; j < a.d(); ++j)
    if (!arcs_meet(a.iv[j], b.iv[j])) return false;
  return true;
}

inline void box_difference_rec(Box &cur, const Box &c, std::size_t j, std::vector<Box> &out)
{
  if (j == cur.d()) return;
  TorusInterval saved = cur.iv[j];
  for (auto &o : arc_difference(saved, c.iv[j])) {
    cur.iv[j] = o;
    out.push_back(cur);
  }
  for (auto &in : arc_intersect(saved, c.iv[j])) {
    cur.iv[j] = in;
    box_difference_rec(cur, c, j + 1, out);
  }
  cur.iv[j] = saved;
}

inline bool box_empty(const Box &b)
{
  for (auto &i : b.iv)
    if (i.empty()) return true;
  return false;
}

} // namespace detail

// a \ b as disjoint boxes
inline std::vector<Box> box_difference(const Box &a, const Box &b)
{
  std::vector<Box> out;
  if (!detail::boxes_meet(a, b)) {
    out.push_back(a);
    return out;
  }
  Box cur = a;
  detail::box_difference_rec(cur, b, 0, out);
  return out;
}

inline Rational box_volume(const Box &b)
{
  Rational v = 1;
  for (auto &i : b.iv) v *= std::min(i.length, Rational(1));
  return v;
}

// split overlaps so that stored boxes are pairwise disjoint
inline BoxUnion canonicalize(const BoxUnion &u, std::size_t cap = default_box_cap)
{
  BoxUnion r{u.d, u.closed, {}};
  for (const Box &b0 : u.boxes) {
    if (b0.d() != u.d) throw std::invalid_argument("box dimension mismatch");
    if (detail::box_empty(b0)) continue;
    Box b = b0;
    for (auto &i : b.iv) i = make_interval(i.start, i.length);
    std::vector<Box> pieces{b};
    for (const Box &e : r.boxes) {
      std::vector<Box> next;
      for (const Box &pc : pieces) {
        if (!detail::boxes_meet(pc, e)) {
          next.push_back(pc);
          continue;
        }
        auto diff = box_difference(pc, e);
        next.insert(next.end(), diff.begin(), diff.end());
      }
      pieces.swap(next);
      if (pieces.empty()) break;
    }
    r.boxes.insert(r.boxes.end(), pieces.begin(), pieces.end());
    if (r.boxes.size() > cap) throw BoxCapError("box count exceeds cap");
  }
  return r;
}

inline Rational measure(const BoxUnion &u)
{
  if (!u.disjoint) return measure(canonicalize(u));
  Rational m = 0;
  for (auto &b : u.boxes) m += box_volume(b);
  return m;
}

inline BoxUnion full_torus(std::size_t d)
{
  BoxUnion u{d, false, {}};
  u.boxes.push_back(Box{std::vector<TorusInterval>(d, TorusInterval{Rational(0), Rational(1)})});
  return u;
}

inline BoxUnion closure(BoxUnion u)
{
  u.closed = true;
  return u;
}

template <class Vec>
RatPoint phi(const Vec &coords, unsigned N)
{
  RatPoint out;
  out.reserve(coords.size());
  for (auto c : coords) {
    if (static_cast<unsigned long>(c) >= N) throw std::invalid_argument("coordinate not below modulus");
    out.push_back(make_rational(static_cast<long>(c), static_cast<long>(N)));
  }
  return out;
}

inline RatPoint phi(const GpVector &x) { return phi(x.coords, x.p); }

inline RatPoint add_points(const RatPoint &a, const RatPoint &b)
{
  if (a.size() != b.size()) throw std::invalid_argument("point dimension mismatch");
  RatPoint r(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) r[j] = frac(a[j] + b[j]);
  return r;
}

inline RatPoint scale_point(const RatPoint &a, long n)
{
  RatPoint r(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) r[j] = frac(a[j] * n);
  return r;
}

// phi(A) + [eps, 1/N - eps)^d
template <class Vecs>
BoxUnion cube_embed(const Vecs &A, unsigned N, const Rational &eps, std::size_t d)
{
  if (eps < 0 || !(eps * 2 * N < 1)) throw std::invalid_argument("cube_embed needs 0 <= eps < 1/(2N)");
  BoxUnion u{d, false, {}};
  Rational side = make_rational(1, static_cast<long>(N)) - 2 * eps;
  for (const auto &a : A) {
    if (a.size() != d) throw std::invalid_argument("vector dimension mismatch");
    Box b;
    b.iv.reserve(d);
    for (auto c : a) {
      if (static_cast<unsigned long>(c) >= N) throw std::invalid_argument("coordinate not below modulus");
      b.iv.push_back(make_interval(make_rational(static_cast<long>(c), static_cast<long>(N)) + eps, side));
    }
    u.boxes.push_back(std::move(b));
  }
  return u;
}

inline BoxUnion cube_embed(const std::vector<GpVector> &A, unsigned N, const Rational &eps, std::size_t d)
{
  std::vector<std::vector<unsigned>> raw;
  raw.reserve(A.size());
  for (auto &x : A) raw.push_back(x.coords);
  return cube_embed(raw, N, eps, d);
}

inline BoxUnion translate(const BoxUnion &u, const RatPoint &v)
{
  if (v.size() != u.d) throw std::invalid_argument("translation dimension mismatch");
  BoxUnion r{u.d, u.closed, {}, u.disjoint};
  r.boxes.reserve(u.boxes.size());
  for (auto &b : u.boxes) {
    Box nb = b;
    for (std::size_t j = 0; j < u.d; ++j)
      if (!nb.iv[j].full()) nb.iv[j].start = frac(nb.iv[j].start + v[j]);
    r.boxes.push_back(std::move(nb));
  }
  return r;
}

// split=false keeps the raw (overlapping) product boxes
inline BoxUnion minkowski_sum(const BoxUnion &u, const BoxUnion &v, std::size_t cap = default_box_cap, bool split = true)
{
  if (u.d != v.d) throw std::invalid_argument("dimension mismatch");
  BoxUnion raw{u.d, false, {}};
  raw.boxes.reserve(u.boxes.size() * v.boxes.size());
  for (auto &a : u.boxes)
    for (auto &b : v.boxes) {
      Box s;
      s.iv.reserve(u.d);
      for (std::size_t j = 0; j < u.d; ++j) s.iv.push_back(make_interval(a.iv[j].start + b.iv[j].start, a.iv[j].length + b.iv[j].length));
      raw.boxes.push_back(std::move(s));
      if (raw.boxes.size() > cap) throw BoxCapError("box count exceeds cap");
    }
  if (!split) {
    raw.disjoint = false;
    return raw;
  }
  return canonicalize(raw, cap);
}

// points with at most k coordinates at distance >= eta from 0; the
// half-open arcs put -eta on the near side, a null set more than the ball
inline BoxUnion approx_hamming(std::size_t d, std::size_t k, const Rational &eta, bool closed_flag = false,
                               std::size_t cap = default_box_cap)
{
  if (!(eta > 0)) throw std::invalid_argument("approx_hamming needs eta > 0");
  if (!(2 * eta < 1)) throw std::invalid_argument("approx_hamming needs eta < 1/2");
  if (!(k < d)) throw std::invalid_argument("approx_hamming needs k < d");
  TorusInterval near = make_interval(-eta, 2 * eta);
  TorusInterval far = make_interval(eta, 1 - 2 * eta);
  BoxUnion u{d, closed_flag, {}};
  // subsets F of size <= k in increasing mask order, listed by index vectors
  std::vector<std::size_t> F;
  auto emit = [&]() {
    Box b{std::vector<TorusInterval>(d, near)};
    for (auto j : F) b.iv[j] = far;
    u.boxes.push_back(std::move(b));
    if (u.boxes.size() > cap) throw BoxCapError("box count exceeds cap");
  };
  auto rec = [&](auto &&self, std::size_t from) -> void {
    emit();
    if (F.size() == k) return;
    for (std::size_t j = from; j < d; ++j) {
      F.push_back(j);
      self(self, j + 1);
      F.pop_back();
    }
  };
  rec(rec, 0);
  return u;
}

namespace detail {

inline std::uint64_t mpz_hash(const mpz_t z)
{
  std::uint64_t h = mpz_sgn(z) < 0 ? 0x9e3779b97f4a7c15ULL : 0;
  std::size_t n = mpz_size(z);
  for (std::size_t i = 0; i < n; ++i) h = (h ^ mpz_getlimbn(z, i)) * 0x100000001b3ULL;
  return h;
}

inline std::uint64_t arc_hash(const TorusInterval &x)
{
  std::uint64_t h = mpz_hash(x.start.get_num_mpz_t());
  h = h * 31 + mpz_hash(x.start.get_den_mpz_t());
  h = h * 31 + mpz_hash(x.length.get_num_mpz_t());
  return h * 31 + mpz_hash(x.length.get_den_mpz_t());
}

// distinct arcs per coordinate, and each box as a vector of arc ids
struct ArcTable {
  std::vector<std::vector<TorusInterval>> arcs;
  std::vector<std::vector<std::uint32_t>> ids;

  ArcTable(const std::vector<Box> &bs, std::size_t d) : arcs(d), ids(bs.size(), std::vector<std::uint32_t>(d))
  {
    for (std::size_t j = 0; j < d; ++j) {
      auto &a = arcs[j];
      std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> seen;
      for (std::size_t i = 0; i < bs.size(); ++i) {
        const TorusInterval &x = bs[i].iv[j];
        auto &bucket = seen[arc_hash(x)];
        std::uint32_t id = static_cast<std::uint32_t>(a.size());
        for (auto c : bucket)
          if (a[c] == x) {
            id = c;
            break;
          }
        if (id == a.size()) {
          bucket.push_back(id);
          a.push_back(x);
        }
        ids[i][j] = id;
      }
    }
  }

  std::size_t pairs_with(const ArcTable &o) const
  {
    std::size_t n = 0;
    for (std::size_t j = 0; j < arcs.size(); ++j) n += arcs[j].size() * o.arcs[j].size();
    return n;
  }
};

// rows of an ArcTable sorted lexicographically, searched prefix by prefix
struct BoxIndex {
  std::size_t d = 0;
  std::vector<std::vector<std::uint32_t>> rows;
  std::vector<std::size_t> which;

  explicit BoxIndex(const ArcTable &t) : d(t.arcs.size())
  {
    std::vector<std::size_t> ord(t.ids.size());
    for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(), [&](std::size_t x, std::size_t y) { return t.ids[x] < t.ids[y]; });
    rows.reserve(ord.size());
    for (auto i : ord) rows.push_back(t.ids[i]);
    which = std::move(ord);
  }

  std::size_t group_end(std::size_t i, std::size_t hi, std::size_t j) const
  {
    std::uint32_t v = rows[i][j];
    std::size_t a = i + 1, b = hi;
    while (a < b) {
      std::size_t m = a + (b - a) / 2;
      if (rows[m][j] == v)
        a = m + 1;
      else
        b = m;
    }
    return a;
  }

  // ok(j, id) filters coordinates; leaf(row) returns true to stop
  template <class Ok, class Leaf>
  bool search(Ok &&ok, Leaf &&leaf) const
  {
    auto rec = [&](auto &&self, std::size_t j, std::size_t lo, std::size_t hi) -> bool {
      if (j == d) {
        for (std::size_t r = lo; r < hi; ++r)
          if (leaf(which[r])) return true;
        return false;
      }
      for (std::size_t i = lo; i < hi;) {
        std::size_t e = group_end(i, hi, j);
        if (ok(j, rows[i][j]) && self(self, j + 1, i, e)) return true;
        i = e;
      }
      return false;
    };
    return !rows.empty() && rec(rec, 0, 0, rows.size());
  }

  // least over rows of max_j cost[j][id], pruned at the running best
  std::uint32_t min_max(const std::vector<const std::uint32_t *> &cost, std::uint32_t best) const
  {
    auto rec = [&](auto &&self, std::size_t j, std::size_t lo, std::size_t hi, std::uint32_t cur) -> void {
      if (j == d) {
        best = cur;
        return;
      }
      for (std::size_t i = lo; i < hi;) {
        std::size_t e = group_end(i, hi, j);
        std::uint32_t c = std::max(cur, cost[j][rows[i][j]]);
        if (c < best) self(self, j + 1, i, e, c);
        i = e;
      }
    };
    if (!rows.empty()) rec(rec, 0, 0, rows.size(), 0);
    return best;
  }
};

constexpr std::size_t index_threshold = 64;
constexpr std::size_t index_table_cap = std::size_t{1} << 22;

inline std::vector<char> arc_relation(const ArcTable &q, const ArcTable &v, std::size_t j,
                                      bool (*rel)(const TorusInterval &, const TorusInterval &))
{
  std::size_t nv = v.arcs[j].size();
  std::vector<char> r(q.arcs[j].size() * nv);
  for (std::size_t a = 0; a < q.arcs[j].size(); ++a)
    for (std::size_t b = 0; b < nv; ++b) r[a * nv + b] = rel(q.arcs[j][a], v.arcs[j][b]);
  return r;
}

inline bool arc_inside(const TorusInterval &a, const TorusInterval &b)
{
  if (a.empty() || b.full()) return true;
  if (a.full()) return false;
  Rational off = frac(a.start - b.start);
  return off + a.length <= b.length;
}

inline bool plain_difference_empty(const Box &b, const std::vector<const Box *> &vs)
{
  std::vector<Box> pieces{b};
  for (const Box *e : vs) {
    std::vector<Box> next;
    for (const Box &pc : pieces) {
      if (!boxes_meet(pc, *e)) {
        next.push_back(pc);
        continue;
      }
      auto diff = box_difference(pc, *e);
      next.insert(next.end(), diff.begin(), diff.end());
    }
    pieces.swap(next);
    if (pieces.empty()) return true;
  }
  return pieces.empty();
}

// set difference of half-open unions is empty
inline bool ho_subset(const std::vector<Box> &us, const std::vector<Box> &vs)
{
  if (!us.empty() && vs.size() > index_threshold) {
    std::size_t d = us.front().d();
    ArcTable qt(us, d), vt(vs, d);
    if (qt.pairs_with(vt) <= index_table_cap) {
      BoxIndex ix(vt);
      std::vector<std::vector<char>> inside(d), meet(d);
      for (std::size_t j = 0; j < d; ++j) {
        inside[j] = arc_relation(qt, vt, j, arc_inside);
        meet[j] = arc_relation(qt, vt, j, arcs_meet);
      }
      for (std::size_t i = 0; i < us.size(); ++i) {
        if (box_empty(us[i])) continue;
        const auto &q = qt.ids[i];
        auto at = [&](const std::vector<std::vector<char>> &rel, std::size_t j, std::uint32_t id) {
          return rel[j][q[j] * vt.arcs[j].size() + id] != 0;
        };
        if (ix.search([&](std::size_t j, std::uint32_t id) { return at(inside, j, id); },
                      [](std::size_t) { return true; }))
          continue;
        std::vector<std::size_t> hits;
        ix.search([&](std::size_t j, std::uint32_t id) { return at(meet, j, id); },
                  [&](std::size_t r) {
                    hits.push_back(r);
                    return false;
                  });
        std::sort(hits.begin(), hits.end());
        std::vector<const Box *> near;
        near.reserve(hits.size());
        for (auto r : hits) near.push_back(&vs[r]);
        if (!plain_difference_empty(us[i], near)) return false;
      }
      return true;
    }
  }
  std::vector<const Box *> all;
  all.reserve(vs.size());
  for (auto &e : vs) all.push_back(&e);
  for (const Box &b : us)
    if (!box_empty(b) && !plain_difference_empty(b, all)) return false;
  return true;
}

inline Rational min_positive_gap(const BoxUnion &u, const BoxUnion &v)
{
  std::vector<Rational> pts{Rational(0), Rational(1)};
  for (auto *w : {&u, &v})
    for (auto &b : w->boxes)
      for (auto &i : b.iv) {
        pts.push_back(i.start);
        pts.push_back(frac(i.start + i.length));
      }
  std::sort(pts.begin(), pts.end());
  Rational best = 1;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    Rational g = pts[i] - pts[i - 1];
    if (g > 0 && g < best) best = g;
  }
  return best;
}

} // namespace detail

// containment of the represented sets, honouring the closed flags
inline bool is_subset(const BoxUnion &u, const BoxUnion &v)
{
  if (u.d != v.d) throw std::invalid_argument("dimension mismatch");
  if (!u.closed || v.closed) return detail::ho_subset(u.boxes, v.boxes);
  // closed u inside half-open v: grow u to the right by less than any gap
  Rational delta = detail::min_positive_gap(u, v) / 2;
  std::vector<Box> grown;
  grown.reserve(u.boxes.size());
  for (auto &b : u.boxes) {
    Box g = b;
    for (auto &i : g.iv) i = make_interval(i.start, i.length + delta);
    grown.push_back(std::move(g));
  }
  return detail::ho_subset(grown, v.boxes);
}

inline bool intersects(const BoxUnion &u, const BoxUnion &v)
{
  if (u.d != v.d) throw std::invalid_argument("dimension mismatch");
  if (u.boxes.empty() || v.boxes.empty()) return false;
  if (v.boxes.size() > detail::index_threshold) {
    detail::ArcTable qt(u.boxes, u.d), vt(v.boxes, v.d);
    if (qt.pairs_with(vt) <= detail::index_table_cap) {
      detail::BoxIndex ix(vt);
      std::vector<std::vector<char>> meet(u.d);
      for (std::size_t j = 0; j < u.d; ++j) meet[j] = detail::arc_relation(qt, vt, j, detail::arcs_meet);
      for (std::size_t i = 0; i < u.boxes.size(); ++i) {
        if (detail::box_empty(u.boxes[i])) continue;
        const auto &q = qt.ids[i];
        if (ix.search([&](std::size_t j, std::uint32_t id) { return meet[j][q[j] * vt.arcs[j].size() + id] != 0; },
                      [&](std::size_t r) { return !detail::box_empty(v.boxes[r]); }))
          return true;
      }
      return false;
    }
  }
  for (auto &a : u.boxes)
    for (auto &b : v.boxes)
      if (detail::boxes_meet(a, b)) return true;
  return false;
}

// pairwise box intersections; disjoint inputs give a disjoint result
inline BoxUnion intersection(const BoxUnion &u, const BoxUnion &v)
{
  if (u.d != v.d) throw std::invalid_argument("dimension mismatch");
  BoxUnion r{u.d, u.closed && v.closed, {}, u.disjoint && v.disjoint};
  for (auto &a : u.boxes)
    for (auto &b : v.boxes) {
      if (!detail::boxes_meet(a, b)) continue;
      // each coordinate may split into two arcs
      std::vector<Box> acc{Box{}};
      for (std::size_t j = 0; j < u.d; ++j) {
        auto parts = detail::arc_intersect(a.iv[j], b.iv[j]);
        std::vector<Box> next;
        for (auto &pre : acc)
          for (auto &iv : parts) {
            Box nb = pre;
            nb.iv.push_back(iv);
            next.push_back(std::move(nb));
          }
        acc.swap(next);
      }
      r.boxes.insert(r.boxes.end(), acc.begin(), acc.end());
    }
  return r;
}

namespace detail {

// distance between closed arcs on the circle
inline Rational closed_arc_distance(const TorusInterval &a, const TorusInterval &b)
{
  if (a.full() || b.full()) return 0;
  Rational g1 = frac(b.start - a.start - a.length);
  Rational g2 = frac(a.start - b.start - b.length);
  if (frac(b.start - a.start) <= a.length || frac(a.start - b.start) <= b.length) return 0;
  return std::min(g1, g2);
}

} // namespace detail

inline Rational box_separation(const Box &a, const Box &b)
{
  Rational m = 0;
  for (std::size_t j = 0; j < a.d(); ++j) {
    Rational g = detail::closed_arc_distance(a.iv[j], b.iv[j]);
    if (g > m) m = g;
  }
  return m;
}

// sup-metric distance between closures
inline Rational separation(const BoxUnion &u, const BoxUnion &v)
{
  if (u.d != v.d) throw std::invalid_argument("dimension mismatch");
  if (u.boxes.empty() || v.boxes.empty()) throw std::invalid_argument("separation of an empty union");
  if (v.boxes.size() > detail::index_threshold) {
    detail::ArcTable qt(u.boxes, u.d), vt(v.boxes, v.d);
    if (qt.pairs_with(vt) <= detail::index_table_cap) {
      // rank the finitely many coordinate distances, then search on ranks
      std::vector<std::vector<Rational>> dist(u.d);
      std::vector<Rational> values;
      for (std::size_t j = 0; j < u.d; ++j) {
        std::size_t nv = vt.arcs[j].size();
        dist[j].resize(qt.arcs[j].size() * nv);
        for (std::size_t a = 0; a < qt.arcs[j].size(); ++a)
          for (std::size_t b = 0; b < nv; ++b) {
            dist[j][a * nv + b] = detail::closed_arc_distance(qt.arcs[j][a], vt.arcs[j][b]);
            values.push_back(dist[j][a * nv + b]);
          }
      }
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      std::vector<std::vector<std::uint32_t>> rank(u.d);
      for (std::size_t j = 0; j < u.d; ++j) {
        rank[j].resize(dist[j].size());
        for (std::size_t i = 0; i < dist[j].size(); ++i)
          rank[j][i] = static_cast<std::uint32_t>(std::lower_bound(values.begin(), values.end(), dist[j][i]) - values.begin());
      }
      detail::BoxIndex ix(vt);
      std::uint32_t best = static_cast<std::uint32_t>(values.size());
      std::vector<const std::uint32_t *> cost(u.d);
      for (std::size_t i = 0; i < u.boxes.size() && best > 0; ++i) {
        for (std::size_t j = 0; j < u.d; ++j) cost[j] = rank[j].data() + qt.ids[i][j] * vt.arcs[j].size();
        best = ix.min_max(cost, best);
      }
      return values[best];
    }
  }
  bool first = true;
  Rational best = 0;
  for (auto &a : u.boxes)
    for (auto &b : v.boxes) {
      Rational s = box_separation(a, b);
      if (first || s < best) {
        best = s;
        first = false;
        if (best == 0) return best;
      }
    }
  return best;
}

inline bool point_in_box(const Box &b, const RatPoint &x, bool closed_box = false)
{
  for (std::size_t j = 0; j < b.d(); ++j) {
    const auto &i = b.iv[j];
    if (i.full()) continue;
    Rational off = frac(x[j] - i.start);
    if (closed_box ? !(off <= i.length || off == 0) : !(off < i.length)) return false;
  }
  return true;
}

inline bool contains_point(const BoxUnion &u, const RatPoint &x)
{
  for (auto &b : u.boxes)
    if (point_in_box(b, x, u.closed)) return true;
  return false;
}

} // namespace bohrrec
