#pragma once

#include "bohr_analysis.hpp"
#include "nonrecurrence.hpp"
#include "rational.hpp"
#include "tower_builder.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bohrrec {

// n in ambient iff n = residue mod modulus; modulus 1 is all of Z
struct Ambient {
  long modulus = 1;
  long residue = 0;
  std::function<bool(long)> custom;  // not serialized
  std::string label;

  bool contains(long n) const
  {
    if (custom) return custom(n);
    return mod_floor(n - residue, modulus) == 0;
  }

  std::string name() const
  {
    if (!label.empty()) return label;
    if (modulus == 1) return "Z";
    return std::to_string(mod_floor(residue, modulus)) + "+" + std::to_string(modulus) + "Z";
  }
};

inline Ambient parse_ambient(const std::string &s)
{
  Ambient a;
  if (s.empty() || s == "Z" || s == "all") return a;
  // forms: qZ, r+qZ
  auto z = s.find('Z');
  if (z == std::string::npos || z + 1 != s.size()) throw std::invalid_argument("ambient must look like r+qZ");
  std::string body = s.substr(0, z);
  auto plus = body.find('+');
  try {
    if (plus == std::string::npos) {
      a.modulus = body.empty() ? 1 : std::stol(body);
    } else {
      a.residue = std::stol(body.substr(0, plus));
      std::string q = body.substr(plus + 1);
      a.modulus = q.empty() ? 1 : std::stol(q);
    }
  } catch (const std::exception &) {
    throw std::invalid_argument("ambient must look like r+qZ");
  }
  if (a.modulus < 1) throw std::invalid_argument("ambient modulus must be positive");
  a.residue = mod_floor(a.residue, a.modulus);
  return a;
}

struct PipelineConfig {
  Rational delta = make_rational(3, 10);
  Rational delta_prime = make_rational(7, 20);
  std::size_t K = 2;
  std::vector<long> M_schedule;  // translate range per stage, default k
  Rational tol = make_rational(1, 1000000);
  std::uint64_t seed = 7;
  long n_max = 2000;
  Ambient ambient;
  long odd_search = 1000000;
  long init_length = 20;
  std::size_t max_k = 2;
  std::size_t tower_d_max = 10'000'000;
  MarginOptions margin;
  unsigned threads = 1;  // final margins only

  long M_for(std::size_t k) const
  {
    return k <= M_schedule.size() ? M_schedule[k - 1] : static_cast<long>(k);
  }
};

struct Decomposition {
  long c = 0;
  long s = 0;
  long n = 0;
};

struct StageRecord {
  std::size_t k = 1;
  IntSet S;
  Witness witness;
  // absent at k = 1
  std::optional<TowerCertificate> tower;
  unsigned p = 0;
  IntSet A_pos;
  Rational rho_pool;
  long n_max = 0;
  std::vector<Decomposition> added;
  std::vector<std::pair<long, MarginResult>> margins;
  Rational radius;
  std::size_t rounds = 0;
};

struct PipelineError : std::runtime_error {
  std::optional<RatPoint> uncovered;
  std::optional<long> m;
  PipelineError(const std::string &w, std::optional<RatPoint> a = std::nullopt, std::optional<long> mm = std::nullopt)
      : std::runtime_error(w), uncovered(std::move(a)), m(mm)
  {
  }
};

namespace detail {

inline void check_config(const PipelineConfig &c)
{
  if (!(c.delta < c.delta_prime && c.delta_prime < make_rational(1, 2)))
    throw std::invalid_argument("need delta < delta_prime < 1/2");
  if (!(c.tol > 0)) throw std::invalid_argument("tol must be positive");
  if (c.n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
}

// worst translate margins at radius 1/k, all at tol
inline std::vector<std::pair<long, MarginResult>> final_margins(const IntSet &T, std::size_t k, long M,
                                                               const Rational &tol, const MarginOptions &opt,
                                                               unsigned threads = 1)
{
  auto ms = translate_order(M);
  std::vector<std::pair<long, MarginResult>> out(ms.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&] {
    for (std::size_t i; (i = next++) < ms.size();) {
      try {
        out[i] = {ms[i], recurrence_margin(shift_set(T, ms[i]), k, tol, opt)};
      } catch (...) {
        std::lock_guard<std::mutex> g(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(ms.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto &t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return out;
}

// the pool element minimizing max_j ||(c - m) alpha_j||, ties to smaller |c|
inline std::optional<long> best_candidate(const std::vector<long> &pool, const IntSet &T, const RatPoint &alpha, long m)
{
  std::optional<long> best;
  Rational bv;
  for (long c : pool) {
    if (std::binary_search(T.begin(), T.end(), c)) continue;
    Rational v = 0;
    for (auto &a : alpha) v = std::max(v, torus_norm(a * (c - m)));
    auto mag = [](long x) { return x < 0 ? -x : x; };
    if (!best || v < bv || (v == bv && (mag(c) < mag(*best) || (mag(c) == mag(*best) && c < *best)))) {
      best = c;
      bv = v;
    }
  }
  return best;
}

inline bool all_below(const std::vector<std::pair<long, MarginResult>> &ms, const Rational &r)
{
  for (auto &[m, res] : ms)
    if (!(res.upper < r)) return false;
  return true;
}

// least L (multiple of N) at which the unrolled pattern beats delta
inline std::optional<Witness> unroll_to_density(const CyclicWitness &cw, const IntSet &S, const Rational &delta)
{
  if (!(cw.density() > delta)) return std::nullopt;
  auto ok = [&](long L) { return unroll_cyclic(cw, S, L).density() > delta; };
  long hi = cw.N;
  while (!ok(hi)) {
    if (hi > (1L << 40)) return std::nullopt;
    hi *= 2;
  }
  long lo = hi / 2;  // multiples of N between lo and hi
  long a = lo / cw.N, b = hi / cw.N;
  while (b - a > 1) {
    long mid = a + (b - a) / 2;
    if (ok(mid * cw.N))
      b = mid;
    else
      a = mid;
  }
  return unroll_cyclic(cw, S, b * cw.N);
}

} // namespace detail

inline StageRecord init_stage(const PipelineConfig &cfg)
{
  detail::check_config(cfg);
  std::optional<long> s1;
  for (long j = 1; j <= cfg.odd_search; j += 2) {
    if (cfg.ambient.contains(j)) {
      s1 = j;
      break;
    }
    if (cfg.ambient.contains(-j)) {
      s1 = -j;
      break;
    }
  }
  if (!s1) throw PipelineError("no odd member of the ambient set within the search range");
  StageRecord r;
  r.k = 1;
  r.S = {*s1};
  long L = std::max(cfg.init_length, 2 * (*s1 < 0 ? -*s1 : *s1));
  // odd integers avoid 2Z translates; alternating pattern unrolled
  CyclicWitness alt{2, r.S, {0}};
  r.witness = unroll_cyclic(alt, r.S, L);
  while (!(r.witness.density() > cfg.delta_prime)) {
    L *= 2;
    r.witness = unroll_cyclic(alt, r.S, L);
  }
  r.witness.optimal = false;
  r.radius = 1;
  r.margins = detail::final_margins(r.S, 1, cfg.M_for(1), cfg.tol, cfg.margin, cfg.threads);
  if (!detail::all_below(r.margins, r.radius)) throw PipelineError("stage 1 margins do not close");
  return r;
}

inline StageRecord extend_stage(const StageRecord &prev, const PipelineConfig &cfg)
{
  detail::check_config(cfg);
  const std::size_t k = prev.k + 1;
  if (k > cfg.max_k) throw std::invalid_argument("stage index above max_k; raise it explicitly");
  const IntSet &Sp = prev.S;
  const long span = max_abs(Sp);
  StageRecord r;
  r.k = k;
  r.radius = make_rational(1, static_cast<long>(k));
  r.n_max = cfg.n_max;

  // (1) least odd prime with an S-avoiding set A, A+S inside [p], beating delta'
  unsigned p = 3;
  Witness base;
  for (;; p = static_cast<unsigned>(next_prime(p + 1))) {
    if (p > 4096) throw PipelineError("no prime up to 4096 carries a dense enough avoiding set");
    if (static_cast<long>(p) <= span) continue;
    base = max_avoiding_set(Sp, static_cast<long>(p));
    if (base.density() > cfg.delta_prime) break;
  }
  r.p = p;
  r.A_pos = base.A;

  // (2) eps at half the density slack: |A|(1-eps)/p > delta'
  Rational dens = base.density();
  Rational eps = (Rational(1) - cfg.delta_prime / dens) / 2;
  TowerOptions to;
  to.d_max = cfg.tower_d_max;
  to.seed = cfg.seed;
  TowerSpec t = build_tower(p, k, eps, TowerMode::reduced, to);
  TowerCertificate cert = verify_tower(t, to);
  if (!cert.valid) throw PipelineError("tower certificate failed: " + cert.failures().front());
  r.tower = cert;

  // (3) pool S + BH, robust on a ball small enough for every pool element
  Rational rho = t.eta / (2 * (cfg.n_max + 2 * span));
  if (t.rho < rho) rho = t.rho;
  r.rho_pool = rho;
  BHSpec bh = tower_bh(t, rho);
  std::vector<long> pool;
  std::map<long, Decomposition> dec;
  for (long s : Sp)
    for (long n = -cfg.n_max; n <= cfg.n_max; ++n) {
      long c = s + n;
      if (dec.count(c)) continue;
      if (c == 0 || !cfg.ambient.contains(c)) continue;
      if (bh_contains(bh, n) != Tri::yes) continue;
      dec[c] = Decomposition{c, s, n};
      pool.push_back(c);
    }
  std::sort(pool.begin(), pool.end());

  // (4) cut against the worst rotation until every translate closes
  IntSet T = Sp;
  const long M = cfg.M_for(k);
  for (;;) {
    ++r.rounds;
    bool closed = true;
    for (long m : translate_order(M)) {
      auto Tm = shift_set(T, m);
      std::optional<RatPoint> alpha;
      try {
        auto d = is_recurrent(Tm, k, r.radius, cfg.margin);
        if (!d.recurrent) alpha = d.margin.witness;
      } catch (const UndecidedError &e) {
        alpha = e.margin.witness;
      }
      if (!alpha) continue;
      closed = false;
      auto c = detail::best_candidate(pool, T, *alpha, m);
      if (!c) throw PipelineError("pool exhausted before the margins closed", alpha, m);
      T.insert(std::upper_bound(T.begin(), T.end(), *c), *c);
      break;
    }
    if (closed) break;
  }
  r.margins = detail::final_margins(T, k, M, cfg.tol, cfg.margin, cfg.threads);
  if (!detail::all_below(r.margins, r.radius)) {
    for (auto &[m, res] : r.margins)
      if (!(res.upper < r.radius)) throw PipelineError("final margin does not close at tol", res.witness, m);
  }
  r.S = T;
  for (long c : T)
    if (!std::binary_search(Sp.begin(), Sp.end(), c)) r.added.push_back(dec.at(c));

  // (5) interval witness: the cyclic pattern A mod p avoids S_k, since
  // every element is s + n with n in BH, n = 0 mod p here
  CyclicWitness cw{static_cast<long>(p), T, r.A_pos};
  if (!verify_cyclic(cw)) throw PipelineError("stage set does not avoid the tower pattern modulo p");
  auto w = detail::unroll_to_density(cw, T, cfg.delta_prime);
  if (!w) throw PipelineError("no unrolled witness beats delta'");
  r.witness = *w;
  return r;
}

inline std::vector<StageRecord> run_pipeline(const PipelineConfig &cfg)
{
  std::vector<StageRecord> st;
  st.push_back(init_stage(cfg));
  while (st.size() < cfg.K) st.push_back(extend_stage(st.back(), cfg));
  return st;
}

// ---- finite diagonal selection ----

struct DiagonalPart {
  std::size_t n = 0;
  IntSet R;
  std::vector<std::pair<long, MarginResult>> margins;  // |m| < n at radius 1/n
};

struct DiagonalResult {
  IntSet united;
  std::vector<DiagonalPart> parts;
};

namespace detail {

inline Rational worst_upper(const IntSet &R, std::size_t n, const Rational &tol, const MarginOptions &opt)
{
  Rational w = 0;
  for (long m : translate_order(static_cast<long>(n) - 1)) {
    auto res = recurrence_margin(shift_set(R, m), n, tol, opt);
    if (res.upper > w) w = res.upper;
  }
  return w;
}

} // namespace detail

inline DiagonalResult select_diagonal(const std::vector<StageRecord> &stages, const Rational &tol,
                                      const MarginOptions &budget = {})
{
  DiagonalResult out;
  std::set<long> uni;
  for (const auto &st : stages) {
    const std::size_t n = st.k;
    const Rational radius = make_rational(1, static_cast<long>(n));
    const Rational coarse = std::max(tol, make_rational(1, 4096));
    IntSet R;
    // greedy by worst translate margin, then drop what is not needed
    while (true) {
      if (!R.empty() && detail::worst_upper(R, n, coarse, budget) < radius) break;
      std::optional<long> pick;
      Rational pv;
      for (long c : st.S) {
        if (std::binary_search(R.begin(), R.end(), c)) continue;
        IntSet tryR = R;
        tryR.insert(std::upper_bound(tryR.begin(), tryR.end(), c), c);
        Rational v = detail::worst_upper(tryR, n, coarse, budget);
        if (!pick || v < pv) {
          pick = c;
          pv = v;
        }
      }
      if (!pick) throw PipelineError("stage " + std::to_string(n) + " cannot close its margins");
      R.insert(std::upper_bound(R.begin(), R.end(), *pick), *pick);
    }
    for (std::size_t i = 0; i < R.size();) {
      IntSet less = R;
      less.erase(less.begin() + static_cast<long>(i));
      if (!less.empty() && detail::worst_upper(less, n, coarse, budget) < radius)
        R = less;
      else
        ++i;
    }
    DiagonalPart part;
    part.n = n;
    part.R = R;
    for (long m : translate_order(static_cast<long>(n) - 1))
      part.margins.emplace_back(m, recurrence_margin(shift_set(R, m), n, tol, budget));
    if (!detail::all_below(part.margins, radius))
      throw PipelineError("stage " + std::to_string(n) + " selection fails at tol");
    uni.insert(R.begin(), R.end());
    out.parts.push_back(std::move(part));
  }
  out.united.assign(uni.begin(), uni.end());
  return out;
}

} // namespace bohrrec
