#pragma once

#include "bohr_analysis.hpp"
#include "hamming_cells.hpp"
#include "nonrecurrence.hpp"
#include "pipeline.hpp"
#include "rational.hpp"
#include "torus_boxes.hpp"
#include "tower_builder.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bohrrec {

using json = nlohmann::json;

constexpr int format_version = 1;
inline const char *tool_version = "bohrrec 0.1.0";

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- scalars ----

inline json to_json(const Rational &q) { return json{{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}}; }

inline Integer integer_of(const json &j)
{
  if (!j.is_string()) throw FormatError("integer must be a decimal string");
  Integer z;
  if (z.set_str(j.get<std::string>(), 10) != 0) throw FormatError("bad integer string");
  return z;
}

inline Rational rational_of(const json &j)
{
  if (!j.is_object() || !j.contains("num") || !j.contains("den")) throw FormatError("rational needs num and den");
  Integer n = integer_of(j.at("num")), d = integer_of(j.at("den"));
  if (d <= 0) throw FormatError("rational denominator must be positive");
  Rational q(n, d);
  q.canonicalize();
  if (q.get_num() != n || q.get_den() != d) throw FormatError("rational not in lowest terms");
  return q;
}

inline std::string decimal(const Rational &q, int digits = 12)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, q.get_d());
  return buf;
}

inline json points_json(const RatPoint &x)
{
  json a = json::array();
  for (auto &v : x) a.push_back(to_json(v));
  return a;
}

inline RatPoint points_of(const json &j)
{
  RatPoint r;
  for (auto &v : j) r.push_back(rational_of(v));
  return r;
}

template <class T>
T get_field(const json &j, const char *key)
{
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &) {
    throw FormatError(std::string("bad field ") + key);
  }
}

inline const json &at(const json &j, const char *key)
{
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field ") + key);
  return j.at(key);
}

// ---- nonrecurrence ----

inline json to_json(const Witness &w)
{
  return json{{"N", w.N}, {"S", w.S}, {"A", w.A}, {"density", to_json(w.density())}, {"optimal", w.optimal}};
}

inline Witness witness_of(const json &j)
{
  Witness w;
  w.N = get_field<long>(j, "N");
  w.S = get_field<IntSet>(j, "S");
  w.A = get_field<IntSet>(j, "A");
  w.optimal = get_field<bool>(j, "optimal");
  return w;
}

inline json to_json(const CyclicWitness &w)
{
  return json{{"N", w.N}, {"S", w.S}, {"A", w.A}, {"density", to_json(w.density())}};
}

inline CyclicWitness cyclic_of(const json &j)
{
  CyclicWitness w;
  w.N = get_field<long>(j, "N");
  w.S = get_field<IntSet>(j, "S");
  w.A = get_field<IntSet>(j, "A");
  return w;
}

inline json to_json(const UnionCertificate &u)
{
  json parts = json::array();
  for (auto &p : u.parts) parts.push_back(to_json(p));
  return json{{"parts", parts}, {"combined", to_json(u.combined)}};
}

inline UnionCertificate union_of(const json &j)
{
  UnionCertificate u;
  for (auto &p : at(j, "parts")) u.parts.push_back(cyclic_of(p));
  u.combined = cyclic_of(at(j, "combined"));
  return u;
}

// ---- hamming cells ----

inline json to_json(const CellFamily &f)
{
  return json{{"kind", f.kind == FamilyKind::E0 ? "E0" : "E"},
              {"p", f.p},
              {"k", f.k},
              {"d", f.d},
              {"transversal", f.transversal.reps}};
}

inline CellFamily family_of(const json &j)
{
  CellFamily f;
  auto kind = get_field<std::string>(j, "kind");
  if (kind != "E0" && kind != "E") throw FormatError("family kind must be E0 or E");
  f.kind = kind == "E0" ? FamilyKind::E0 : FamilyKind::E;
  f.p = get_field<unsigned>(j, "p");
  f.k = get_field<std::size_t>(j, "k");
  f.d = get_field<std::size_t>(j, "d");
  f.transversal.p = f.p;
  f.transversal.reps = get_field<std::vector<Subset>>(j, "transversal");
  f.transversal.canonical = is_prime(f.p) && f.p <= max_transversal_prime && f.transversal.reps == orbit_transversal(f.p).reps;
  return f;
}

inline json to_json(const TileResult &t)
{
  return json{{"p", t.p},
              {"k", t.k},
              {"epsilon", to_json(t.epsilon)},
              {"d", t.d},
              {"A", to_json(t.A)},
              {"A1", to_json(t.A1)},
              {"count_A", t.count_A ? json(t.count_A->get_str()) : json(nullptr)},
              {"fraction_lower", to_json(t.fraction_lower)},
              {"minimal", t.minimal}};
}

// ---- boxes ----

inline json to_json(const BoxUnion &u)
{
  json boxes = json::array();
  for (auto &b : u.boxes) {
    json arcs = json::array();
    for (auto &i : b.iv) arcs.push_back(json::array({to_json(i.start), to_json(i.length)}));
    boxes.push_back(arcs);
  }
  return json{{"d", u.d}, {"closed", u.closed}, {"disjoint", u.disjoint}, {"boxes", boxes}};
}

inline BoxUnion boxes_of(const json &j)
{
  BoxUnion u;
  u.d = get_field<std::size_t>(j, "d");
  u.closed = get_field<bool>(j, "closed");
  u.disjoint = get_field<bool>(j, "disjoint");
  for (auto &b : at(j, "boxes")) {
    Box box;
    for (auto &a : b) {
      if (!a.is_array() || a.size() != 2) throw FormatError("arc must be [start, length]");
      Rational st = rational_of(a[0]), len = rational_of(a[1]);
      if (len < 0 || len > 1 || st < 0 || st >= 1) throw FormatError("arc out of range");
      box.iv.push_back(TorusInterval{st, len});
    }
    if (box.iv.size() != u.d) throw FormatError("box dimension mismatch");
    u.boxes.push_back(std::move(box));
  }
  return u;
}

// ---- towers ----

inline json to_json(const TowerSpec &t)
{
  json alpha = json::array();
  for (auto &c : t.alpha_star) alpha.push_back(json{{"value", to_json(c.value)}, {"count", c.count}});
  json j{{"p", t.p},
         {"k", t.k},
         {"epsilon", to_json(t.epsilon)},
         {"d", t.d},
         {"eta", to_json(t.eta)},
         {"mode", to_string(t.mode)},
         {"A", to_json(t.A)},
         {"A1", to_json(t.A1)},
         {"count_A", t.count_A ? json(t.count_A->get_str()) : json(nullptr)},
         {"fraction_lower", to_json(t.fraction_lower)},
         {"tile_minimal", t.tile_minimal},
         {"alpha_star", alpha},
         {"rho", to_json(t.rho)},
         {"separation_bound", to_json(t.separation_bound)},
         {"mu_E", to_json(t.mu_E)},
         {"seed", t.seed},
         {"trials", t.trials}};
  j["E"] = t.E ? to_json(*t.E) : json(nullptr);
  j["E1"] = t.E1 ? to_json(*t.E1) : json(nullptr);
  return j;
}

inline TowerSpec tower_of(const json &j)
{
  TowerSpec t;
  t.p = get_field<unsigned>(j, "p");
  t.k = get_field<std::size_t>(j, "k");
  t.epsilon = rational_of(at(j, "epsilon"));
  t.d = get_field<std::size_t>(j, "d");
  t.eta = rational_of(at(j, "eta"));
  auto mode = get_field<std::string>(j, "mode");
  if (mode != "exact" && mode != "reduced") throw FormatError("mode must be exact or reduced");
  t.mode = mode == "exact" ? TowerMode::exact : TowerMode::reduced;
  t.A = family_of(at(j, "A"));
  t.A1 = family_of(at(j, "A1"));
  if (!at(j, "count_A").is_null()) t.count_A = integer_of(at(j, "count_A"));
  t.fraction_lower = rational_of(at(j, "fraction_lower"));
  t.tile_minimal = get_field<bool>(j, "tile_minimal");
  for (auto &c : at(j, "alpha_star")) t.alpha_star.push_back(WeightedCoord{rational_of(at(c, "value")), get_field<std::uint64_t>(c, "count")});
  t.rho = rational_of(at(j, "rho"));
  t.separation_bound = rational_of(at(j, "separation_bound"));
  t.mu_E = rational_of(at(j, "mu_E"));
  t.seed = get_field<std::uint64_t>(j, "seed");
  t.trials = get_field<std::uint64_t>(j, "trials");
  if (!at(j, "E").is_null()) t.E = boxes_of(at(j, "E"));
  if (!at(j, "E1").is_null()) t.E1 = boxes_of(at(j, "E1"));
  return t;
}

inline json to_json(const TowerOptions &o)
{
  return json{{"box_cap", o.box_cap},
              {"base_samples", o.base_samples},
              {"inner_samples", o.inner_samples},
              {"exhaustive_cap", o.exhaustive_cap}};
}

inline TowerOptions tower_options_of(const json &j)
{
  TowerOptions o;
  o.box_cap = get_field<std::size_t>(j, "box_cap");
  o.base_samples = get_field<std::uint64_t>(j, "base_samples");
  o.inner_samples = get_field<std::uint64_t>(j, "inner_samples");
  o.exhaustive_cap = get_field<std::uint64_t>(j, "exhaustive_cap");
  return o;
}

inline json to_json(const TowerCertificate &c, const TowerOptions &o = {})
{
  json checks = json::object();
  for (auto &[name, f] : c.checks) checks[name] = json{{"kind", to_string(f.kind)}, {"trials", f.trials}, {"note", f.note}};
  return json{{"spec", to_json(c.spec)},
              {"checks", checks},
              {"mu_E", to_json(c.mu_E)},
              {"separation_min", to_json(c.separation_min)},
              {"valid", c.valid},
              {"options", to_json(o)}};
}

// ---- margins ----

inline json margin_json(const std::vector<long> &S, std::size_t d, const Rational &tol, const MarginResult &m,
                        const MarginOptions &o)
{
  return json{{"S", S},
              {"d", d},
              {"tol", to_json(tol)},
              {"lower", to_json(m.lower)},
              {"upper", to_json(m.upper)},
              {"witness", points_json(m.witness)},
              {"nodes", m.nodes},
              {"converged", m.converged},
              {"node_budget", o.node_budget},
              {"display", json{{"lower", decimal(m.lower)}, {"upper", decimal(m.upper)}}}};
}

inline json to_json(const MarginResult &m)
{
  return json{{"lower", to_json(m.lower)},
              {"upper", to_json(m.upper)},
              {"witness", points_json(m.witness)},
              {"nodes", m.nodes},
              {"converged", m.converged}};
}

inline MarginResult margin_of(const json &j)
{
  MarginResult m;
  m.lower = rational_of(at(j, "lower"));
  m.upper = rational_of(at(j, "upper"));
  m.witness = points_of(at(j, "witness"));
  m.nodes = get_field<std::uint64_t>(j, "nodes");
  m.converged = get_field<bool>(j, "converged");
  return m;
}

// ---- pipeline ----

inline json to_json(const PipelineConfig &c)
{
  if (c.ambient.custom) throw FormatError("custom ambient oracles cannot be serialized");
  return json{{"delta", to_json(c.delta)},
              {"delta_prime", to_json(c.delta_prime)},
              {"K", c.K},
              {"M_schedule", c.M_schedule},
              {"tol", to_json(c.tol)},
              {"seed", c.seed},
              {"n_max", c.n_max},
              {"ambient", json{{"modulus", c.ambient.modulus}, {"residue", c.ambient.residue}}},
              {"odd_search", c.odd_search},
              {"init_length", c.init_length},
              {"max_k", c.max_k},
              {"tower_d_max", c.tower_d_max},
              {"node_budget", c.margin.node_budget}};
}

inline PipelineConfig config_of(const json &j)
{
  PipelineConfig c;
  c.delta = rational_of(at(j, "delta"));
  c.delta_prime = rational_of(at(j, "delta_prime"));
  c.K = get_field<std::size_t>(j, "K");
  c.M_schedule = get_field<std::vector<long>>(j, "M_schedule");
  c.tol = rational_of(at(j, "tol"));
  c.seed = get_field<std::uint64_t>(j, "seed");
  c.n_max = get_field<long>(j, "n_max");
  c.ambient.modulus = get_field<long>(at(j, "ambient"), "modulus");
  c.ambient.residue = get_field<long>(at(j, "ambient"), "residue");
  if (c.ambient.modulus < 1) throw FormatError("ambient modulus must be positive");
  c.odd_search = get_field<long>(j, "odd_search");
  c.init_length = get_field<long>(j, "init_length");
  c.max_k = get_field<std::size_t>(j, "max_k");
  c.tower_d_max = get_field<std::size_t>(j, "tower_d_max");
  c.margin.node_budget = get_field<std::uint64_t>(j, "node_budget");
  return c;
}

inline json to_json(const StageRecord &r, const PipelineConfig &cfg)
{
  json margins = json::array();
  for (auto &[m, res] : r.margins) {
    json e = to_json(res);
    e["m"] = m;
    margins.push_back(e);
  }
  json added = json::array();
  for (auto &a : r.added) added.push_back(json{{"c", a.c}, {"s", a.s}, {"n", a.n}});
  TowerOptions to;
  to.seed = cfg.seed;
  to.d_max = cfg.tower_d_max;
  return json{{"k", r.k},
              {"S", r.S},
              {"witness", to_json(r.witness)},
              {"tower", r.tower ? to_json(*r.tower, to) : json(nullptr)},
              {"p", r.p},
              {"A_pos", r.A_pos},
              {"rho_pool", to_json(r.rho_pool)},
              {"n_max", r.n_max},
              {"added", added},
              {"margins", margins},
              {"radius", to_json(r.radius)},
              {"rounds", r.rounds}};
}

struct StagePayload {
  StageRecord rec;
  std::optional<TowerOptions> tower_options;
};

inline StagePayload stage_of(const json &j)
{
  StagePayload sp;
  StageRecord &r = sp.rec;
  r.k = get_field<std::size_t>(j, "k");
  r.S = get_field<IntSet>(j, "S");
  r.witness = witness_of(at(j, "witness"));
  if (!at(j, "tower").is_null()) {
    const json &t = at(j, "tower");
    TowerCertificate c;
    c.spec = tower_of(at(t, "spec"));
    c.valid = get_field<bool>(t, "valid");
    c.mu_E = rational_of(at(t, "mu_E"));
    c.separation_min = rational_of(at(t, "separation_min"));
    r.tower = c;
    sp.tower_options = tower_options_of(at(t, "options"));
  }
  r.p = get_field<unsigned>(j, "p");
  r.A_pos = get_field<IntSet>(j, "A_pos");
  r.rho_pool = rational_of(at(j, "rho_pool"));
  r.n_max = get_field<long>(j, "n_max");
  for (auto &a : at(j, "added")) r.added.push_back(Decomposition{get_field<long>(a, "c"), get_field<long>(a, "s"), get_field<long>(a, "n")});
  for (auto &m : at(j, "margins")) r.margins.emplace_back(get_field<long>(m, "m"), margin_of(m));
  r.radius = rational_of(at(j, "radius"));
  r.rounds = get_field<std::size_t>(j, "rounds");
  return sp;
}

inline json to_json(const DiagonalResult &d)
{
  json parts = json::array();
  for (auto &p : d.parts) {
    json ms = json::array();
    for (auto &[m, res] : p.margins) {
      json e = to_json(res);
      e["m"] = m;
      ms.push_back(e);
    }
    parts.push_back(json{{"n", p.n}, {"R", p.R}, {"margins", ms}});
  }
  return json{{"united", d.united}, {"parts", parts}};
}

inline json stage_payload(const PipelineConfig &cfg, const StageRecord &r, const StageRecord *prev)
{
  return json{{"config", to_json(cfg)}, {"stage", to_json(r, cfg)}, {"previous", prev ? json(prev->S) : json(nullptr)}};
}

inline json pipeline_json(const PipelineConfig &cfg, const std::vector<StageRecord> &stages,
                          const std::optional<DiagonalResult> &diag = std::nullopt)
{
  json st = json::array();
  for (auto &s : stages) st.push_back(to_json(s, cfg));
  json j{{"config", to_json(cfg)}, {"stages", st}};
  j["diagonal"] = diag ? to_json(*diag) : json(nullptr);
  return j;
}

// plain-text table of a run; exact values as fractions, margins as decimals
inline std::string render_report(const std::vector<StageRecord> &stages)
{
  if (stages.empty()) return "";
  std::ostringstream o;
  o << "k  |S_k|  density  worst_margin  radius  p  d  eta  rho  modes\n";
  for (auto &r : stages) {
    Rational worst = 0;
    for (auto &[m, res] : r.margins) worst = std::max(worst, res.upper);
    o << r.k << "  " << r.S.size() << "  " << r.witness.density().get_str() << "  " << decimal(worst, 8) << "  "
      << r.radius.get_str() << "  ";
    if (r.tower) {
      const TowerSpec &t = r.tower->spec;
      std::set<std::string> modes;
      for (auto &[name, f] : r.tower->checks) modes.insert(to_string(f.kind));
      std::string ms;
      for (auto &m : modes) ms += (ms.empty() ? "" : ",") + m;
      o << t.p << "  " << t.d << "  " << t.eta.get_str() << "  " << r.rho_pool.get_str() << "  " << to_string(t.mode) << ":"
        << (ms.empty() ? "-" : ms);
    } else {
      o << "-  -  -  -  -";
    }
    o << "\n";
  }
  return o.str();
}

// ---- envelope ----

inline std::string payload_digest(const json &payload)
{
  // FNV-1a 64 over the compact dump (keys sorted by the json object type)
  std::string s = payload.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline const std::vector<std::string> &envelope_kinds()
{
  static const std::vector<std::string> k{"witness", "cyclic", "union", "tower", "margin", "stage", "pipeline"};
  return k;
}

inline json make_envelope(const std::string &kind, json payload, std::uint64_t seed = 0)
{
  if (std::find(envelope_kinds().begin(), envelope_kinds().end(), kind) == envelope_kinds().end())
    throw std::invalid_argument("unknown certificate kind " + kind);
  std::string dg = payload_digest(payload);
  return json{{"kind", kind},
              {"version", format_version},
              {"toolversion", tool_version},
              {"seed", seed},
              {"digest", dg},
              {"payload", std::move(payload)}};
}

// ---- verification ----

struct VerifyReport {
  std::string kind;
  std::vector<std::string> passed;
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  bool ok() const { return failures.empty(); }

  void check(const std::string &name, bool ok)
  {
    if (ok)
      passed.push_back(name);
    else
      failures.push_back(name);
  }

  json to_json() const
  {
    return json{{"kind", kind}, {"ok", ok()}, {"passed", passed}, {"failures", failures}, {"notes", notes}};
  }
};

namespace detail {

inline bool same_margin(const MarginResult &a, const MarginResult &b)
{
  return a.lower == b.lower && a.upper == b.upper && a.witness == b.witness;
}

// value of min_s max_j ||s x_j|| at a recorded point
inline Rational margin_value(const std::vector<long> &S, const RatPoint &x)
{
  Rational best = 1;
  for (long s : S) {
    Rational m = 0;
    for (auto &xj : x) m = std::max(m, torus_norm(xj * s));
    best = std::min(best, m);
  }
  return best;
}

inline bool margin_replays(const std::vector<long> &S, std::size_t d, const Rational &tol, const MarginResult &rec,
                           const MarginOptions &opt)
{
  if (rec.witness.size() != d) return false;
  if (margin_value(S, rec.witness) != rec.lower) return false;
  auto again = recurrence_margin(S, d, tol, opt);
  return same_margin(again, rec);
}

inline bool subset_of(const IntSet &a, const IntSet &b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

inline bool sorted_unique(const IntSet &s) { return std::adjacent_find(s.begin(), s.end(), std::greater_equal<long>()) == s.end(); }

inline void verify_tower_payload(const json &p, VerifyReport &rep, std::optional<TowerCertificate> *out = nullptr,
                                 const std::string &prefix = "")
{
  TowerSpec spec = tower_of(at(p, "spec"));
  TowerOptions opt = tower_options_of(at(p, "options"));
  opt.seed = spec.seed;
  TowerCertificate again = verify_tower(spec, opt);
  for (auto &name : again.failures()) rep.failures.push_back(prefix + name);
  rep.check(prefix + "tower_valid", again.valid && get_field<bool>(p, "valid"));
  bool same = again.mu_E == rational_of(at(p, "mu_E")) && again.separation_min == rational_of(at(p, "separation_min"));
  const json &checks = at(p, "checks");
  same = same && checks.size() == again.checks.size();
  for (auto &[name, f] : again.checks) {
    if (!checks.contains(name)) {
      same = false;
      continue;
    }
    const json &c = checks.at(name);
    same = same && get_field<std::string>(c, "kind") == to_string(f.kind) && get_field<std::uint64_t>(c, "trials") == f.trials;
  }
  rep.check(prefix + "recorded_checks", same);
  if (out) *out = again;
}

inline void verify_stage(const StagePayload &sp, const StageRecord *prev, const PipelineConfig &cfg, const json &raw,
                         VerifyReport &rep)
{
  const StageRecord &r = sp.rec;
  const std::string pre = "stage" + std::to_string(r.k) + ".";
  rep.check(pre + "set_sorted", sorted_unique(r.S) && !r.S.empty());
  bool amb = true;
  for (long c : r.S) amb = amb && cfg.ambient.contains(c);
  rep.check(pre + "ambient", amb);
  // witness
  rep.check(pre + "witness_set", r.witness.S == r.S);
  rep.check(pre + "witness_valid", verify_witness(r.witness));
  rep.check(pre + "witness_density", r.witness.density() > cfg.delta_prime);
  // margins over |m| <= M_k at radius 1/k
  const std::size_t k = r.k;
  rep.check(pre + "radius", r.radius == make_rational(1, static_cast<long>(k)));
  auto ms = translate_order(cfg.M_for(k));
  bool mset = r.margins.size() == ms.size();
  for (std::size_t i = 0; mset && i < ms.size(); ++i) mset = r.margins[i].first == ms[i];
  rep.check(pre + "margin_translates", mset);
  bool below = true, replay = true;
  for (auto &[m, res] : r.margins) {
    below = below && res.upper < r.radius;
    replay = replay && margin_replays(shift_set(r.S, m), k, cfg.tol, res, cfg.margin);
  }
  rep.check(pre + "margins_below_radius", below);
  rep.check(pre + "margins_replay", replay);
  if (k == 1) {
    rep.check(pre + "initial_odd", r.S.size() == 1 && (r.S[0] % 2 != 0));
    return;
  }
  if (!prev) {
    rep.check(pre + "parent_present", false);
    return;
  }
  rep.check(pre + "chain", subset_of(prev->S, r.S));
  rep.check(pre + "prime", is_prime(r.p));
  Witness base{static_cast<long>(r.p), prev->S, r.A_pos, true};
  rep.check(pre + "tower_pattern", sorted_unique(r.A_pos) && verify_witness(base) && base.density() > cfg.delta_prime);
  if (!r.tower || !sp.tower_options) {
    rep.check(pre + "tower_present", false);
    return;
  }
  std::optional<TowerCertificate> cert;
  verify_tower_payload(at(raw, "tower"), rep, &cert, pre + "tower.");
  const TowerSpec &t = r.tower->spec;
  Rational eps = (Rational(1) - cfg.delta_prime / base.density()) / 2;
  rep.check(pre + "tower_parameters", t.p == r.p && t.k == k && t.epsilon == eps);
  rep.check(pre + "tower_density", cert && Rational(static_cast<long>(r.A_pos.size())) * cert->mu_E > cfg.delta_prime);
  long span = max_abs(prev->S);
  bool rho_ok = r.rho_pool > 0 && r.rho_pool <= t.rho && r.rho_pool * (r.n_max + 2 * span) < t.eta && r.n_max == cfg.n_max;
  rep.check(pre + "rho_pool", rho_ok);
  // every new element is s + n, n in BH, and the tower chain separates it
  std::set<long> expect;
  for (long c : r.S)
    if (!std::binary_search(prev->S.begin(), prev->S.end(), c)) expect.insert(c);
  std::set<long> got;
  bool dec_ok = rho_ok && cert && cert->valid;
  BHSpec bh = tower_bh(t, rho_ok ? r.rho_pool : t.rho);
  for (auto &a : r.added) {
    got.insert(a.c);
    bool one = std::binary_search(prev->S.begin(), prev->S.end(), a.s) && a.c == a.s + a.n && (a.n < 0 ? -a.n : a.n) <= r.n_max &&
               bh_contains(bh, a.n) == Tri::yes;
    if (one && dec_ok) {
      auto ex = rohlin_extend(*cert, r.A_pos, prev->S, a.c, r.n_max + span, false, r.rho_pool);
      one = ex.disjoint == Tri::yes;
    }
    dec_ok = dec_ok && one;
  }
  rep.check(pre + "decompositions", dec_ok && got == expect && got.size() == r.added.size());
}

inline void verify_payload(const std::string &kind, const json &p, VerifyReport &rep)
{
  if (kind == "witness") {
    Witness w = witness_of(p);
    rep.check("witness_valid", verify_witness(w));
    rep.check("density", rational_of(at(p, "density")) == w.density());
    if (w.optimal) {
      // optimality claims are re-derived
      bool opt = false;
      try {
        opt = max_avoiding_set(w.S, w.N).A.size() == w.A.size();
      } catch (const std::exception &) {
      }
      rep.check("optimal", opt);
    }
  } else if (kind == "cyclic") {
    CyclicWitness w = cyclic_of(p);
    rep.check("cyclic_valid", verify_cyclic(w));
    rep.check("density", rational_of(at(p, "density")) == w.density());
  } else if (kind == "union") {
    UnionCertificate u = union_of(p);
    bool parts = u.parts.size() == 2;
    for (auto &w : u.parts) parts = parts && verify_cyclic(w);
    rep.check("parts_valid", parts);
    if (!parts) return;
    rep.check("moduli_coprime", std::gcd(u.parts[0].N, u.parts[1].N) == 1);
    bool same = false;
    try {
      UnionCertificate again = union_certificate(u.parts[0], u.parts[1]);
      same = again.combined.N == u.combined.N && again.combined.A == u.combined.A && again.combined.S == u.combined.S;
    } catch (const std::exception &) {
    }
    rep.check("combined_matches", same);
    rep.check("combined_valid", verify_cyclic(u.combined));
    rep.check("density_product", u.combined.density() == u.parts[0].density() * u.parts[1].density());
    rep.check("density", rational_of(at(at(p, "combined"), "density")) == u.combined.density());
  } else if (kind == "tower") {
    verify_tower_payload(p, rep);
  } else if (kind == "margin") {
    auto S = get_field<std::vector<long>>(p, "S");
    auto d = get_field<std::size_t>(p, "d");
    Rational tol = rational_of(at(p, "tol"));
    MarginResult m = margin_of(p);
    MarginOptions o;
    o.node_budget = get_field<std::uint64_t>(p, "node_budget");
    rep.check("witness_value", m.witness.size() == d && margin_value(S, m.witness) == m.lower);
    rep.check("enclosure_replay", margin_replays(S, d, tol, m, o));
    rep.check("enclosure_ordered", m.lower <= m.upper && (!m.converged || m.upper - m.lower <= tol));
  } else if (kind == "stage") {
    PipelineConfig cfg = config_of(at(p, "config"));
    StagePayload sp = stage_of(at(p, "stage"));
    std::optional<StageRecord> prev;
    if (!at(p, "previous").is_null()) {
      StageRecord pr;
      pr.k = sp.rec.k - 1;
      pr.S = get_field<IntSet>(p, "previous");
      prev = pr;
    }
    verify_stage(sp, prev ? &*prev : nullptr, cfg, at(p, "stage"), rep);
  } else if (kind == "pipeline") {
    PipelineConfig cfg = config_of(at(p, "config"));
    rep.check("config", cfg.delta < cfg.delta_prime && cfg.delta_prime < make_rational(1, 2) && cfg.tol > 0);
    const json &st = at(p, "stages");
    rep.check("stage_count", st.size() == cfg.K);
    std::vector<StageRecord> recs;
    for (std::size_t i = 0; i < st.size(); ++i) {
      StagePayload sp = stage_of(st[i]);
      rep.check("stage" + std::to_string(i + 1) + ".index", sp.rec.k == i + 1);
      verify_stage(sp, recs.empty() ? nullptr : &recs.back(), cfg, st[i], rep);
      recs.push_back(sp.rec);
    }
    const json &dg = at(p, "diagonal");
    if (!dg.is_null()) {
      std::set<long> uni;
      bool parts_ok = at(dg, "parts").size() == recs.size();
      for (auto &part : at(dg, "parts")) {
        auto n = get_field<std::size_t>(part, "n");
        auto R = get_field<IntSet>(part, "R");
        if (n < 1 || n > recs.size()) {
          parts_ok = false;
          continue;
        }
        Rational radius = make_rational(1, static_cast<long>(n));
        bool ok = !R.empty() && sorted_unique(R) && subset_of(R, recs[n - 1].S);
        auto ms = translate_order(static_cast<long>(n) - 1);
        const json &mj = at(part, "margins");
        ok = ok && mj.size() == ms.size();
        for (std::size_t i = 0; ok && i < ms.size(); ++i) {
          MarginResult m = margin_of(mj[i]);
          ok = get_field<long>(mj[i], "m") == ms[i] && m.upper < radius &&
               margin_replays(shift_set(R, ms[i]), n, cfg.tol, m, cfg.margin);
        }
        parts_ok = parts_ok && ok;
        uni.insert(R.begin(), R.end());
      }
      rep.check("diagonal_parts", parts_ok);
      rep.check("diagonal_union", get_field<IntSet>(dg, "united") == IntSet(uni.begin(), uni.end()));
    }
  } else {
    rep.failures.push_back("kind");
  }
}

} // namespace detail

inline VerifyReport verify_envelope(const json &env)
{
  VerifyReport rep;
  try {
    rep.kind = get_field<std::string>(env, "kind");
    if (get_field<int>(env, "version") != format_version) {
      rep.failures.push_back("version");
      return rep;
    }
    const json &payload = at(env, "payload");
    if (get_field<std::string>(env, "digest") != payload_digest(payload)) {
      rep.failures.push_back("payload_digest");
      return rep;
    }
    rep.passed.push_back("payload_digest");
    detail::verify_payload(rep.kind, payload, rep);
  } catch (const FormatError &e) {
    rep.failures.push_back("format");
    rep.notes.push_back(e.what());
  } catch (const std::exception &e) {
    rep.failures.push_back("recheck");
    rep.notes.push_back(e.what());
  }
  return rep;
}

inline VerifyReport verify_text(const std::string &text)
{
  json env;
  try {
    env = json::parse(text);
  } catch (const json::exception &e) {
    VerifyReport rep;
    rep.failures.push_back("parse");
    rep.notes.push_back(e.what());
    return rep;
  }
  return verify_envelope(env);
}

} // namespace bohrrec
