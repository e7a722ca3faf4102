#include <bohrrec.hpp>
#include <bohrrec/oracle.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace bohrrec;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<long> parse_list(const std::string &s)
{
  std::vector<long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception &) {
      throw UsageError("bad integer list: " + s);
    }
    if (used != item.size()) throw UsageError("bad integer list: " + s);
    out.push_back(v);
  }
  return out;
}

Rational rat(const std::string &s)
{
  try {
    return parse_rational(s);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
}

std::vector<Rational> parse_rationals(const std::string &s)
{
  std::vector<Rational> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(rat(item));
  return out;
}

std::pair<long, long> parse_range(const std::string &s)
{
  auto c = s.find(':');
  if (c == std::string::npos) throw UsageError("range must be lo:hi");
  auto lo = parse_list(s.substr(0, c)), hi = parse_list(s.substr(c + 1));
  if (lo.size() != 1 || hi.size() != 1 || lo[0] > hi[0]) throw UsageError("bad range " + s);
  return {lo[0], hi[0]};
}

void emit(const std::string &text, const std::string &out)
{
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << text;
}

void emit_json(const json &j, const std::string &out) { emit(j.dump(2) + "\n", out); }

std::string slurp(const std::string &path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Subset parse_cell(unsigned p, const std::string &s)
{
  std::vector<unsigned> e;
  for (long v : parse_list(s)) {
    if (v < 0 || v >= static_cast<long>(p)) throw UsageError("cell element outside Z/p");
    e.push_back(static_cast<unsigned>(v));
  }
  return subset_from_list(p, e);
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"certified computations for Bohr recurrence and measurable recurrence"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out;
  unsigned threads = 1;
  app.add_option("--out,-o", out, "write output here instead of stdout");
  app.add_option("--threads", threads, "worker threads for margin evaluation")->check(CLI::Range(1u, 256u));

  // tile
  auto *tile = app.add_subcommand("tile", "least d with |E(k+1,d)| above (1-eps) p^d");
  unsigned t_p = 2;
  std::size_t t_k = 1, t_dmax = 4096;
  std::string t_eps;
  tile->add_option("--p", t_p)->required();
  tile->add_option("--k", t_k)->required();
  tile->add_option("--eps", t_eps)->required();
  tile->add_option("--d-max", t_dmax);

  // count
  auto *count = app.add_subcommand("count", "exact cell and family counts");
  unsigned c_p = 2;
  std::size_t c_k = 1;
  std::string c_d, c_family = "E", c_cell;
  bool c_csv = false;
  count->add_option("--p", c_p)->required();
  count->add_option("--k", c_k)->required();
  count->add_option("--d", c_d, "d or lo:hi")->required();
  count->add_option("--family", c_family, "E, E0 or bias")->check(CLI::IsMember({"E", "E0", "bias"}));
  count->add_option("--cell", c_cell, "elements of C for --family bias");
  count->add_flag("--csv", c_csv, "one CSV row per d");

  // tower
  auto *tower = app.add_subcommand("tower", "build and verify a Rohlin tower certificate");
  unsigned w_p = 2;
  std::size_t w_k = 1, w_dmax = 4096, w_cap = default_box_cap;
  std::string w_eps, w_mode = "exact";
  std::uint64_t w_seed = 1;
  tower->add_option("--p", w_p)->required();
  tower->add_option("--k", w_k)->required();
  tower->add_option("--eps", w_eps)->required();
  tower->add_option("--mode", w_mode)->check(CLI::IsMember({"exact", "reduced"}));
  tower->add_option("--seed", w_seed);
  tower->add_option("--d-max", w_dmax);
  tower->add_option("--box-cap", w_cap);

  // witness
  auto *wit = app.add_subcommand("witness", "finite nonrecurrence witnesses");
  std::string x_set, x_delta, x_range;
  long x_n = 0, x_mod = 0;
  bool x_cyclic = false;
  std::vector<std::string> x_union;
  wit->add_option("--set", x_set, "S as a comma list");
  wit->add_option("--n", x_n, "interval length N");
  wit->add_flag("--cyclic", x_cyclic, "work in Z/N");
  wit->add_option("--mod", x_mod, "modulus for --cyclic (default 1+max|S|)");
  wit->add_option("--delta", x_delta, "search N for density above delta");
  wit->add_option("--n-range", x_range, "lo:hi for --delta");
  wit->add_option("--union", x_union, "S:N for each of two coprime parts")->expected(2);

  // margin
  auto *mar = app.add_subcommand("margin", "certified max over the torus of min_s max_j ||s x_j||");
  std::string m_set, m_tol = "1e-6";
  std::size_t m_dim = 1;
  std::uint64_t m_budget = MarginOptions{}.node_budget;
  mar->add_option("--set", m_set)->required();
  mar->add_option("--dim", m_dim)->required();
  mar->add_option("--tol", m_tol);
  mar->add_option("--budget", m_budget, "node budget");

  // pipeline
  auto *pipe = app.add_subcommand("pipeline", "staged construction of S_1 in S_2 in ...");
  PipelineConfig pc;
  std::string p_delta = "3/10", p_dprime = "7/20", p_tol = "1e-6", p_amb = "all", p_M;
  bool p_nodiag = false, p_table = false;
  pipe->add_option("--delta", p_delta);
  pipe->add_option("--delta-prime", p_dprime);
  pipe->add_option("--stages", pc.K);
  pipe->add_option("--max-k", pc.max_k, "refuse stages beyond this");
  pipe->add_option("--nmax", pc.n_max);
  pipe->add_option("--tol", p_tol);
  pipe->add_option("--seed", pc.seed);
  pipe->add_option("--ambient", p_amb, "all, Z, qZ or r+qZ");
  pipe->add_option("--translates", p_M, "M_k per stage as a comma list");
  pipe->add_option("--tower-d-max", pc.tower_d_max);
  pipe->add_flag("--no-diagonal", p_nodiag);
  pipe->add_flag("--table", p_table, "print a per-stage summary table to stderr");

  // verify
  auto *ver = app.add_subcommand("verify", "re-check a certificate file");
  std::string v_file;
  ver->add_option("file", v_file)->required();

  // oracle
  auto *orc = app.add_subcommand("oracle", "brute-force reference computations");
  orc->require_subcommand(1);
  auto *o_cells = orc->add_subcommand("cells", "enumerate bias cells");
  unsigned oc_p = 2;
  std::size_t oc_d = 4, oc_k = 1;
  o_cells->add_option("--p", oc_p)->required();
  o_cells->add_option("--d", oc_d)->required();
  o_cells->add_option("--k", oc_k)->required();
  auto *o_avoid = orc->add_subcommand("avoid", "exhaustive maximum avoiding set");
  std::string oa_set;
  long oa_n = 0;
  o_avoid->add_option("--set", oa_set)->required();
  o_avoid->add_option("--n", oa_n)->required();
  auto *o_grid = orc->add_subcommand("grid", "grid bound on the margin");
  std::string og_set;
  std::size_t og_dim = 1;
  long og_m = 4096;
  o_grid->add_option("--set", og_set)->required();
  o_grid->add_option("--dim", og_dim)->required();
  o_grid->add_option("--m", og_m);
  auto *o_raster = orc->add_subcommand("raster", "rasterized measure of an approximate Hamming ball");
  std::string or_h;
  long or_m = 64;
  o_raster->add_option("--hamming", or_h, "d,k,eta")->required();
  o_raster->add_option("--m", or_m);

  // export-svg
  auto *svg = app.add_subcommand("export-svg", "draw box unions in dimension 1 or 2");
  std::string s_in, s_ham, s_alpha;
  unsigned s_levels = 0;
  svg->add_option("--in", s_in, "tower certificate or box union JSON");
  svg->add_option("--hamming", s_ham, "d,k,eta");
  svg->add_option("--levels", s_levels, "draw T^a for a < levels");
  svg->add_option("--alpha", s_alpha, "rotation for --levels (default from the tower)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*tile) {
      TileOptions opt;
      opt.d_max = t_dmax;
      auto r = gp_tile(t_p, t_k, rat(t_eps), opt);
      json j = to_json(r);
      j["display"] = json{{"fraction_lower", decimal(r.fraction_lower)}};
      emit_json(j, out);
      return 0;
    }
    if (*count) {
      long lo = 0, hi = 0;
      if (c_d.find(':') != std::string::npos)
        std::tie(lo, hi) = parse_range(c_d);
      else
        lo = hi = parse_list(c_d).at(0);
      if (lo < 1) throw UsageError("d must be positive");
      json rows = json::array();
      std::string csv = "p,k,d,family,count,total,fraction\n";
      for (long d = lo; d <= hi; ++d) {
        Integer n;
        if (c_family == "bias") {
          if (c_cell.empty()) throw UsageError("--family bias needs --cell");
          n = count_bias(CellSpec{c_p, parse_cell(c_p, c_cell), c_k, static_cast<std::size_t>(d)});
        } else {
          n = count_family(make_family(c_family == "E0" ? FamilyKind::E0 : FamilyKind::E, c_p, c_k, static_cast<std::size_t>(d)));
        }
        Integer total = integer_pow(c_p, static_cast<unsigned long>(d));
        Rational f = make_rational(n, total);
        rows.push_back(json{{"d", d}, {"count", n.get_str()}, {"total", total.get_str()}, {"fraction", to_json(f)}});
        csv += std::to_string(c_p) + "," + std::to_string(c_k) + "," + std::to_string(d) + "," + c_family + "," + n.get_str() + "," +
               total.get_str() + "," + decimal(f) + "\n";
      }
      if (c_csv)
        emit(csv, out);
      else
        emit_json(json{{"p", c_p}, {"k", c_k}, {"family", c_family}, {"rows", rows}}, out);
      return 0;
    }
    if (*tower) {
      TowerOptions opt;
      opt.seed = w_seed;
      opt.d_max = w_dmax;
      opt.box_cap = w_cap;
      auto spec = build_tower(w_p, w_k, rat(w_eps), w_mode == "exact" ? TowerMode::exact : TowerMode::reduced, opt);
      auto cert = verify_tower(spec, opt);
      emit_json(make_envelope("tower", to_json(cert, opt), w_seed), out);
      if (!cert.valid) {
        for (auto &f : cert.failures()) std::cerr << "failed: " << f << "\n";
        return 1;
      }
      return 0;
    }
    if (*wit) {
      if (!x_union.empty()) {
        std::vector<CyclicWitness> parts;
        for (auto &u : x_union) {
          auto c = u.rfind(':');
          if (c == std::string::npos) throw UsageError("--union parts are S:N");
          auto S = normalize_set(parse_list(u.substr(0, c)));
          auto N = parse_list(u.substr(c + 1));
          if (N.size() != 1) throw UsageError("--union parts are S:N");
          parts.push_back(max_cyclic_avoiding(S, N[0]));
        }
        emit_json(make_envelope("union", to_json(union_certificate(parts[0], parts[1]))), out);
        return 0;
      }
      if (x_set.empty()) throw UsageError("witness needs --set or --union");
      IntSet S = normalize_set(parse_list(x_set));
      if (x_cyclic) {
        auto w = x_mod > 0 ? max_cyclic_avoiding(S, x_mod) : finite_set_certificate(S);
        emit_json(make_envelope("cyclic", to_json(w)), out);
        return 0;
      }
      if (!x_delta.empty()) {
        auto [lo, hi] = x_range.empty() ? std::pair<long, long>{1, 64} : parse_range(x_range);
        auto r = delta_certificate(S, rat(x_delta), lo, hi);
        if (!r.witness) {
          std::cerr << "no N in range beats delta; best density " << r.best_density.get_str() << " at N=" << r.best_N << "\n";
          return 1;
        }
        emit_json(make_envelope("witness", to_json(*r.witness)), out);
        return 0;
      }
      if (x_n < 1) throw UsageError("witness needs --n, --cyclic or --delta");
      emit_json(make_envelope("witness", to_json(max_avoiding_set(S, x_n))), out);
      return 0;
    }
    if (*mar) {
      auto S = parse_list(m_set);
      MarginOptions o;
      o.node_budget = m_budget;
      Rational tol = rat(m_tol);
      auto m = recurrence_margin(S, m_dim, tol, o);
      emit_json(make_envelope("margin", margin_json(S, m_dim, tol, m, o)), out);
      return m.converged ? 0 : 1;
    }
    if (*pipe) {
      pc.delta = rat(p_delta);
      pc.delta_prime = rat(p_dprime);
      pc.tol = rat(p_tol);
      pc.threads = threads;
      if (!(pc.delta < pc.delta_prime && pc.delta_prime < make_rational(1, 2))) throw UsageError("need delta < delta-prime < 1/2");
      if (!(pc.tol > 0)) throw UsageError("tol must be positive");
      try {
        pc.ambient = parse_ambient(p_amb);
      } catch (const std::invalid_argument &e) {
        throw UsageError(e.what());
      }
      if (!p_M.empty()) pc.M_schedule = parse_list(p_M);
      auto st = run_pipeline(pc);
      std::optional<DiagonalResult> dg;
      if (!p_nodiag) dg = select_diagonal(st, pc.tol, pc.margin);
      emit_json(make_envelope("pipeline", pipeline_json(pc, st, dg), pc.seed), out);
      if (p_table) std::cerr << render_report(st);
      return 0;
    }
    if (*ver) {
      auto rep = verify_text(slurp(v_file));
      std::cout << rep.to_json().dump(2) << "\n";
      for (auto &f : rep.failures) std::cerr << "failed: " << f << "\n";
      return rep.ok() ? 0 : 1;
    }
    if (*o_cells) {
      auto T = oracle::enumerate_cells(oc_p, oc_d, oc_k);
      json cells = json::array();
      for (std::size_t i = 0; i < T.subsets.size(); ++i)
        cells.push_back(json{{"C", T.subsets[i]},
                             {"size", T.cell_size[i]},
                             {"rep", std::find(T.reps.begin(), T.reps.end(), i) != T.reps.end()}});
      emit_json(json{{"p", oc_p}, {"d", oc_d}, {"k", oc_k}, {"count_E", T.count_E}, {"count_E0", T.count_E0}, {"cells", cells}},
                out);
      return 0;
    }
    if (*o_avoid) {
      auto S = parse_list(oa_set);
      emit_json(json{{"S", S}, {"N", oa_n}, {"max_size", oracle::exhaustive_avoiding(S, oa_n)}}, out);
      return 0;
    }
    if (*o_grid) {
      auto S = parse_list(og_set);
      auto g = oracle::grid_margin(S, og_dim, og_m);
      emit_json(json{{"S", S},
                     {"d", og_dim},
                     {"m", og_m},
                     {"sample_max", to_json(g.sample_max)},
                     {"upper", to_json(g.upper)},
                     {"argmax", points_json(g.argmax)}},
                out);
      return 0;
    }
    if (*o_raster) {
      auto h = parse_list(or_h.substr(0, or_h.rfind(',')));
      if (h.size() != 2 || h[0] < 1 || h[1] < 0) throw UsageError("--hamming is d,k,eta");
      BoxUnion u = approx_hamming(static_cast<std::size_t>(h[0]), static_cast<std::size_t>(h[1]), rat(or_h.substr(or_h.rfind(',') + 1)));
      auto r = oracle::rasterize(u, or_m);
      emit_json(json{{"m", or_m}, {"hits", r.hits}, {"estimate", to_json(r.estimate)}, {"measure", to_json(measure(u))}}, out);
      return 0;
    }
    if (*svg) {
      std::vector<SvgLayer> layers;
      RatPoint alpha;
      std::string title;
      if (!s_ham.empty()) {
        auto h = parse_list(s_ham.substr(0, s_ham.rfind(',')));
        if (h.size() != 2 || h[0] < 1 || h[1] < 0) throw UsageError("--hamming is d,k,eta");
        auto eta = s_ham.substr(s_ham.rfind(',') + 1);
        layers.push_back({approx_hamming(static_cast<std::size_t>(h[0]), static_cast<std::size_t>(h[1]), rat(eta)), "Hamm"});
        title = "Hamm(" + std::to_string(h[1]) + "," + eta + ") in T^" + std::to_string(h[0]);
      } else if (!s_in.empty()) {
        json j = json::parse(slurp(s_in));
        if (j.contains("payload") && j.value("kind", "") == "tower") {
          TowerSpec t = tower_of(j.at("payload").at("spec"));
          if (!t.E || !t.E1) throw UsageError("tower has no explicit boxes (reduced mode)");
          if (t.d > 2) throw SvgError("svg export needs d in {1,2}, got d=" + std::to_string(t.d));
          alpha = t.alpha_point();
          layers.push_back({*t.E, "E"});
          layers.push_back({*t.E1, "E'"});
          title = "tower p=" + std::to_string(t.p) + " d=" + std::to_string(t.d);
        } else {
          layers.push_back({boxes_of(j), "U"});
        }
      } else {
        throw UsageError("export-svg needs --in or --hamming");
      }
      if (!s_alpha.empty()) alpha = parse_rationals(s_alpha);
      if (s_levels > 0) {
        if (alpha.empty()) throw UsageError("--levels needs --alpha or a tower");
        layers = tower_levels(layers.front().u, alpha, s_levels);
      }
      emit(render_svg(layers, title), out);
      return 0;
    }
  } catch (const UsageError &e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 2;
  } catch (const SvgError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
