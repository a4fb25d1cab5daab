#include "rsb/bseries.hpp"
#include "rsb/classical.hpp"
#include "rsb/coalgebra.hpp"
#include "rsb/diffexpr.hpp"
#include "rsb/enumerate.hpp"
#include "rsb/errors.hpp"
#include "rsb/grafting.hpp"
#include "rsb/model.hpp"
#include "rsb/random.hpp"
#include "rsb/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef RSB_SPEC_DIR
#define RSB_SPEC_DIR "specs"
#endif

using namespace rsb;
using ojson = nlohmann::ordered_json;

namespace {

struct Options {
  std::string spec = std::string(RSB_SPEC_DIR) + "/phi4.json";
  std::string desk_spec = std::string(RSB_SPEC_DIR) + "/desk.json";
  std::string format = "text";
  std::string gamma;
  int edges = -1;
  std::string cap;
  std::uint64_t seed = 42;
  bool timings = false;
};

// Exit status: 0 success, 1 identity failed, 2 usage or input error.
struct Failed {};

bool json_out(const Options& o) { return o.format == "json"; }

EquationSpec spec_of(const Options& o) { return load_spec(o.spec); }

Cutoff cutoff_of(const Options& o, const EquationSpec& sp) {
  Cutoff c = default_cutoff(sp);
  if (!o.gamma.empty()) c.gamma = parse_rational(o.gamma);
  if (o.edges >= 0) c.max_edges = o.edges;
  return c;
}

Tree tree_of(const std::string& text, const EquationSpec& sp) {
  Tree t = parse_tree(text, sp.dim());
  (void)degree(t, sp);  // rejects undeclared labels
  return t;
}

Edge edge_of(const std::string& text, const EquationSpec& sp) {
  // "t,(m0,m1,...)" parsed through the tree grammar
  const Tree t = parse_tree("I[" + text + "](1)", sp.dim());
  return t.branches().front().edge;
}

Q cap_of(const Options& o, const std::vector<Tree>& trees, const EquationSpec& sp) {
  return o.cap.empty() ? support_cap(trees, sp) : parse_rational(o.cap);
}

ojson comb_json(const Comb& c) {
  ojson a = ojson::array();
  for (const auto& [t, v] : c) a.push_back({{"tree", t.key()}, {"coeff", to_string(v)}});
  return a;
}

void emit_comb(const Options& o, const Comb& c) {
  if (json_out(o))
    std::cout << comb_json(c).dump(2) << "\n";
  else
    std::cout << to_string(c) << "\n";
}

template <class Split, class L, class R>
void emit_split(const Options& o, const Split& c, L left_key, R right_key) {
  if (json_out(o)) {
    ojson a = ojson::array();
    for (const auto& [p, v] : c) a.push_back({{"left", left_key(p.first)}, {"right", right_key(p.second)}, {"coeff", to_string(v)}});
    std::cout << a.dump(2) << "\n";
  } else {
    for (const auto& [p, v] : c) std::cout << to_string(Q(v)) << "  " << left_key(p.first) << "  (x)  " << right_key(p.second) << "\n";
  }
}

Forest forest_of(const std::vector<std::string>& parts, const EquationSpec& sp) {
  std::vector<Tree> ts;
  for (const auto& p : parts) ts.push_back(tree_of(p, sp));
  return Forest(ts);
}

TreeChar character_of(const std::vector<std::string>& entries, const EquationSpec& sp) {
  // TREE=VALUE
  TreeChar c;
  for (const auto& e : entries) {
    const auto eq = e.rfind('=');
    if (eq == std::string::npos) throw SpecError("character entry '" + e + "' is not TREE=VALUE");
    c[tree_of(e.substr(0, eq), sp)] = parse_rational(e.substr(eq + 1));
  }
  return c;
}

GridPoint point_of(const std::string& text) {
  GridPoint p;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> p.it >> comma >> p.ix) || comma != ',') throw SpecError("grid point must be IT,IX");
  return p;
}

classical::VectorField field_of(const std::string& name, const std::string& file) {
  if (file.empty()) return classical::named_field(name);
  std::ifstream in(file);
  if (!in) throw SpecError("cannot open " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return classical::parse_field_json(ss.str());
}

void emit_comparison(const Options& o, const std::string& name, const SeriesComparison& c, bool symbolic,
                     ojson& out) {
  ojson s;
  s["theorem"] = name;
  s["target"] = c.target;
  s["agree"] = c.agree();
  s["lhs_terms"] = c.lhs.terms().size();
  s["rhs_terms"] = c.rhs.terms().size();
  if (symbolic) {
    s["lhs"] = ojson::parse(c.lhs.json());
    s["rhs"] = ojson::parse(c.rhs.json());
  }
  if (!json_out(o)) {
    std::cout << (c.agree() ? "AGREE " : "MISMATCH ") << name << " target " << c.target << "  terms "
              << c.lhs.terms().size() << " / " << c.rhs.terms().size() << "\n";
    if (symbolic) std::cout << "  lhs: " << c.lhs.str() << "\n  rhs: " << c.rhs.str() << "\n";
  }
  out.push_back(s);
}

void emit_report(const Options& o, const classical::ClassicalReport& r) {
  if (json_out(o))
    std::cout << r.json() << "\n";
  else {
    std::cout << (r.ok() ? "PASS " : "FAIL ") << r.name << " order " << r.order << " compared " << r.compared << "\n";
    for (const auto& m : r.mismatches) std::cout << "  " << m << "\n";
  }
  if (!r.ok()) throw Failed{};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decorated-tree B-series toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  auto* spec_opt = app.add_option("--spec", o.spec, "equation spec JSON")->capture_default_str();
  app.add_option("--desk-spec", o.desk_spec, "d = 1 spec used by desk-scale suites")->capture_default_str();
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  app.add_option("--gamma", o.gamma, "degree cutoff (rational)");
  app.add_option("--edges", o.edges, "edge cutoff");
  app.add_option("--cap", o.cap, "|l|_s cap for Delta_2 sums (rational)");
  app.add_option("--seed", o.seed, "random seed")->capture_default_str();
  app.add_flag("--timings", o.timings, "include wall-clock timings in reports");

  std::function<void()> action;
  auto on = [&](CLI::App* sub, std::function<void()> f) { sub->callback([&action, f] { action = f; }); };

  // ---- trees
  std::string space = "T";
  auto* en = app.add_subcommand("enumerate", "list trees of degree <= gamma");
  en->add_option("--space", space)->check(CLI::IsMember({"T", "T+"}))->capture_default_str();
  on(en, [&] {
    const auto sp = spec_of(o);
    const auto trees = enumerate_trees(sp, cutoff_of(o, sp), space == "T" ? Space::T : Space::TPlus);
    if (json_out(o)) {
      ojson a = ojson::array();
      for (const auto& t : trees)
        a.push_back({{"tree", t.key()}, {"degree", to_string(degree(t, sp))}, {"symmetry", to_string(t.symmetry())}});
      std::cout << a.dump(2) << "\n";
    } else {
      for (const auto& t : trees) std::cout << to_string(degree(t, sp)) << "\t" << t.key() << "\n";
    }
  });

  std::string tree_text;
  auto* sy = app.add_subcommand("symmetry", "symmetry factor S(tau)");
  sy->add_option("--tree", tree_text)->required();
  on(sy, [&] { std::cout << to_string(tree_of(tree_text, spec_of(o)).symmetry()) << "\n"; });
  auto* dg = app.add_subcommand("degree", "degree of a tree");
  dg->add_option("--tree", tree_text)->required();
  on(dg, [&] {
    const auto sp = spec_of(o);
    std::cout << to_string(degree(tree_of(tree_text, sp), sp)) << "\n";
  });

  // ---- grafting
  std::string left, right, edge_text, k_text;
  std::vector<std::string> left_forest, beta_entries;
  size_t direction = 0;
  bool plain = false, hat = false, literal_hat = false, recursive = false;
  auto* gr = app.add_subcommand("graft", "deformed grafting of LEFT onto RIGHT along EDGE");
  gr->add_option("--left", left)->required();
  gr->add_option("--right", right)->required();
  gr->add_option("--edge", edge_text, "t,(m0,...)")->required();
  on(gr, [&] {
    const auto sp = spec_of(o);
    emit_comb(o, graft(single(tree_of(left, sp)), edge_of(edge_text, sp), single(tree_of(right, sp))));
  });
  auto* ra = app.add_subcommand("raise", "raising operator on every node");
  ra->add_option("--tree", tree_text)->required();
  ra->add_option("--dir", direction, "direction i for up^i");
  ra->add_option("--k", k_text, "multi-index (k0,...) for the multi-step raise");
  ra->add_flag("--plain-weights", plain, "one per decomposition instead of multinomial");
  on(ra, [&] {
    const auto sp = spec_of(o);
    const Tree t = tree_of(tree_text, sp);
    if (k_text.empty()) {
      if (direction >= sp.dim()) throw SpecError("direction out of range");
      emit_comb(o, raise(t, direction));
    } else {
      const MultiIndex k = parse_tree("X^" + k_text, sp.dim()).k();
      emit_comb(o, raise_tilde(t, k, plain ? RaiseWeights::Plain : RaiseWeights::Multinomial));
    }
  });
  auto* s2 = app.add_subcommand("star2", "sigma star_2 tau");
  s2->add_option("--left", left)->required();
  s2->add_option("--right", right)->required();
  s2->add_flag("--plain-weights", plain);
  on(s2, [&] {
    const auto sp = spec_of(o);
    emit_comb(o, star2(tree_of(left, sp), tree_of(right, sp), plain ? RaiseWeights::Plain : RaiseWeights::Multinomial));
  });

  // ---- coproducts and M*
  auto* s1 = app.add_subcommand("star1", "forest star_1 tree");
  s1->add_option("--left", left_forest, "forest factors (repeat)")->required();
  s1->add_option("--right", right)->required();
  on(s1, [&] {
    const auto sp = spec_of(o);
    emit_comb(o, star1(forest_of(left_forest, sp), tree_of(right, sp)));
  });
  auto* d2 = app.add_subcommand("delta2", "recentering coproduct");
  d2->add_option("--tree", tree_text)->required();
  d2->add_flag("--hat", hat, "multiplicative hat variant");
  on(d2, [&] {
    const auto sp = spec_of(o);
    const Tree t = tree_of(tree_text, sp);
    emit_split(o, delta2(t, sp.s, cap_of(o, {t}, sp), hat), [](const Tree& x) { return x.key(); },
               [](const Tree& x) { return x.key(); });
  });
  auto* d1 = app.add_subcommand("delta1", "extraction coproduct");
  d1->add_option("--tree", tree_text)->required();
  d1->add_flag("--literal-hat", literal_hat, "use the multiplicative hat-Delta_2 throughout");
  on(d1, [&] {
    const auto sp = spec_of(o);
    const Tree t = tree_of(tree_text, sp);
    emit_split(o, delta1(t, sp.s, cap_of(o, {t}, sp), literal_hat ? Delta1Variant::LiteralHat : Delta1Variant::Corrected),
               [](const Forest& f) { return f.key(); }, [](const Tree& x) { return x.key(); });
  });
  auto* ms = app.add_subcommand("mstar", "adjoint renormalisation map M*_beta");
  ms->add_option("--tree", tree_text)->required();
  ms->add_option("--beta", beta_entries, "TREE=VALUE (repeat)");
  ms->add_flag("--recursive", recursive, "tree recursion instead of the star_1 sum");
  on(ms, [&] {
    const auto sp = spec_of(o);
    const auto beta = character_of(beta_entries, sp);
    const Tree t = tree_of(tree_text, sp);
    emit_comb(o, recursive ? mstar_recursive(beta, t) : mstar_star1(beta, t));
  });

  // ---- B-series
  std::string target;
  bool symbolic = false;
  auto* bs = app.add_subcommand("bseries", "B-series theorems with seeded random characters");
  bs->require_subcommand(1);
  for (const std::string kind : {"compose", "substitute", "root-substitute"}) {
    auto* sub = bs->add_subcommand(kind);
    sub->add_option("--target", target, "kernel label (default: all)");
    sub->add_flag("--symbolic", symbolic, "print both sides");
    on(sub, [&, kind] {
      const auto sp = spec_of(o);
      const Cutoff cut = cutoff_of(o, sp);
      Rng rng(o.seed);
      const auto ch = random_bseries_characters(sp, cut, rng);
      ojson out = ojson::array();
      bool ok = true;
      for (const auto& [t, deg] : sp.kernels) {
        if (!target.empty() && t != target) continue;
        if (kind == "compose") {
          const auto c = compose_series(sp, ch.alpha, ch.beta, cut, t);
          emit_comparison(o, "composition", c, symbolic, out);
          ok = ok && c.agree();
        } else if (kind == "substitute") {
          const auto c = substitute_series(sp, ch.alpha_small, ch.sub, t);
          emit_comparison(o, "substitution", c, symbolic, out);
          ok = ok && c.agree();
        } else {
          const auto a = root_substitute_series(sp, ch.beta, ch.sub_series, cut, t);
          const auto b = root_substitution_circ(sp, ch.sub, t);
          emit_comparison(o, "root-substitution", a, symbolic, out);
          emit_comparison(o, "root-substitution-renormalised", b, symbolic, out);
          ok = ok && a.agree() && b.agree();
        }
      }
      if (out.empty()) throw UnknownLabel("kernel '" + target + "'");
      if (json_out(o)) std::cout << ojson{{"seed", o.seed}, {"results", out}, {"pass", ok}}.dump(2) << "\n";
      if (!ok) throw Failed{};
    });
  }

  // ---- classical
  std::string field = "trees5", field_file;
  int order = 5;
  auto* cl = app.add_subcommand("classical", "plain rooted trees and classical B-series");
  cl->require_subcommand(1);
  auto* cg = cl->add_subcommand("gamma", "tree density");
  cg->add_option("--tree", tree_text)->required();
  on(cg, [&] { std::cout << to_string(classical::gamma_density(classical::parse_plain_tree(tree_text))) << "\n"; });
  for (const std::string kind : {"bck", "ec"}) {
    auto* sub = cl->add_subcommand(kind, kind == "bck" ? "admissible-cut coproduct" : "extraction-contraction coproduct");
    sub->add_option("--tree", tree_text)->required();
    on(sub, [&, kind] {
      const auto t = classical::parse_plain_tree(tree_text);
      const auto c = kind == "bck" ? classical::bck_coproduct(t) : classical::ec_coproduct(t);
      emit_split(o, c, classical::forest_key, classical::forest_key);
    });
  }
  for (const std::string kind : {"verify-composition", "verify-substitution", "verify-cointeraction", "verify-flow"}) {
    auto* sub = cl->add_subcommand(kind);
    sub->add_option("--field", field, "linear, square, quadratic2d, quartic2d, trees<n>")->capture_default_str();
    sub->add_option("--field-file", field_file, "vector field JSON");
    sub->add_option("--order", order)->capture_default_str();
    on(sub, [&, kind] {
      Rng rng(o.seed);
      const auto F = field_of(field, field_file);
      if (kind == "verify-composition") {
        const auto a = random_classical_character(rng, order, 1);
        const auto b = random_classical_character(rng, order, 1);
        emit_report(o, classical::verify_classical_composition(a, b, F, order));
      } else if (kind == "verify-substitution") {
        const auto b = random_classical_character(rng, order, 1);
        const auto a = random_classical_character(rng, order, 0);
        emit_report(o, classical::verify_classical_substitution(b, a, F, order));
      } else if (kind == "verify-cointeraction") {
        const auto b = random_classical_character(rng, order, 0);
        const auto a1 = random_classical_character(rng, order, 1);
        const auto a2 = random_classical_character(rng, order, 1);
        emit_report(o, classical::verify_classical_cointeraction(b, a1, a2, order));
      } else {
        emit_report(o, classical::verify_exact_flow(F, order));
      }
    });
  }

  // ---- numerical model
  std::string z_text = "0,0", out_file;
  std::vector<std::string> at_points, noise_files;
  ModelConfig mc;
  bool plus_sign = false;
  std::vector<int> scales{16, 8, 4, 2};
  auto* mo = app.add_subcommand("model", "numerical model on a periodic grid (d = 1)");
  mo->require_subcommand(1);
  mo->add_option("--nt", mc.nt)->capture_default_str();
  mo->add_option("--nx", mc.nx)->capture_default_str();
  mo->add_option("--noise", noise_files, "LABEL=FILE grid csv (repeat)");
  auto model_of = [&](const EquationSpec& sp) {
    mc.seed = o.seed;
    auto m = std::make_unique<Model>(sp, mc);
    for (const auto& e : noise_files) {
      const auto eq = e.find('=');
      if (eq == std::string::npos) throw SpecError("--noise expects LABEL=FILE");
      load_noise(*m, e.substr(0, eq), e.substr(eq + 1));
    }
    return m;
  };
  auto points_of = [&](const Model& m) {
    std::vector<GridPoint> pts;
    for (const auto& p : at_points) {
      const auto g = point_of(p);
      pts.push_back(m.wrap(g.it, g.ix));
    }
    if (pts.empty()) {
      Rng rng(o.seed);
      for (int i = 0; i < 8; ++i)
        pts.push_back({static_cast<int>(rng.below(mc.nt)), static_cast<int>(rng.below(mc.nx))});
    }
    return pts;
  };
  auto emit_field = [&](const Model& m, const Model::Field& f, const std::vector<GridPoint>& pts) {
    if (!out_file.empty())
      write_grid_csv(out_file, {mc.nt, mc.nx, mc.T / mc.nt, mc.L / mc.nx, f});
    ojson a = ojson::array();
    std::ostringstream text;
    text << std::setprecision(12);
    for (const auto& p : pts) {
      a.push_back({{"it", p.it}, {"ix", p.ix}, {"value", m.at(f, p)}});
      text << p.it << "," << p.ix << "\t" << m.at(f, p) << "\n";
    }
    std::cout << (json_out(o) ? a.dump(2) + "\n" : text.str());
  };
  for (const std::string kind : {"pi", "piz", "fz-check", "decay"}) {
    auto* sub = mo->add_subcommand(kind);
    sub->add_option("--tree", tree_text)->required();
    sub->add_option("--z", z_text, "base point IT,IX")->capture_default_str();
    sub->add_option("--at", at_points, "evaluation points IT,IX (repeat)");
    if (kind == "pi" || kind == "piz") sub->add_option("--out", out_file, "write the full grid as csv");
    if (kind == "fz-check") sub->add_flag("--plus-sign", plus_sign, "evaluate with f_z(X_i) = +z_i");
    if (kind == "decay") sub->add_option("--scales", scales)->capture_default_str();
    on(sub, [&, kind] {
      // the model needs d = 1, so the desk spec stands in unless --spec is given
      const auto sp = load_spec(spec_opt->count() ? o.spec : o.desk_spec);
      auto m = model_of(sp);
      const Tree t = tree_of(tree_text, sp);
      const GridPoint zp = point_of(z_text);
      const GridPoint z = m->wrap(zp.it, zp.ix);
      if (kind == "pi") {
        emit_field(*m, m->pi(t), points_of(*m));
      } else if (kind == "piz") {
        emit_field(*m, m->pi_recentred(z, t), points_of(*m));
      } else if (kind == "fz-check") {
        const auto r = m->check_factorisation(z, t, points_of(*m), plus_sign ? FzSign::Plus : FzSign::Minus);
        const ojson j{{"tree", t.key()},     {"max_abs_error", r.max_abs_error}, {"max_abs_value", r.max_abs_value},
                      {"samples", r.samples}, {"terms", r.terms}};
        if (json_out(o))
          std::cout << j.dump(2) << "\n";
        else
          std::cout << std::setprecision(3) << "max error " << r.max_abs_error << " (max |value| " << r.max_abs_value
                    << ", " << r.samples << " samples, " << r.terms << " terms)\n";
      } else {
        const double slope = m->estimate_decay_exponent(z, t, scales);
        const ojson j{{"tree", t.key()}, {"degree", to_string(degree(t, sp))}, {"slope", slope}};
        if (json_out(o))
          std::cout << j.dump(2) << "\n";
        else
          std::cout << std::setprecision(4) << "slope " << slope << "  degree " << to_string(degree(t, sp)) << "\n";
      }
    });
  }

  // ---- verification suites
  std::string suite_name;
  auto* ve = app.add_subcommand("verify", "run identity suites and report");
  ve->add_option("suite", suite_name, "all, cointeraction, or a suite id")->required();
  on(ve, [&] {
    VerifyContext c = default_context(RSB_SPEC_DIR, o.seed);
    c.main_spec = load_spec(o.spec);
    c.desk_spec = load_spec(o.desk_spec);
    c.main_cut = cutoff_of(o, c.main_spec);
    c.desk_cut = default_cutoff(c.desk_spec);
    std::vector<SuiteResult> results;
    bool known = false;
    for (const auto& s : all_suites()) {
      const bool pick = suite_name == "all" || s.id == suite_name ||
                        (suite_name == "cointeraction" && s.id.find("cointeraction") != std::string::npos);
      if (!pick) continue;
      known = true;
      results.push_back(s.run(c));
    }
    if (!known) throw SpecError("unknown suite '" + suite_name + "'");
    std::cout << (json_out(o) ? report_json(c, results, o.timings) : report_text(results, o.timings));
    for (const auto& r : results)
      if (!r.pass()) throw Failed{};
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (action) action();
  } catch (const Failed&) {
    return 1;
  } catch (const TheoremMismatch& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
