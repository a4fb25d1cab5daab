#include "rsb/verify.hpp"

#include "rsb/bseries.hpp"
#include "rsb/classical.hpp"
#include "rsb/coalgebra.hpp"
#include "rsb/errors.hpp"
#include "rsb/grafting.hpp"
#include "rsb/random.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace rsb {

void SuiteResult::check(bool ok, const std::function<std::string()>& describe) {
  ++checked;
  if (ok) return;
  ++failed;
  if (counterexamples.size() < 5) counterexamples.push_back(describe());
}

classical::Character random_classical_character(Rng& rng, int max_nodes, const Q& unit) {
  classical::Character ch;
  ch.unit = unit;
  for (const auto& t : classical::trees_up_to(max_nodes)) ch.values[t] = rng.rational(4, 4);
  return ch;
}

BSeriesCharacters random_bseries_characters(const EquationSpec& spec, const Cutoff& cut, Rng& rng) {
  const auto T = enumerate_trees(spec, cut, Space::T);
  const auto P = enumerate_trees(spec, cut, Space::TPlus);
  const Tree unit = Tree::unit(spec.dim());
  BSeriesCharacters ch;
  ch.alpha[unit] = 1;
  for (const auto& t : T)
    if (!t.is_unit() && rng.below(3) == 0) ch.alpha[t] = rng.nonzero_rational();
  for (size_t k = 0; k < spec.dim(); ++k) ch.beta.x.push_back(rng.rational());
  for (const auto& p : P)
    if (p.is_planted() && rng.below(2) == 0) ch.beta.planted[p] = rng.nonzero_rational();
  std::vector<Tree> small;
  for (const auto& t : T)
    if (!t.is_unit() && t.edges() <= 2) small.push_back(t);
  for (int i = 0; i < 3 && !small.empty(); ++i) ch.sub[small[rng.below(small.size())]] = rng.nonzero_rational();
  for (const auto& [t, v] : ch.alpha)
    if (t.edges() <= 2) ch.alpha_small[t] = v;
  ch.sub_series[unit] = 1;
  for (const auto& [t, v] : ch.sub) ch.sub_series[t] = v;
  return ch;
}

VerifyContext default_context(const std::string& spec_dir, std::uint64_t seed) {
  VerifyContext c;
  c.main_spec = load_spec(spec_dir + "/phi4.json");
  c.desk_spec = load_spec(spec_dir + "/desk.json");
  c.main_cut = default_cutoff(c.main_spec);
  c.desk_cut = default_cutoff(c.desk_spec);
  c.bseries_cut = Cutoff{Q(5, 2), 4};
  c.seed = seed;
  c.model.seed = seed;
  return c;
}

namespace {

using classical::Character;
using classical::PlainTree;

Rng suite_rng(const VerifyContext& c, std::uint64_t salt) { return Rng(c.seed * 0x9E3779B97F4A7C15ULL + salt); }

std::string cut_str(const Cutoff& c) {
  return "gamma=" + to_string(c.gamma) + (c.max_edges ? ", edges<=" + std::to_string(*c.max_edges) : "");
}

// Product over nodes of the size of the subtree rooted there.
Z subtree_size_product(const PlainTree& t, int& size) {
  Z p = 1;
  size = 1;
  for (const auto& c : t.children()) {
    int s = 0;
    p *= subtree_size_product(c, s);
    size += s;
  }
  return p * size;
}

template <class Fn>
SuiteResult timed(const std::string& id, const std::string& title, Fn&& body) {
  SuiteResult r;
  r.id = id;
  r.title = title;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    ++r.checked;
    ++r.failed;
    r.counterexamples.push_back(std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Q coeff(const Comb& c, const Tree& t) {
  auto it = c.find(t);
  return it == c.end() ? Q(0) : it->second;
}

TreeChar random_forest_character(Rng& rng, const std::vector<Tree>& pool, int max_edges, size_t count) {
  std::vector<Tree> cands;
  for (const auto& t : pool)
    if (!t.is_unit() && t.edges() <= max_edges) cands.push_back(t);
  TreeChar b;
  for (size_t i = 0; i < count && !cands.empty(); ++i) b[cands[rng.below(cands.size())]] = rng.nonzero_rational();
  return b;
}

std::string fixed(double v, int digits) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << v;
  return o.str();
}

std::string scientific(double v) {
  std::ostringstream o;
  o << std::scientific << std::setprecision(1) << v;
  return o.str();
}

int kernel_edges(const Tree& t) {
  int n = 0;
  for (const auto& br : t.branches()) n += 1 + kernel_edges(br.sub);
  return n;
}

}  // namespace

SuiteResult suite_classical_baseline(const VerifyContext&) {
  return timed("classical-baseline", "tree density and exact-flow B-series", [](SuiteResult& r) {
    const auto trees = classical::trees_up_to(6);
    for (const auto& t : trees) {
      int size = 0;
      const Z oracle = subtree_size_product(t, size);
      r.check(classical::gamma_density(t) == oracle,
              [&] { return "gamma " + t.key() + " = " + to_string(classical::gamma_density(t)); });
    }
    r.note("trees", std::to_string(trees.size()));
    for (const std::string f : {"linear", "square"}) {
      const auto F = classical::named_field(f);
      const auto rep = classical::verify_exact_flow(F, 5);
      r.check(rep.ok(), [&] { return rep.mismatches.front(); });
      // closed forms: y e^h and y / (1 - h y)
      const auto series = classical::bseries(classical::exact_flow_character(5), F, 5);
      for (int n = 0; n <= 5; ++n) {
        classical::Poly expect;
        std::vector<int> e{f == "linear" ? 1 : n + 1};
        expect[e] = f == "linear" ? Q(1) / Q(factorial(n)) : Q(1);
        r.check(series[0].c[n] == expect,
                [&] { return f + " h^" + std::to_string(n) + ": " + classical::poly_str(series[0].c[n]); });
      }
    }
  });
}

SuiteResult suite_classical_theorems(const VerifyContext& c) {
  return timed("classical-theorems", "classical composition and substitution", [&](SuiteResult& r) {
    Rng rng = suite_rng(c, 2);
    // (field, order, pairs): the tree system is the main check, the dense planar field a cross-check
    const std::vector<std::tuple<std::string, int, int>> runs{{"trees5", 5, 20}, {"quartic2d", 3, 3}};
    for (const auto& [name, order, pairs] : runs) {
      const auto F = classical::named_field(name);
      r.check(classical::elementary_differentials_independent(F, order),
              [&] { return "elementary differentials of " + name + " are dependent"; });
      for (int i = 0; i < pairs; ++i) {
        const auto a = random_classical_character(rng, order, 1), b = random_classical_character(rng, order, 1);
        const auto comp = classical::verify_classical_composition(a, b, F, order);
        r.check(comp.ok(), [&] { return name + " composition pair " + std::to_string(i) + ": " + comp.mismatches.front(); });
        const auto a0 = random_classical_character(rng, order, 0);
        const auto sub = classical::verify_classical_substitution(b, a0, F, order);
        r.check(sub.ok(), [&] { return name + " substitution pair " + std::to_string(i) + ": " + sub.mismatches.front(); });
      }
      r.note(name, "order " + std::to_string(order) + ", " + std::to_string(pairs) + " pairs");
    }
  });
}

SuiteResult suite_classical_cointeraction(const VerifyContext& c) {
  return timed("classical-cointeraction", "BCK / EC co-interaction", [&](SuiteResult& r) {
    const auto forests = classical::forests_up_to(5);
    for (const auto& f : forests) {
      const bool ok = classical::cointeraction_lhs(f) == classical::cointeraction_rhs(f);
      r.check(ok, [&] { return "forest " + classical::forest_key(f); });
    }
    r.note("forests", std::to_string(forests.size()));
    Rng rng = suite_rng(c, 3);
    for (int i = 0; i < 5; ++i) {
      const auto rep = classical::verify_classical_cointeraction(random_classical_character(rng, 5, 0),
                                                                 random_classical_character(rng, 5, 1),
                                                                 random_classical_character(rng, 5, 1), 5);
      r.check(rep.ok(), [&] { return rep.mismatches.front(); });
    }
  });
}

SuiteResult suite_grafting_identities(const VerifyContext& c) {
  return timed("grafting-identities", "multi-pre-Lie and raising/grafting commutator", [&](SuiteResult& r) {
    Rng rng = suite_rng(c, 4);
    TreeShape shape;
    shape.dim = 2;
    shape.max_edges = 4;
    shape.kernels = {"t", "u"};
    shape.noises = {"x", "y"};
    int nontrivial = 0;
    for (int i = 0; i < 200; ++i) {
      const Tree t1 = random_tree(rng, shape), t2 = random_tree(rng, shape), t3 = random_tree(rng, shape);
      const Edge a{shape.kernels[rng.below(2)], random_index(rng, 2, 2)};
      const Edge b{shape.kernels[rng.below(2)], random_index(rng, 2, 2)};
      const Comb c1 = single(t1), c2 = single(t2), c3 = single(t3);
      Comb lhs = graft(graft(c1, a, c2), b, c3);
      add_scaled(lhs, graft(c1, a, graft(c2, b, c3)), Q(-1));
      Comb rhs = graft(graft(c2, b, c1), a, c3);
      add_scaled(rhs, graft(c2, b, graft(c1, a, c3)), Q(-1));
      if (!lhs.empty()) ++nontrivial;
      r.check(lhs == rhs, [&] { return "pre-Lie " + t1.key() + " | " + t2.key() + " | " + t3.key(); });
    }
    r.note("pre-Lie nonzero associators", std::to_string(nontrivial));
    for (int i = 0; i < 200; ++i) {
      const Tree s = random_tree(rng, shape), t = random_tree(rng, shape);
      const Edge a{shape.kernels[rng.below(2)], random_index(rng, 2, 2)};
      const size_t dir = rng.below(2);
      const Comb cs = single(s), ct = single(t);
      const Comb lhs = raise(graft(cs, a, ct), dir);
      Comb rhs = graft(raise(cs, dir), a, ct);
      add_scaled(rhs, graft(cs, a, raise(ct, dir)), Q(1));
      if (auto lowered = a.m.minus(MultiIndex::unit(2, dir))) add_scaled(rhs, graft(cs, Edge{a.label, *lowered}, ct), Q(-1));
      r.check(lhs == rhs, [&] { return "commutator " + s.key() + " | " + t.key() + " a=" + a.str(); });
    }
  });
}

SuiteResult suite_star2_associativity(const VerifyContext& c) {
  return timed("star2-associativity", "associativity of star_2 on T_+", [&](SuiteResult& r) {
    const auto P = enumerate_trees(c.main_spec, c.main_cut, Space::TPlus);
    r.note("T_+ size", std::to_string(P.size()));
    r.note("cutoff", cut_str(c.main_cut));
    Rng rng = suite_rng(c, 5);
    for (int i = 0; i < 100; ++i) {
      const Tree& a = P[rng.below(P.size())];
      const Tree& b = P[rng.below(P.size())];
      const Tree& d = P[rng.below(P.size())];
      const Comb l = star2(star2(single(a), single(b)), single(d));
      const Comb rr = star2(single(a), star2(single(b), single(d)));
      r.check(l == rr, [&] { return a.key() + " | " + b.key() + " | " + d.key(); });
    }
  });
}

SuiteResult suite_duality(const VerifyContext& c) {
  return timed("star2-delta2-duality", "<sigma star_2 tau, rho> = <sigma (x) tau, Delta_2 rho>", [&](SuiteResult& r) {
    const auto T = enumerate_trees(c.desk_spec, c.desk_cut, Space::T);
    const auto P = enumerate_trees(c.desk_spec, c.desk_cut, Space::TPlus);
    const Q cap = support_cap(T, c.desk_spec);
    r.note("cutoff", cut_str(c.desk_cut));
    r.note("cap", to_string(cap));
    std::map<Tree, SplitComb> D;
    for (const auto& rho : T) D[rho] = delta2(rho, c.desk_spec.s, cap);
    for (const auto& s : P)
      for (const auto& t : T) {
        const Comb st = star2(s, t);
        for (const auto& rho : T) {
          const Q lhs = coeff(st, rho) * Q(rho.symmetry());
          auto it = D[rho].find({s, t});
          const Q rhs = it == D[rho].end() ? Q(0) : it->second * Q(s.symmetry()) * Q(t.symmetry());
          r.check(lhs == rhs, [&] { return s.key() + " | " + t.key() + " | " + rho.key(); });
        }
      }
  });
}

SuiteResult suite_cointeraction(const VerifyContext& c, int betas) {
  return timed("decorated-cointeraction", "M*(tau star_2 sigma) = (hat-M* tau) star_2 (M* sigma) and adjoints",
               [&](SuiteResult& r) {
                 const auto T = enumerate_trees(c.desk_spec, c.desk_cut, Space::T);
                 const auto P = enumerate_trees(c.desk_spec, c.desk_cut, Space::TPlus);
                 r.note("cutoff", cut_str(c.desk_cut));
                 Rng rng = suite_rng(c, 7);
                 for (int i = 0; i < betas; ++i) {
                   const TreeChar beta = random_forest_character(rng, T, 2, 3);
                   std::map<Tree, Comb> ms;
                   for (const auto& t : T) ms[t] = mstar_star1(beta, t);
                   for (const auto& tau : P) {
                     const Comb hat = mhat_star(beta, tau);
                     for (const auto& sigma : T) {
                       const Comb lhs = mstar(beta, star2(tau, sigma));
                       const Comb rhs = star2(hat, ms[sigma]);
                       r.check(lhs == rhs, [&] { return "beta " + std::to_string(i) + ": " + tau.key() + " | " + sigma.key(); });
                     }
                   }
                   // adjointness of hat-M* with hat-M = (beta (x) id) Delta_circ and of M* with M = (beta (x) id) Delta_1
                   std::vector<Tree> seen = T;
                   for (const auto& [t, m] : ms)
                     for (const auto& [u, v] : m) seen.push_back(u);
                   const Q cap = support_cap(seen, c.desk_spec);
                   for (const auto& rho : P) {
                     const Comb mh = mhat_beta(beta, rho, c.desk_spec.s, cap);
                     for (const auto& tau : P) {
                       const Q lhs = inner_product(mhat_star(beta, tau), single(rho));
                       const Q rhs = inner_product(single(tau), mh);
                       r.check(lhs == rhs, [&] { return "hat adjoint " + tau.key() + " | " + rho.key(); });
                     }
                   }
                   for (const auto& rho : T) {
                     const Comb m = m_beta(beta, rho, c.desk_spec.s, cap);
                     for (const auto& tau : T) {
                       const Q lhs = inner_product(ms[tau], single(rho));
                       const Q rhs = inner_product(single(tau), m);
                       r.check(lhs == rhs, [&] { return "adjoint " + tau.key() + " | " + rho.key(); });
                     }
                   }
                 }
                 r.note("betas", std::to_string(betas));
               });
}

SuiteResult suite_star_morphism(const VerifyContext& c) {
  return timed("star2-morphism", "F(sigma star_2 tau) = {d^k prod D F(tau)} prod F(tau_j)", [&](SuiteResult& r) {
    const auto& sp = c.desk_spec;
    const auto T = enumerate_trees(sp, c.desk_cut, Space::T);
    const auto P = enumerate_trees(sp, c.desk_cut, Space::TPlus);
    r.note("cutoff", cut_str(c.desk_cut));
    for (const auto& [t, deg] : sp.kernels)
      for (const auto& s : P)
        for (const auto& tau : T) {
          const DiffExpr lhs = elementary_differential(sp, t, star2(s, tau));
          DiffExpr rhs = elementary_differential(sp, t, tau);
          for (const auto& br : s.branches()) rhs = derive_D(sp, rhs, br.edge);
          rhs = derive_partial(sp, rhs, s.k());
          for (const auto& br : s.branches()) rhs = rhs * elementary_differential(sp, br.edge.label, br.sub);
          r.check(lhs == rhs, [&] { return s.key() + " | " + tau.key(); });
        }
  });
}

SuiteResult suite_bseries_theorems(const VerifyContext& c, int trials) {
  return timed("bseries-theorems", "composition, substitution and root substitution by two routes", [&](SuiteResult& r) {
    const auto& sp = c.desk_spec;
    const Cutoff& cut = c.bseries_cut;
    r.note("cutoff", cut_str(cut));
    Rng rng = suite_rng(c, 9);
    size_t terms = 0;
    for (int i = 0; i < trials; ++i) {
      const auto ch = random_bseries_characters(sp, cut, rng);
      for (const auto& [t, deg] : sp.kernels) {
        const std::string tag = "set " + std::to_string(i) + " target " + t;
        const auto comp = compose_series(sp, ch.alpha, ch.beta, cut, t);
        r.check(comp.agree(), [&] { return "composition " + tag; });
        const auto subst = substitute_series(sp, ch.alpha_small, ch.sub, t);
        r.check(subst.agree(), [&] { return "substitution " + tag; });
        const auto root = root_substitute_series(sp, ch.beta, ch.sub_series, cut, t);
        r.check(root.agree(), [&] { return "root substitution " + tag; });
        const auto circ = root_substitution_circ(sp, ch.sub, t);
        r.check(circ.agree(), [&] { return "root substitution (renormalised) " + tag; });
        terms += comp.lhs.terms().size() + subst.lhs.terms().size() + root.lhs.terms().size() + circ.lhs.terms().size();
      }
    }
    r.note("character sets", std::to_string(trials));
    r.note("series terms compared", std::to_string(terms));
  });
}

SuiteResult suite_model(const VerifyContext& c) {
  return timed("numerical-model", "Pi, Pi_z, f_z factorisation and decay on a periodic grid", [&](SuiteResult& r) {
    const auto& sp = c.desk_spec;
    Model m(sp, c.model);
    Rng rng = suite_rng(c, 10);
    const GridPoint z{static_cast<int>(rng.below(c.model.nt)), static_cast<int>(rng.below(c.model.nx))};
    std::vector<GridPoint> pts;
    for (int i = 0; i < 16; ++i)
      pts.push_back({static_cast<int>(rng.below(c.model.nt)), static_cast<int>(rng.below(c.model.nx))});
    std::ostringstream zs;
    zs << "(" << z.it << "," << z.ix << ")";
    r.note("grid", std::to_string(c.model.nt) + "x" + std::to_string(c.model.nx));
    r.note("z", zs.str());

    // polynomial trees: exact up to rounding
    double poly_err = 0;
    const LinearMap id = [](const Tree& t) { return single(t); };
    for (int a = 0; a <= 2; ++a)
      for (int b = 0; b <= 3; ++b) {
        MultiIndex k(std::vector<int>{a, b});
        const Tree x = Tree::monomial(k);
        const Model::Field& p = m.pi(x);
        const Model::Field& pz = m.pi_recentred(z, x);
        const Model::Field pr = m.pi_renormalised(z, x, id);
        for (const auto& q : pts) {
          const double tq = m.t_of(q.it), xq = m.x_of(q.ix);
          const double dt = tq - m.t_of(z.it), dx = xq - m.x_of(z.ix);
          const double e1 = std::pow(tq, a) * std::pow(xq, b), e2 = std::pow(dt, a) * std::pow(dx, b);
          poly_err = std::max(poly_err, std::abs(m.at(p, q) - e1) / std::max(1.0, std::abs(e1)));
          poly_err = std::max(poly_err, std::abs(m.at(pz, q) - e2) / std::max(1.0, std::abs(e2)));
          poly_err = std::max(poly_err, std::abs(m.at(pr, q) - e2) / std::max(1.0, std::abs(e2)));
        }
        const auto f = m.check_factorisation(z, x, pts);
        poly_err = std::max(poly_err, f.max_abs_error / std::max(1.0, f.max_abs_value));
      }
    r.check(poly_err <= 1e-12, [&] { return "polynomial relative error " + std::to_string(poly_err); });
    r.note("polynomial relative error", scientific(poly_err));

    // factorisation on trees with at most two kernel edges
    double fz_err = 0;
    int fz_trees = 0;
    for (const auto& t : enumerate_trees(sp, c.desk_cut, Space::T)) {
      if (kernel_edges(t) > 2) continue;
      ++fz_trees;
      const auto f = m.check_factorisation(z, t, pts);
      fz_err = std::max(fz_err, f.max_abs_error);
      r.check(f.max_abs_error <= 1e-6, [&] { return "factorisation " + t.key() + " error " + std::to_string(f.max_abs_error); });
    }
    r.note("factorisation trees", std::to_string(fz_trees));
    r.note("factorisation max error", scientific(fz_err));

    // decay of one positive-degree planted tree with a noise leaf
    std::optional<Tree> probe;
    for (const auto& t : enumerate_trees(sp, c.desk_cut, Space::T))
      if (t.is_planted() && kernel_edges(t) == 1 && t.branches().front().edge.m.is_zero() &&
          !t.branches().front().sub.noise().empty() && degree(t, sp) > 0) {
        probe = t;
        break;
      }
    r.check(probe.has_value(), [] { return std::string("no positive-degree planted tree to probe"); });
    if (probe) {
      const double deg = degree(*probe, sp).get_d();
      const double slope = m.estimate_decay_exponent(z, *probe, {16, 8, 4, 2});
      r.check(slope >= deg - 0.2, [&] { return probe->key() + " slope " + std::to_string(slope); });
      r.note("decay tree", probe->key());
      r.note("decay degree", to_string(degree(*probe, sp)));
      r.note("decay slope", fixed(slope, 3));
    }
    const double kc = m.kernel_derivative_consistency();
    r.note("kernel derivative consistency", fixed(kc, 4));
    r.check(kc <= 0.05, [&] { return "kernel derivative consistency " + std::to_string(kc); });
  });
}

std::vector<NamedSuite> all_suites() {
  return {
      {"classical-baseline", [](const VerifyContext& c) { return suite_classical_baseline(c); }},
      {"classical-theorems", [](const VerifyContext& c) { return suite_classical_theorems(c); }},
      {"classical-cointeraction", [](const VerifyContext& c) { return suite_classical_cointeraction(c); }},
      {"grafting-identities", [](const VerifyContext& c) { return suite_grafting_identities(c); }},
      {"star2-associativity", [](const VerifyContext& c) { return suite_star2_associativity(c); }},
      {"star2-delta2-duality", [](const VerifyContext& c) { return suite_duality(c); }},
      {"decorated-cointeraction", [](const VerifyContext& c) { return suite_cointeraction(c); }},
      {"star2-morphism", [](const VerifyContext& c) { return suite_star_morphism(c); }},
      {"bseries-theorems", [](const VerifyContext& c) { return suite_bseries_theorems(c); }},
      {"numerical-model", [](const VerifyContext& c) { return suite_model(c); }},
  };
}

std::string report_json(const VerifyContext& c, const std::vector<SuiteResult>& results, bool with_timings) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["main_cutoff"] = cut_str(c.main_cut);
  j["desk_cutoff"] = cut_str(c.desk_cut);
  bool all = true;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json s;
    s["id"] = r.id;
    s["title"] = r.title;
    s["pass"] = r.pass();
    s["checked"] = r.checked;
    s["failed"] = r.failed;
    s["counterexamples"] = r.counterexamples;
    nlohmann::ordered_json d = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.details) d[k] = v;
    s["details"] = d;
    if (with_timings) s["seconds"] = r.seconds;
    all = all && r.pass();
    arr.push_back(s);
  }
  j["suites"] = arr;
  j["pass"] = all;
  return j.dump(2) + "\n";
}

std::string report_text(const std::vector<SuiteResult>& results, bool with_timings) {
  std::ostringstream o;
  for (const auto& r : results) {
    o << (r.pass() ? "PASS " : "FAIL ") << r.id << "  checked=" << r.checked << " failed=" << r.failed;
    if (with_timings) o << "  " << std::fixed << std::setprecision(2) << r.seconds << "s";
    o << "\n";
    for (const auto& [k, v] : r.details) o << "    " << k << ": " << v << "\n";
    for (const auto& ce : r.counterexamples) o << "    counterexample: " << ce << "\n";
  }
  return o.str();
}

}  // namespace rsb
