#include "rsb/bseries.hpp"

#include "rsb/errors.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace rsb {

Q linear_value(const BMinus& a, const Tree& t) {
  auto it = a.find(t);
  return it == a.end() ? Q(0) : it->second;
}

Q TPlusChar::monomial(const MultiIndex& k) const {
  Q r = 1;
  for (size_t i = 0; i < k.dim(); ++i) {
    if (k[i] == 0) continue;
    const Q xi = i < x.size() ? x[i] : Q(0);
    Q p = 1;
    for (int j = 0; j < k[i]; ++j) p *= xi;
    r *= p;
  }
  return r;
}

Q TPlusChar::value(const Tree& sigma) const {
  if (!sigma.noise().empty()) throw MalformedLeft("T_+ character evaluated on " + sigma.key());
  Q r = monomial(sigma.k());
  for (const auto& br : sigma.branches()) {
    if (is_zero(r)) return r;
    auto it = planted.find(Tree::planted(br.edge, br.sub));
    r *= it == planted.end() ? Q(0) : it->second;
  }
  return r;
}

namespace {

struct PlantedEntry {
  Tree tree;
  Q deg;
  int edges;
};

std::vector<PlantedEntry> planted_support(const EquationSpec& spec, const TreeChar& planted) {
  std::vector<PlantedEntry> out;
  for (const auto& [p, v] : planted) {
    if (is_zero(v)) continue;
    if (!p.is_planted()) throw MalformedLeft("expected a planted tree, got " + p.key());
    out.push_back({p, degree(p, spec), p.edges()});
  }
  // Ascending degree: once a positive-degree piece overshoots, so do all later ones.
  std::stable_sort(out.begin(), out.end(), [](const PlantedEntry& a, const PlantedEntry& b) { return a.deg < b.deg; });
  return out;
}

bool edges_ok(int edges, const Cutoff& c) { return !c.max_edges || edges <= *c.max_edges; }

// Lower bound for the total degree of any admissible product of planted pieces.
Q degree_floor(const std::vector<PlantedEntry>& supp, const Cutoff& c) {
  Q worst = 0;
  for (const auto& p : supp) {
    if (p.deg > 0) continue;
    if (!c.max_edges)
      throw NotSubcritical("planted tree of non-positive degree without an edge cutoff: " + p.tree.key());
    const Q per_edge = p.deg / Q(p.edges);
    if (per_edge < worst) worst = per_edge;
  }
  return worst * Q(std::max(0, c.max_edges.value_or(0)));
}

bool within(const Q& deg, int edges, const Cutoff& c) {
  return deg <= c.gamma && (!c.max_edges || edges <= *c.max_edges);
}

// d^k D_{a_1} ... D_{a_n} e for the root decoration of tau.
DiffExpr root_operator(const EquationSpec& spec, DiffExpr e, const Tree& tau) {
  for (const auto& br : tau.branches()) {
    if (e.is_zero()) return e;
    e = derive_D(spec, e, br.edge);
  }
  return derive_partial(spec, e, tau.k());
}

std::set<Edge> variables_of(const EquationSpec& spec, const DiffExpr& e) {
  std::set<Edge> out;
  for (const auto& [m, c] : e.terms()) {
    for (const auto& [a, p] : m.z) out.insert(a);
    for (const auto& at : m.atoms)
      if (const Dependency* dep = spec.dependency(at.t, at.l))
        out.insert(dep->vars.begin(), dep->vars.end());
  }
  return out;
}

}  // namespace

std::vector<Tree> tplus_monomials(const EquationSpec& spec, const TPlusChar& beta, const Cutoff& budget) {
  const auto supp = planted_support(spec, beta.planted);
  degree_floor(supp, budget);
  const size_t dim = spec.dim();
  std::vector<Tree> out;
  std::vector<Tree::Branch> chosen;
  std::function<void(size_t, const Q&, int)> rec = [&](size_t from, const Q& deg, int edges) {
    for (const auto& k : indices_with_scaled_at_most(dim, spec.s, budget.gamma - deg))
      out.push_back(Tree::make(k, "", chosen));
    for (size_t i = from; i < supp.size(); ++i) {
      const Q nd = deg + supp[i].deg;
      const int ne = edges + supp[i].edges;
      if (supp[i].deg > 0 && nd > budget.gamma) break;
      if (!edges_ok(ne, budget)) continue;
      chosen.push_back(supp[i].tree.branches().front());
      rec(i, nd, ne);
      chosen.pop_back();
    }
  };
  rec(0, Q(0), 0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DiffExpr eval_bminus(const EquationSpec& spec, const BMinus& alpha, const std::string& t) {
  DiffExpr r;
  for (const auto& [tau, a] : alpha)
    if (!is_zero(a)) r += elementary_differential(spec, t, tau) * (a / Q(tau.symmetry()));
  return r;
}

DiffExpr eval_bplus(const EquationSpec& spec, const TPlusChar& beta, const Edge& a, const Q& poly_gamma) {
  DiffExpr r;
  for (const auto& k : indices_with_scaled_at_most(spec.dim(), spec.s, poly_gamma)) {
    const Q c = beta.monomial(k) / Q(k.factorial());
    if (!is_zero(c)) r += DiffExpr::variable(Edge{a.label, a.m + k}) * c;
  }
  for (const auto& [p, v] : beta.planted) {
    if (is_zero(v) || !p.is_planted() || !(p.branches().front().edge == a)) continue;
    const Tree& sub = p.branches().front().sub;
    r += elementary_differential(spec, a.label, sub) * (v / Q(sub.symmetry()));
  }
  return r;
}

FunctionComposition compose_with_function(const EquationSpec& spec, const DiffExpr& f, const TPlusChar& beta,
                                          const Cutoff& cut, const Q& base_degree, int base_edges) {
  Cutoff budget{cut.gamma - base_degree, cut.max_edges ? std::optional<int>(*cut.max_edges - base_edges)
                                                       : std::nullopt};
  FunctionComposition out;
  if (budget.max_edges && *budget.max_edges < 0) return out;

  struct Piece {
    Edge a;
    DiffExpr value;
    Q deg;
    int edges;
  };
  std::vector<Piece> pieces;
  const auto planted = planted_support(spec, beta.planted);
  const Q poly_cap = budget.gamma - degree_floor(planted, budget);
  for (const Edge& a : variables_of(spec, f)) {
    for (const auto& k : indices_with_scaled_at_most(spec.dim(), spec.s, poly_cap)) {
      if (k.is_zero()) continue;
      const Q c = beta.monomial(k) / Q(k.factorial());
      if (!is_zero(c)) pieces.push_back({a, DiffExpr::variable(Edge{a.label, a.m + k}) * c, k.scaled(spec.s), 0});
    }
    for (const auto& p : planted) {
      const auto& br = p.tree.branches().front();
      if (!(br.edge == a) || !edges_ok(p.edges, budget)) continue;
      const Q c = beta.planted.at(p.tree) / Q(br.sub.symmetry());
      pieces.push_back({a, elementary_differential(spec, a.label, br.sub) * c, p.deg, p.edges});
    }
  }

  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.deg < b.deg; });

  // Multisets of pieces: prod value_i^{c_i}/c_i! prod D_{a_i}^{c_i} f.
  constexpr int kMaxPieces = 64;
  std::function<void(size_t, const DiffExpr&, const DiffExpr&, const Q&, int, int)> rec =
      [&](size_t i, const DiffExpr& g, const DiffExpr& weight, const Q& deg, int edges, int count) {
        if (g.is_zero() || weight.is_zero()) return;
        if (i == pieces.size()) {
          if (within(deg, edges, budget)) out.faa_di_bruno += weight * g;
          return;
        }
        rec(i + 1, g, weight, deg, edges, count);
        DiffExpr gi = g, wi = weight;
        Q di = deg;
        int ei = edges;
        for (int c = 1;; ++c) {
          di += pieces[i].deg;
          ei += pieces[i].edges;
          if (!edges_ok(ei, budget) || (pieces[i].deg > 0 && di > budget.gamma)) break;
          if (count + c > kMaxPieces) throw NotSubcritical("composition does not truncate");
          gi = derive_D(spec, gi, pieces[i].a);
          wi = wi * pieces[i].value * (Q(1) / Q(c));
          if (gi.is_zero()) break;
          rec(i + 1, gi, wi, di, ei, count + c);
        }
      };
  rec(0, f, DiffExpr::constant(1), Q(0), 0, 0);

  for (const Tree& sigma : tplus_monomials(spec, beta, budget)) {
    const Q b = beta.value(sigma);
    if (is_zero(b)) continue;
    out.coefficients.emplace_back(sigma, b);
    DiffExpr term = root_operator(spec, f, sigma);
    for (const auto& br : sigma.branches()) {
      if (term.is_zero()) break;
      term = term * elementary_differential(spec, br.edge.label, br.sub);
    }
    out.bminus_form += term * (b / Q(sigma.symmetry()));
  }
  return out;
}

bool SeriesComparison::agree() const {
  if (!(lhs == rhs)) return false;
  for (const auto& o : others)
    if (!(o == lhs)) return false;
  return true;
}

BMinus star2_convolution(const EquationSpec& spec, const BMinus& alpha, const TPlusChar& beta, const Cutoff& cut) {
  Comb acc;
  for (const auto& [tau, a] : alpha) {
    if (is_zero(a)) continue;
    const Q dt = degree(tau, spec);
    Cutoff budget{cut.gamma - dt, cut.max_edges ? std::optional<int>(*cut.max_edges - tau.edges()) : std::nullopt};
    if (budget.max_edges && *budget.max_edges < 0) continue;
    for (const Tree& sigma : tplus_monomials(spec, beta, budget)) {
      const Q b = beta.value(sigma);
      if (is_zero(b)) continue;
      add_scaled(acc, star2(sigma, tau), a * b / Q(tau.symmetry() * sigma.symmetry()));
    }
  }
  BMinus out;
  for (const auto& [t, c] : acc) out[t] = c * Q(t.symmetry());
  return out;
}

SeriesComparison compose_series(const EquationSpec& spec, const BMinus& alpha, const TPlusChar& beta,
                                const Cutoff& cut, const std::string& t) {
  SeriesComparison r;
  r.target = t;
  DiffExpr bform;
  for (const auto& [tau, a] : alpha) {
    if (is_zero(a)) continue;
    auto fc = compose_with_function(spec, elementary_differential(spec, t, tau), beta, cut, degree(tau, spec),
                                    tau.edges());
    const Q w = a / Q(tau.symmetry());
    r.lhs += fc.faa_di_bruno * w;
    bform += fc.bminus_form * w;
  }
  r.rhs = eval_bminus(spec, star2_convolution(spec, alpha, beta, cut), t);
  r.others.push_back(bform);
  return r;
}

namespace {

using ChildFn = std::function<DiffExpr(const std::string&, const Tree&)>;

// Root-substituted differential: the root's F^l_t is kept for l != 0 and
// replaced by sum_{tau'} beta(tau')/S(tau') F_t(tau') for l = 0; children go
// through `child`.
DiffExpr root_substituted(const EquationSpec& spec, const TreeChar& beta, const std::string& t, const Tree& tau,
                          const ChildFn& child, int unit_copies) {
  DiffExpr base;
  if (!tau.noise().empty()) {
    base = DiffExpr::atom(spec, t, tau.noise());
  } else {
    base = DiffExpr::atom(spec, t, "") * Q(unit_copies);
    for (const auto& [tp, b] : beta)
      if (!tp.is_unit() && !is_zero(b)) base += elementary_differential(spec, t, tp) * (b / Q(tp.symmetry()));
  }
  DiffExpr r = root_operator(spec, base, tau);
  for (const auto& br : tau.branches()) {
    if (r.is_zero()) break;
    r = r * child(br.edge.label, br.sub);
  }
  return r;
}

}  // namespace

DiffExpr hat_F(const EquationSpec& spec, const TreeChar& beta, const std::string& t, const Tree& tau,
               const SubstitutionOptions& o) {
  const int copies = o.extra_unit_term ? 2 : 1;
  ChildFn child = [&](const std::string& tc, const Tree& sub) { return hat_F(spec, beta, tc, sub, o); };
  return root_substituted(spec, beta, t, tau, child, copies);
}

SeriesComparison substitute_series(const EquationSpec& spec, const BMinus& alpha, const TreeChar& beta,
                                   const std::string& t, const SubstitutionOptions& o) {
  SeriesComparison r;
  r.target = t;
  DiffExpr rec;
  MStarOptions mo{o.extra_unit_term};
  for (const auto& [tau, a] : alpha) {
    if (is_zero(a)) continue;
    const Q w = a / Q(tau.symmetry());
    r.lhs += hat_F(spec, beta, t, tau, o) * w;
    r.rhs += elementary_differential(spec, t, mstar_star1(beta, tau)) * w;
    rec += elementary_differential(spec, t, mstar_recursive(beta, tau, mo)) * w;
  }
  r.others.push_back(rec);
  return r;
}

SeriesComparison root_substitute_series(const EquationSpec& spec, const TPlusChar& alpha, const BMinus& beta,
                                        const Cutoff& cut, const std::string& t) {
  SeriesComparison r;
  r.target = t;
  Q min_deg = 0;
  int min_edges = 0;
  bool first = true;
  for (const auto& [tp, b] : beta) {
    if (is_zero(b)) continue;
    const Q dg = degree(tp, spec);
    if (first || dg < min_deg) min_deg = dg;
    if (first || tp.edges() < min_edges) min_edges = tp.edges();
    first = false;
  }
  Cutoff outer{cut.gamma - min_deg, cut.max_edges ? std::optional<int>(*cut.max_edges - min_edges) : std::nullopt};
  for (const Tree& sigma : tplus_monomials(spec, alpha, outer)) {
    const Q a = alpha.value(sigma);
    if (is_zero(a)) continue;
    const Q ds = degree(sigma, spec);
    DiffExpr children = DiffExpr::constant(1);
    for (const auto& br : sigma.branches()) children = children * elementary_differential(spec, br.edge.label, br.sub);
    for (const auto& [tp, b] : beta) {
      if (is_zero(b) || !within(ds + degree(tp, spec), sigma.edges() + tp.edges(), cut)) continue;
      DiffExpr term = root_operator(spec, elementary_differential(spec, t, tp), sigma) * children;
      r.lhs += term * (a * b / Q(sigma.symmetry() * tp.symmetry()));
    }
  }
  SeriesComparison comp = compose_series(spec, beta, alpha, cut, t);
  r.rhs = comp.lhs;
  r.others.push_back(comp.rhs);
  for (auto& o : comp.others) r.others.push_back(o);
  return r;
}

SeriesComparison root_substitution_circ(const EquationSpec& spec, const TreeChar& beta, const std::string& t) {
  SeriesComparison r;
  r.target = t;
  // F_circ(tau) = prod hat-F(tau_i) d^k prod D F(Xi_l); its root substitution
  // swaps F(Xi_0) for the beta-weighted sum.
  ChildFn child = [&](const std::string& tc, const Tree& sub) { return hat_F(spec, beta, tc, sub); };
  for (const auto& [tau, b] : beta) {
    if (is_zero(b)) continue;
    const Q w = b / Q(tau.symmetry());
    r.lhs += root_substituted(spec, beta, t, tau, child, 1) * w;
    r.rhs += elementary_differential(spec, t, mstar_star1(beta, tau)) * w;
  }
  return r;
}

}  // namespace rsb
