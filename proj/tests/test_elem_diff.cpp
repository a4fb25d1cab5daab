#include "rsb/diffexpr.hpp"
#include "rsb/enumerate.hpp"
#include "rsb/grafting.hpp"
#include "rsb/random.hpp"
#include "rsb/spec.hpp"

#include <doctest.h>

#include <algorithm>

using namespace rsb;

namespace {

// two kernel types, one noise, d = 1
const EquationSpec& two_types() {
  static const EquationSpec sp = parse_spec(R"({
    "dimension": 1,
    "scaling": [2, 1],
    "kernel_labels": {"t": 2, "u": 2},
    "noise_labels": {"0": 0, "x": "-3/4"},
    "dependency": [
      {"target": "t", "noise": "0", "vars": [["t", [0, 0]], ["t", [0, 1]], ["u", [0, 0]]]},
      {"target": "t", "noise": "x", "vars": [["u", [0, 0]]]},
      {"target": "u", "noise": "0", "vars": [["t", [0, 0]]], "arity": 1},
      {"target": "u", "noise": "x", "vars": []}
    ],
    "gamma": "1",
    "max_edges": 3
  })");
  return sp;
}

MultiIndex M(int a, int b) { return MultiIndex(std::vector<int>{a, b}); }
Edge E(const std::string& l, int a, int b) { return Edge{l, M(a, b)}; }
Tree T2(const std::string& s) { return parse_tree(s, 2); }

DiffExpr atom_with(const std::string& t, const std::string& l, std::vector<Edge> derivs) {
  std::sort(derivs.begin(), derivs.end());
  DiffExpr e;
  e.add(Monomial{{}, {Atom{t, l, derivs}}}, Q(1));
  return e;
}

const std::vector<Edge>& vars() {
  static const std::vector<Edge> v{E("t", 0, 0), E("t", 0, 1), E("t", 1, 0), E("t", 0, 2), E("u", 0, 0), E("u", 0, 1)};
  return v;
}

DiffExpr random_expr(Rng& rng) {
  const auto& sp = two_types();
  DiffExpr out;
  for (int term = 0; term < 3; ++term) {
    DiffExpr m = DiffExpr::constant(rng.nonzero_rational());
    for (long j = rng.range(0, 2); j > 0; --j) m = m * DiffExpr::variable(vars()[rng.below(vars().size())]);
    for (long j = rng.range(0, 2); j > 0; --j) {
      DiffExpr a = DiffExpr::atom(sp, rng.below(2) ? "t" : "u", rng.below(2) ? "" : "x");
      for (long k = rng.range(0, 1); k > 0; --k) a = derive_D(sp, a, vars()[rng.below(vars().size())]);
      m = m * a;
    }
    out += m;
  }
  return out;
}

TreeShape shape() {
  TreeShape s;
  s.kernels = {"t", "u"};
  s.max_edges = 3;
  s.max_decoration = 1;
  return s;
}

}  // namespace

TEST_CASE("D_a on variables and atoms") {
  const auto& sp = two_types();
  const Edge a = E("t", 0, 1), b = E("u", 0, 0);
  CHECK(derive_D(sp, DiffExpr::variable(a), a) == DiffExpr::constant(1));
  CHECK(derive_D(sp, DiffExpr::variable(a), b).is_zero());
  const DiffExpr F = DiffExpr::atom(sp, "t", "");
  CHECK(derive_D(sp, F, a) == atom_with("t", "", {a}));
  CHECK(derive_D(sp, F, E("t", 1, 0)).is_zero());  // outside the dependency set
  CHECK(DiffExpr::atom(sp, "u", "x") == atom_with("u", "x", {}));
  // Leibniz
  const DiffExpr zf = DiffExpr::variable(b) * F;
  CHECK(derive_D(sp, zf, b) == F + DiffExpr::variable(b) * atom_with("t", "", {b}));
  // arity 1: a second derivative vanishes
  const DiffExpr G = derive_D(sp, DiffExpr::atom(sp, "u", ""), E("t", 0, 0));
  CHECK(G == atom_with("u", "", {E("t", 0, 0)}));
  CHECK(derive_D(sp, G, E("t", 0, 0)).is_zero());
}

TEST_CASE("partial derivatives expand over the dependency set") {
  const auto& sp = two_types();
  const DiffExpr F = DiffExpr::atom(sp, "t", "");
  CHECK(derive_partial(sp, F, M(0, 0)) == F);
  DiffExpr expect;
  for (const auto& a : sp.dependency("t", "")->vars)
    expect += DiffExpr::variable(Edge{a.label, a.m + MultiIndex::unit(2, 1)}) * atom_with("t", "", {a});
  CHECK(derive_partial(sp, F, M(0, 1)) == expect);
  // d^{e_0} Z_(t,(0,1)) = Z_(t,(1,1))
  CHECK(derive_partial(sp, DiffExpr::variable(E("t", 0, 1)), M(1, 0)) == DiffExpr::variable(E("t", 1, 1)));
  // a noise with no dependencies is a constant for d
  CHECK(derive_partial(sp, DiffExpr::atom(sp, "u", "x"), M(0, 1)).is_zero());
}

TEST_CASE("derivations commute, D_a and d^{e_i} do not") {
  const auto& sp = two_types();
  Rng rng(61);
  for (int i = 0; i < 60; ++i) {
    const DiffExpr e = random_expr(rng);
    const Edge a = vars()[rng.below(vars().size())], b = vars()[rng.below(vars().size())];
    CHECK(derive_D(sp, derive_D(sp, e, a), b) == derive_D(sp, derive_D(sp, e, b), a));
    CHECK(derive_partial(sp, derive_partial(sp, e, M(1, 0)), M(0, 1)) ==
          derive_partial(sp, derive_partial(sp, e, M(0, 1)), M(1, 0)));
    CHECK(derive_partial(sp, e, M(1, 2)) == derive_partial(sp, derive_partial(sp, derive_partial(sp, e, M(0, 1)), M(1, 0)), M(0, 1)));
    for (size_t dir = 0; dir < 2; ++dir) {
      const MultiIndex ei = MultiIndex::unit(2, dir);
      const DiffExpr comm = derive_D(sp, derive_partial(sp, e, ei), a) - derive_partial(sp, derive_D(sp, e, a), ei);
      if (auto lower = a.m.minus(ei))
        CHECK(comm == derive_D(sp, e, Edge{a.label, *lower}));
      else
        CHECK(comm.is_zero());
    }
  }
}

TEST_CASE("canonical form") {
  Rng rng(62);
  for (int i = 0; i < 40; ++i) {
    const DiffExpr x = random_expr(rng), y = random_expr(rng), z = random_expr(rng);
    CHECK(x * y == y * x);
    CHECK((x + y) * z == x * z + y * z);
    CHECK((x - x).is_zero());
    CHECK((x * y) * z == x * (y * z));
  }
}

TEST_CASE("elementary differentials on small trees") {
  const auto& sp = two_types();
  CHECK(elementary_differential(sp, "t", T2("Xi[x]")) == DiffExpr::atom(sp, "t", "x"));
  CHECK(elementary_differential(sp, "t", Tree::unit(2)) == DiffExpr::atom(sp, "t", ""));
  CHECK(elementary_differential(sp, "t", T2("X^(0,2)*Xi[x]")) ==
        derive_partial(sp, DiffExpr::atom(sp, "t", "x"), M(0, 2)));
  const Edge a = E("u", 0, 0);
  CHECK(elementary_differential(sp, "t", T2("I[u,(0,0)](Xi[x])")) ==
        derive_D(sp, DiffExpr::atom(sp, "t", ""), a) * DiffExpr::atom(sp, "u", "x"));
  // the child is evaluated with the kernel label of its edge
  CHECK(elementary_differential(sp, "t", T2("Xi[x]*I[u,(0,0)](I[t,(0,0)](1))")) ==
        atom_with("t", "x", {a}) * atom_with("u", "", {E("t", 0, 0)}) * DiffExpr::atom(sp, "t", ""));
  // D_(t,(1,0)) is outside every dependency set
  CHECK(elementary_differential(sp, "t", T2("I[t,(1,0)](Xi[x])")).is_zero());
}

TEST_CASE("grafting and raising become derivatives") {
  const auto& sp = two_types();
  Rng rng(63);
  for (int i = 0; i < 80; ++i) {
    const Tree bar = random_tree(rng, shape()), sigma = random_tree(rng, shape());
    const std::string t = rng.below(2) ? "t" : "u";
    const Edge a = vars()[rng.below(vars().size())];
    CHECK(elementary_differential(sp, t, deformed_graft(bar, a, sigma)) ==
          elementary_differential(sp, a.label, bar) * derive_D(sp, elementary_differential(sp, t, sigma), a));
    const MultiIndex k = random_index(rng, 2, 2);
    CHECK(elementary_differential(sp, t, raise_tilde(sigma, k)) ==
          derive_partial(sp, elementary_differential(sp, t, sigma), k));
  }
}

TEST_CASE("F is a star_2 morphism on the phi^4 spec") {
  const auto sp = load_spec(RSB_SPEC_DIR "/phi4.json");
  const auto T = enumerate_trees(sp, Cutoff{Q(0), 3}, Space::T);
  const auto P = enumerate_trees(sp, Cutoff{Q(1), 3}, Space::TPlus);
  int checked = 0;
  for (const auto& s : P)
    for (const auto& tau : T) {
      if (s.edges() + tau.edges() > 4) continue;
      DiffExpr rhs = elementary_differential(sp, "t", tau);
      for (const auto& br : s.branches()) rhs = derive_D(sp, rhs, br.edge);
      rhs = derive_partial(sp, rhs, s.k());
      for (const auto& br : s.branches()) rhs = rhs * elementary_differential(sp, br.edge.label, br.sub);
      CHECK_MESSAGE(elementary_differential(sp, "t", star2(s, tau)) == rhs, s.key() << " | " << tau.key());
      ++checked;
    }
  CHECK(checked > 30);
}
