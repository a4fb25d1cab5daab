#include "rsb/enumerate.hpp"
#include "rsb/errors.hpp"
#include "rsb/random.hpp"
#include "rsb/spec.hpp"
#include "rsb/tree.hpp"

#include <doctest.h>

#include <functional>
#include <set>

using namespace rsb;

namespace {

EquationSpec phi4() { return load_spec(RSB_SPEC_DIR "/phi4.json"); }
EquationSpec desk() { return load_spec(RSB_SPEC_DIR "/desk.json"); }

Tree T2(const std::string& s) { return parse_tree(s, 2); }

// Flattened tree for the automorphism oracle.
struct FlatNode {
  int parent;
  std::string edge;  // label and derivative of the edge to the parent
  std::string deco;  // node monomial and noise
  Z kfact;
};

void flatten(const Tree& t, int parent, const std::string& edge, std::vector<FlatNode>& out) {
  const int me = static_cast<int>(out.size());
  out.push_back({parent, edge, t.k().str() + "|" + t.noise(), t.k().factorial()});
  for (const auto& b : t.branches()) flatten(b.sub, me, b.edge.str(), out);
}

// Number of root-fixing bijections of the nodes preserving parents and all
// decorations, times the node factorials k!.
Z automorphism_symmetry(const Tree& t) {
  std::vector<FlatNode> n;
  flatten(t, -1, "", n);
  std::vector<int> image(n.size(), -1);
  std::vector<bool> used(n.size(), false);
  image[0] = 0;
  used[0] = true;
  Z count = 0;
  std::function<void(size_t)> rec = [&](size_t v) {
    if (v == n.size()) {
      ++count;
      return;
    }
    for (size_t w = 1; w < n.size(); ++w) {
      if (used[w] || n[w].parent != image[n[v].parent] || n[w].edge != n[v].edge || n[w].deco != n[v].deco) continue;
      used[w] = true;
      image[v] = static_cast<int>(w);
      rec(v + 1);
      used[w] = false;
    }
  };
  rec(1);  // parents precede children in the flattening
  Z kf = 1;
  for (const auto& x : n) kf *= x.kfact;
  return count * kf;
}

// All k with sum s_i k_i <= budget, written out independently of the library.
void scaled_indices(const std::vector<Q>& s, const Q& budget, size_t i, std::vector<int>& cur,
                    std::vector<MultiIndex>& out) {
  if (i == s.size()) {
    out.emplace_back(cur);
    return;
  }
  for (int k = 0; Q(k) * s[i] <= budget; ++k) {
    cur[i] = k;
    scaled_indices(s, budget - Q(k) * s[i], i + 1, cur, out);
  }
  cur[i] = 0;
}

// Undecorated shapes hanging below kernel type t with at most e edges; no
// degree pruning at all.
std::vector<Tree> brute_shapes(const EquationSpec& sp, const std::string& t, int e) {
  std::vector<Tree> out;
  for (const auto& [key, dep] : sp.deps) {
    if (key.first != t) continue;
    const int left = e - (key.second.empty() ? 0 : 1);
    if (left < 0) continue;
    std::vector<Tree::Branch> opts;
    for (const auto& a : dep.vars)
      for (const auto& sub : brute_shapes(sp, a.label, left - 1)) opts.push_back({a, sub});
    const int slots = dep.arity ? *dep.arity : left;
    std::vector<Tree::Branch> chosen;
    std::function<void(size_t, int)> rec = [&](size_t from, int used) {
      out.push_back(Tree::make(MultiIndex(sp.dim()), key.second, chosen));
      if (static_cast<int>(chosen.size()) == slots) return;
      for (size_t i = from; i < opts.size(); ++i) {
        const int cost = 1 + opts[i].sub.edges();
        if (used + cost > left) continue;
        chosen.push_back(opts[i]);
        rec(i, used + cost);
        chosen.pop_back();
      }
    };
    rec(0, 0);
  }
  return out;
}

// Every way of adding node monomials of total scaled size <= budget.
std::vector<std::pair<Tree, Q>> decorate(const Tree& t, const std::vector<Q>& s, const Q& budget) {
  std::vector<std::pair<Tree, Q>> out;
  std::vector<MultiIndex> ks;
  std::vector<int> cur(s.size(), 0);
  scaled_indices(s, budget, 0, cur, ks);
  for (const auto& k : ks) {
    std::vector<std::pair<std::vector<Tree::Branch>, Q>> partial{{{}, k.scaled(s)}};
    for (const auto& b : t.branches()) {
      std::vector<std::pair<std::vector<Tree::Branch>, Q>> next;
      for (const auto& [br, spent] : partial)
        for (const auto& [sub, used] : decorate(b.sub, s, budget - spent)) {
          auto nb = br;
          nb.push_back({b.edge, sub});
          next.emplace_back(std::move(nb), spent + used);
        }
      partial = std::move(next);
    }
    for (const auto& [br, spent] : partial) out.emplace_back(Tree::make(k, t.noise(), br), spent);
  }
  return out;
}

std::set<Tree> brute_enumeration(const EquationSpec& sp, const Q& gamma, int max_edges) {
  std::set<Tree> out;
  for (const auto& [t, deg] : sp.kernels)
    for (const auto& shape : brute_shapes(sp, t, max_edges)) {
      const Q d0 = degree(shape, sp);
      if (d0 > gamma) continue;
      for (const auto& [tree, used] : decorate(shape, sp.s, gamma - d0)) out.insert(tree);
    }
  return out;
}

}  // namespace

TEST_CASE("canonical form ignores branch order") {
  const Tree a = T2("I[t,(0,0)](Xi[x])*I[t,(0,1)](1)");
  const Tree b = T2("I[t,(0,1)](1)*I[t,(0,0)](Xi[x])");
  CHECK(a == b);
  CHECK(a.key() == b.key());
  CHECK(!(T2("I[t,(0,0)](Xi[x])") == T2("I[t,(0,1)](Xi[x])")));
  CHECK(!(T2("X^(1,0)") == T2("X^(0,1)")));
}

TEST_CASE("X^0 Xi_0 is the unit tree") {
  CHECK(T2("X^(0,0)*Xi[0]") == Tree::unit(2));
  CHECK(T2("1").is_unit());
}

TEST_CASE("parsing the canonical encoding is idempotent on random trees") {
  Rng rng(7);
  TreeShape shape;
  shape.kernels = {"t", "u"};
  shape.noises = {"x", "y"};
  for (int i = 0; i < 100; ++i) {
    const Tree t = random_tree(rng, shape);
    const Tree once = parse_tree(t.key(), 2);
    CHECK(once == t);
    CHECK(parse_tree(once.key(), 2).key() == once.key());
  }
}

TEST_CASE("malformed trees are rejected") {
  CHECK_THROWS_AS(T2("Xi[x]*Xi[y]"), InvalidTree);
  CHECK_THROWS_AS(T2("I[t,(0)](1)"), InvalidTree);
  CHECK_THROWS_AS(T2("I[t,(0,0)](1"), InvalidTree);
}

TEST_CASE("tree product") {
  CHECK(tree_product(T2("X^(1,2)"), T2("X^(3,0)")) == T2("X^(4,2)"));
  CHECK(tree_product(T2("Xi[x]"), T2("I[t,(0,0)](1)")).key() == "Xi[x]*I[t,(0,0)](1)");
  CHECK_THROWS_AS(tree_product(T2("Xi[x]"), T2("Xi[y]")), NoiseClash);
  Rng rng(11);
  TreeShape shape;
  for (int i = 0; i < 50; ++i) {
    const Tree a = random_tree(rng, shape).without_root_noise();
    const Tree b = random_tree(rng, shape);
    const Tree c = random_tree(rng, shape).without_root_noise();
    CHECK(tree_product(a, b) == tree_product(b, a));
    CHECK(tree_product(tree_product(a, b), c) == tree_product(a, tree_product(b, c)));
    CHECK(tree_product(a, Tree::unit(2)) == a);
  }
}

TEST_CASE("symmetry factor") {
  CHECK(T2("X^(2,3)*Xi[x]").symmetry() == 12);
  CHECK(T2("I[t,(0,0)](1)*I[t,(0,0)](1)").symmetry() == 2);
  CHECK(Tree::unit(2).symmetry() == 1);
  CHECK(T2("I[t,(0,0)](I[t,(0,0)](1)*I[t,(0,0)](1))*I[t,(0,0)](I[t,(0,0)](1)*I[t,(0,0)](1))").symmetry() == 8);
}

TEST_CASE("symmetry factor matches automorphism counting on every tree with <= 6 edges") {
  const auto sp = desk();
  const auto trees = enumerate_trees(sp, Cutoff{Q(7, 2), 6}, Space::T);
  REQUIRE(trees.size() > 200);
  for (const auto& t : trees) CHECK_MESSAGE(t.symmetry() == automorphism_symmetry(t), t.key());
  Rng rng(3);
  TreeShape shape;
  shape.max_edges = 6;
  shape.kernels = {"t"};
  shape.max_decoration = 1;
  for (int i = 0; i < 300; ++i) {
    const Tree t = random_tree(rng, shape);
    CHECK_MESSAGE(t.symmetry() == automorphism_symmetry(t), t.key());
  }
}

TEST_CASE("inner product") {
  const Tree t = T2("I[t,(0,0)](1)*I[t,(0,0)](1)");
  const Tree s = T2("I[t,(0,0)](1)");
  CHECK(inner_product(single(t), single(t)) == 2);
  CHECK(inner_product(single(t), single(s)) == 0);
  CHECK(inner_product(single(s, 2), single(s, 3)) == Q(6) * Q(s.symmetry()));
  Comb u = single(t, Q(1, 2));
  add_term(u, s, Q(-3));
  Comb v = single(t, 4);
  add_term(v, s, Q(5));
  CHECK(inner_product(u, v) == inner_product(v, u));
}

TEST_CASE("degree") {
  const auto sp = desk();
  CHECK(degree(Tree::unit(2), sp) == 0);
  CHECK(degree(T2("X^(1,0)"), sp) == 2);
  CHECK(degree(T2("X^(0,1)"), sp) == 1);
  CHECK(degree(T2("I[t,(0,0)](Xi[x])"), sp) == Q(2) + Q(-3, 4));
  CHECK(degree(T2("I[t,(0,1)](Xi[x])"), sp) == Q(2) - 1 + Q(-3, 4));
  CHECK_THROWS_AS(degree(T2("Xi[zz]"), sp), UnknownLabel);
  Rng rng(5);
  TreeShape shape;
  for (int i = 0; i < 50; ++i) {
    const Tree a = random_tree(rng, shape).without_root_noise(), b = random_tree(rng, shape);
    CHECK(degree(tree_product(a, b), sp) == degree(a, sp) + degree(b, sp));
  }
}

TEST_CASE("projection by degree") {
  const auto sp = desk();
  const Tree lo = T2("Xi[x]"), hi = T2("X^(1,0)");
  Comb u = single(lo);
  add_term(u, hi, Q(2));
  CHECK(project_leq_degree(u, Q(0), sp) == single(lo));
  CHECK(project_leq_degree(u, Q(1000), sp) == u);
  const auto all = enumerate_trees(sp, Cutoff{Q(3, 2), 4}, Space::T);
  Comb sum;
  for (const auto& t : all) add_term(sum, t, Q(1));
  CHECK(project_leq_degree(sum, Q(1, 2), sp).size() == enumerate_trees(sp, Cutoff{Q(1, 2), 4}, Space::T).size());
}

TEST_CASE("enumeration matches a brute-force generator") {
  const auto sp = phi4();
  const auto fast = enumerate_trees(sp, Cutoff{Q(0), std::nullopt}, Space::T);
  const std::set<Tree> fast_set(fast.begin(), fast.end());
  const auto brute = brute_enumeration(sp, Q(0), 12);
  for (const auto& t : fast_set)
    if (!brute.count(t)) MESSAGE("only fast: " << t.key());
  for (const auto& t : brute)
    if (!fast_set.count(t)) MESSAGE("only brute: " << t.key());
  CHECK(fast_set == brute);
  CHECK(fast.size() == 30);  // frozen from the brute-force generator

  const auto d = desk();
  const auto fd = enumerate_trees(d, Cutoff{Q(3, 2), 4}, Space::T);
  std::set<Tree> fd_set(fd.begin(), fd.end());
  std::set<Tree> bd;
  for (const auto& t : brute_enumeration(d, Q(3, 2), 4)) bd.insert(t);
  CHECK(fd_set == bd);
}

TEST_CASE("enumeration is monotone in gamma and sorted by degree") {
  const auto sp = phi4();
  const auto small = enumerate_trees(sp, Cutoff{Q(-1), 4}, Space::T);
  const auto large = enumerate_trees(sp, Cutoff{Q(1), 4}, Space::T);
  const std::set<Tree> ls(large.begin(), large.end());
  for (const auto& t : small) CHECK(ls.count(t) == 1);
  for (size_t i = 1; i < large.size(); ++i) CHECK(degree(large[i - 1], sp) <= degree(large[i], sp));
  for (const auto& t : enumerate_trees(sp, Cutoff{Q(1), 4}, Space::TPlus)) CHECK(t.noise().empty());
}

TEST_CASE("below every tree degree only the unit remains") {
  const auto sp = desk();
  const auto none = enumerate_trees(sp, Cutoff{Q(-1), 4}, Space::T);
  CHECK(none.empty());
  const auto unit_only = enumerate_trees(sp, Cutoff{Q(-3, 4) - Q(1, 100), 4}, Space::TPlus);
  CHECK(unit_only.empty());
  const auto zero = enumerate_trees(sp, Cutoff{Q(0), 0}, Space::TPlus);
  REQUIRE(zero.size() == 1);
  CHECK(zero.front().is_unit());
}

TEST_CASE("supercritical specs are rejected") {
  auto sp = desk();
  sp.noises["x"] = Q(-5, 2);
  sp.deps[{"t", ""}].arity.reset();
  CHECK_THROWS_AS(enumerate_trees(sp, Cutoff{Q(0), std::nullopt}, Space::T), NotSubcritical);
}

TEST_CASE("spec files") {
  const auto sp = phi4();
  CHECK(sp.d == 3);
  CHECK(sp.s == std::vector<Q>{2, 1, 1, 1});
  CHECK(sp.noise_degree("xi") == Q(-5, 2) - Q(1, 100));
  CHECK(parse_spec(spec_to_json(sp)).deps.size() == sp.deps.size());
  CHECK_THROWS_AS(parse_spec("{\"dimension\": 1}"), SpecError);
}
