#include "rsb/coalgebra.hpp"

#include "rsb/errors.hpp"

#include <functional>

namespace rsb {

Q char_value(const TreeChar& c, const Tree& t) {
  if (t.is_unit()) return 1;
  auto it = c.find(t);
  return it == c.end() ? Q(0) : it->second;
}

Q char_value(const TreeChar& c, const Forest& f) {
  Q r = 1;
  for (const auto& t : f.trees()) {
    r *= char_value(c, t);
    if (is_zero(r)) break;
  }
  return r;
}

namespace {

Q poly_content(const Tree& t, const std::vector<Q>& s) {
  Q r = t.k().scaled(s);
  for (const auto& b : t.branches()) r += b.edge.m.scaled(s) + poly_content(b.sub, s);
  return r;
}

SplitComb split_product(const SplitComb& a, const SplitComb& b) {
  SplitComb r;
  for (const auto& [x, cx] : a)
    for (const auto& [y, cy] : b)
      add_term(r, std::make_pair(tree_product(x.first, y.first), tree_product(x.second, y.second)), cx * cy);
  return r;
}

ForestSplitComb fsplit_product(const ForestSplitComb& a, const ForestSplitComb& b) {
  ForestSplitComb r;
  for (const auto& [x, cx] : a)
    for (const auto& [y, cy] : b)
      add_term(r, std::make_pair(x.first * y.first, tree_product(x.second, y.second)), cx * cy);
  return r;
}

// All Xi_0 nodes (root included when it carries no noise).
int xi0_nodes(const Tree& t) {
  int n = t.noise().empty() ? 1 : 0;
  for (const auto& b : t.branches()) n += xi0_nodes(b.sub);
  return n;
}

// Trees X^k Xi_l prod_i I_{a_i}(c_i) for every choice of one term per c_i.
void expand_node(const Tree& shape, const std::string& noise, const std::vector<Comb>& kids, const Q& w,
                 Comb& out) {
  std::vector<Tree::Branch> br;
  std::function<void(size_t, const Q&)> rec = [&](size_t j, const Q& c) {
    if (j == kids.size()) {
      add_term(out, Tree::make(shape.k(), noise, br), c);
      return;
    }
    for (const auto& [sub, v] : kids[j]) {
      br.push_back({shape.branches()[j].edge, sub});
      rec(j + 1, c * v);
      br.pop_back();
    }
  };
  rec(0, w);
}

// Calls f for every map from `count` labelled items to `slots` slots.
void for_each_map(size_t count, size_t slots, const std::function<void(const std::vector<size_t>&)>& f) {
  if (count > 0 && slots == 0) return;
  std::vector<size_t> g(count, 0);
  while (true) {
    f(g);
    size_t i = 0;
    while (i < count && ++g[i] == slots) g[i++] = 0;
    if (i == count) return;
  }
}

}  // namespace

Q support_cap(const std::vector<Tree>& trees, const EquationSpec& spec) {
  Q cap = 0;
  for (const auto& t : trees) cap = std::max(cap, poly_content(t, spec.s));
  return cap;
}

SplitComb delta2(const Tree& t, const std::vector<Q>& s, const Q& cap, bool hat) {
  const size_t dim = t.dim();
  SplitComb res;
  for (const auto& j : indices_below(t.k()))
    add_term(res, std::make_pair(Tree::monomial(j), Tree::monomial(*t.k().minus(j))), Q(t.k().binomial(j)));
  if (!t.noise().empty()) {
    SplitComb nz;
    Tree xi = Tree::noise(dim, t.noise());
    add_term(nz, std::make_pair(Tree::unit(dim), xi), 1);
    if (hat) add_term(nz, std::make_pair(xi, Tree::unit(dim)), 1);
    res = split_product(res, nz);
  }
  const auto ells = indices_with_scaled_at_most(dim, s, cap);
  for (const auto& b : t.branches()) {
    SplitComb piece;
    for (const auto& [lr, c] : delta2(b.sub, s, cap, hat))
      add_term(piece, std::make_pair(lr.first, Tree::planted(b.edge, lr.second)), c);
    for (const auto& l : ells)
      add_term(piece, std::make_pair(Tree::planted({b.edge.label, b.edge.m + l}, b.sub), Tree::monomial(l)),
               Q(1, 1) / Q(l.factorial()));
    res = split_product(res, piece);
  }
  return res;
}

ForestSplitComb delta_circ(const Tree& t, const std::vector<Q>& s, const Q& cap, Delta1Variant v) {
  ForestSplitComb res;
  add_term(res, std::make_pair(Forest(), Tree::make(t.k(), t.noise(), {})), 1);
  for (const auto& b : t.branches()) {
    ForestSplitComb piece;
    for (const auto& [ft, c] : delta1(b.sub, s, cap, v))
      add_term(piece, std::make_pair(ft.first, Tree::planted(b.edge, ft.second)), c);
    res = fsplit_product(res, piece);
  }
  return res;
}

ForestSplitComb delta1(const Tree& t, const std::vector<Q>& s, const Q& cap, Delta1Variant v) {
  SplitComb d;
  if (v == Delta1Variant::LiteralHat) {
    d = delta2(t, s, cap, true);
  } else {
    d = delta2(t, s, cap, false);
    if (!t.noise().empty()) add_term(d, std::make_pair(t, Tree::unit(t.dim())), 1);
  }
  ForestSplitComb res;
  for (const auto& [lr, c] : d)
    for (const auto& [ft, c2] : delta_circ(lr.first, s, cap, v))
      add_term(res, std::make_pair(ft.first * Forest::single(lr.second), ft.second), c * c2);
  return res;
}

std::map<std::pair<Forest, Forest>, Q> delta1(const Forest& f, const std::vector<Q>& s, const Q& cap,
                                              Delta1Variant v) {
  std::map<std::pair<Forest, Forest>, Q> res;
  add_term(res, std::make_pair(Forest(), Forest()), 1);
  for (const auto& t : f.trees()) {
    std::map<std::pair<Forest, Forest>, Q> next;
    for (const auto& [x, cx] : res)
      for (const auto& [y, cy] : delta1(t, s, cap, v))
        add_term(next, std::make_pair(x.first * y.first, x.second * Forest::single(y.second)), cx * cy);
    res = std::move(next);
  }
  return res;
}

Comb star1(const Forest& sigma, const Tree& tau) {
  if (sigma.empty()) return single(tau);
  const auto& sg = sigma.trees();
  const size_t m = sg.size();
  const size_t n = tau.branches().size();
  Comb out;

  auto build = [&](const std::vector<size_t>& idx, const std::vector<size_t>& slot, const std::string& noise,
                   Comb& into) {
    std::vector<std::vector<Tree>> groups(n);
    for (size_t r = 0; r < idx.size(); ++r) groups[slot[r]].push_back(sg[idx[r]]);
    std::vector<Comb> kids(n);
    for (size_t i = 0; i < n; ++i) {
      kids[i] = star1(Forest(groups[i]), tau.branches()[i].sub);
      if (kids[i].empty()) return;
    }
    expand_node(tau, noise, kids, 1, into);
  };

  if (tau.noise().empty()) {
    for (size_t j = 0; j < m; ++j) {
      std::vector<size_t> idx;
      for (size_t r = 0; r < m; ++r)
        if (r != j) idx.push_back(r);
      Comb base;
      for_each_map(idx.size(), n, [&](const std::vector<size_t>& slot) { build(idx, slot, "", base); });
      add_scaled(out, star2(base, single(sg[j])), 1);
    }
  }
  std::vector<size_t> all(m);
  for (size_t r = 0; r < m; ++r) all[r] = r;
  for_each_map(m, n, [&](const std::vector<size_t>& slot) { build(all, slot, tau.noise(), out); });
  return out;
}

Comb star1(const Forest& sigma, const Comb& tau) {
  Comb out;
  for (const auto& [t, c] : tau) add_scaled(out, star1(sigma, t), c);
  return out;
}

Comb mstar_recursive(const TreeChar& beta, const Tree& t, const MStarOptions& o) {
  const size_t dim = t.dim();
  Comb root;
  if (t.noise().empty()) {
    add_term(root, Tree::unit(dim), o.extra_unit_term ? 2 : 1);
    for (const auto& [tp, b] : beta)
      if (!tp.is_unit()) add_term(root, tp, b / Q(tp.symmetry()));
  } else {
    add_term(root, Tree::noise(dim, t.noise()), 1);
  }
  Comb left = single(Tree::monomial(t.k()));
  for (const auto& br : t.branches()) {
    Comb planted;
    for (const auto& [sub, c] : mstar_recursive(beta, br.sub, o)) add_term(planted, Tree::planted(br.edge, sub), c);
    left = product(left, planted);
  }
  return star2(left, root);
}

Comb mstar_star1(const TreeChar& beta, const Tree& t) {
  std::vector<std::pair<Tree, Q>> supp;
  for (const auto& [tp, b] : beta)
    if (!tp.is_unit() && !is_zero(b)) supp.emplace_back(tp, b);
  const int slots = xi0_nodes(t);
  Comb out;
  std::vector<Tree> chosen;
  std::function<void(size_t, const Q&)> rec = [&](size_t from, const Q& bval) {
    Forest f(chosen);
    add_scaled(out, star1(f, t), bval / Q(f.symmetry()));
    if (static_cast<int>(chosen.size()) == slots) return;
    for (size_t i = from; i < supp.size(); ++i) {
      chosen.push_back(supp[i].first);
      rec(i, bval * supp[i].second);
      chosen.pop_back();
    }
  };
  rec(0, Q(1));
  return out;
}

Comb mstar(const TreeChar& beta, const Comb& c) {
  Comb out;
  for (const auto& [t, v] : c) add_scaled(out, mstar_star1(beta, t), v);
  return out;
}

Comb mhat_star(const TreeChar& beta, const Tree& t) {
  if (!t.noise().empty()) throw MalformedLeft("hat-M* is defined on T_+; got " + t.key());
  Comb left = single(Tree::monomial(t.k()));
  for (const auto& br : t.branches()) {
    Comb planted;
    for (const auto& [sub, c] : mstar_star1(beta, br.sub)) add_term(planted, Tree::planted(br.edge, sub), c);
    left = product(left, planted);
  }
  return left;
}

Comb m_beta(const TreeChar& beta, const Tree& t, const std::vector<Q>& s, const Q& cap) {
  Comb out;
  for (const auto& [ft, c] : delta1(t, s, cap)) add_term(out, ft.second, c * char_value(beta, ft.first));
  return out;
}

Comb mhat_beta(const TreeChar& beta, const Tree& t, const std::vector<Q>& s, const Q& cap) {
  Comb out;
  for (const auto& [ft, c] : delta_circ(t, s, cap)) add_term(out, ft.second, c * char_value(beta, ft.first));
  return out;
}

Comb apply(const LinearMap& f, const Comb& c) {
  Comb out;
  for (const auto& [t, v] : c) add_scaled(out, f(t), v);
  return out;
}

Comb r_beta(const TreeChar& beta, const Tree& t, const std::vector<Q>& s, const Q& cap) {
  SplitComb d = delta2(t, s, cap);
  if (!t.noise().empty()) add_term(d, std::make_pair(t, Tree::unit(t.dim())), 1);
  Comb out;
  for (const auto& [lr, c] : d) add_term(out, lr.first, c * char_value(beta, lr.second));
  return out;
}

Comb r_beta_star(const TreeChar& beta, const Tree& t) {
  if (!t.noise().empty()) return single(t);
  Comb root = single(Tree::unit(t.dim()));
  for (const auto& [sg, b] : beta)
    if (!sg.is_unit()) add_term(root, sg, b / Q(sg.symmetry()));
  return star2(single(t), root);
}

Comb adjoint_on_basis(const LinearMap& R, const Tree& t, const std::vector<Tree>& basis) {
  Comb out;
  for (const auto& rho : basis) {
    Comb r = R(rho);
    auto it = r.find(t);
    if (it != r.end()) add_term(out, rho, it->second * Q(t.symmetry()) / Q(rho.symmetry()));
  }
  return out;
}

void validate_preparation_map(const LinearMap& R, const std::vector<Tree>& left, const std::vector<Tree>& right,
                              const std::vector<Tree>& probe, const std::vector<Tree>& basis) {
  std::map<Tree, Comb> rprobe;
  for (const auto& rho : probe) rprobe[rho] = R(rho);
  for (const auto& tau : right) {
    Comb rstar = adjoint_on_basis(R, tau, basis);
    for (const auto& sigma : left) {
      Comb lhs_arg = star2(sigma, tau);
      Comb rhs = star2(single(sigma), rstar);
      for (const auto& rho : probe) {
        Q l = inner_product(lhs_arg, rprobe[rho]);
        Q r = inner_product(rhs, single(rho));
        if (l != r)
          throw IncompatiblePreparationMap("R*(sigma star_2 tau) != sigma star_2 R* tau for sigma = " + sigma.key() +
                                           ", tau = " + tau.key() + ", probed on " + rho.key() + " (" +
                                           to_string(l) + " vs " + to_string(r) + ")");
      }
    }
  }
}

Comb renormalise(const LinearMap& R, const Tree& t) {
  Comb out;
  for (const auto& [tp, c] : R(t)) {
    std::vector<Comb> kids;
    for (const auto& b : tp.branches()) kids.push_back(renormalise(R, b.sub));
    expand_node(tp, tp.noise(), kids, c, out);
  }
  return out;
}

}  // namespace rsb
