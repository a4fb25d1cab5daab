#include "rsb/grafting.hpp"

#include "rsb/errors.hpp"

#include <functional>

namespace rsb {

namespace {

void collect_paths(const Tree& t, NodePath& cur, std::vector<NodePath>& out) {
  out.push_back(cur);
  for (size_t j = 0; j < t.branches().size(); ++j) {
    cur.push_back(j);
    collect_paths(t.branches()[j].sub, cur, out);
    cur.pop_back();
  }
}

// Combination of trees obtained by replacing branch j of t by each term of c.
void replace_branch(const Tree& t, size_t j, const Comb& c, const Q& w, Comb& out) {
  for (const auto& [sub, coef] : c) {
    auto br = t.branches();
    br[j].sub = sub;
    add_term(out, Tree::make(t.k(), t.noise(), std::move(br)), coef * w);
  }
}

struct Factor {
  Edge a;
  Tree t;
};

// Joint grafting + raising. Each factor goes to exactly one node; `kraise` is
// split over nodes allowed by `allowed(path)`.
class Star2 {
 public:
  Star2(const std::vector<Factor>& f, RaiseWeights w, std::function<bool(const NodePath&)> allowed)
      : f_(f), w_(w), allowed_(std::move(allowed)) {}

  Comb run(const Tree& tau, const std::vector<size_t>& fs, const MultiIndex& kraise, NodePath& path) {
    Comb out;
    const size_t nb = tau.branches().size();
    const size_t slots = nb + 1;  // slot nb = the root itself
    std::vector<size_t> assign(fs.size(), 0);
    const bool root_ok = allowed_(path);
    while (true) {
      std::vector<size_t> here;
      std::vector<std::vector<size_t>> down(nb);
      for (size_t i = 0; i < fs.size(); ++i) {
        if (assign[i] == nb) here.push_back(fs[i]);
        else down[assign[i]].push_back(fs[i]);
      }
      // raising split: root share r, the rest over the branches
      for (const auto& r : indices_below(kraise)) {
        if (!root_ok && !r.is_zero()) continue;
        MultiIndex rest = *kraise.minus(r);
        Q wr = w_ == RaiseWeights::Multinomial ? Q(kraise.binomial(r)) : Q(1);
        for_each_composition(rest, nb, [&](const std::vector<MultiIndex>& parts) {
          Q wb = 1;
          if (w_ == RaiseWeights::Multinomial) {
            MultiIndex left = rest;
            for (const auto& p : parts) {
              wb *= left.binomial(p);
              left = *left.minus(p);
            }
          }
          // children
          std::vector<Comb> kids(nb);
          for (size_t j = 0; j < nb; ++j) {
            path.push_back(j);
            kids[j] = run(tau.branches()[j].sub, down[j], parts[j], path);
            path.pop_back();
            if (kids[j].empty()) return;
          }
          attach_root(tau, here, r, kids, wr * wb, out);
        });
      }
      size_t i = 0;
      while (i < assign.size() && ++assign[i] == slots) assign[i++] = 0;
      if (i == assign.size()) break;
    }
    return out;
  }

 private:
  // Lower the root decoration jointly by l_i for the factors grafted here.
  void attach_root(const Tree& tau, const std::vector<size_t>& here, const MultiIndex& r,
                   const std::vector<Comb>& kids, const Q& w, Comb& out) {
    const MultiIndex& n = tau.k();
    std::vector<MultiIndex> ls(here.size());
    std::function<void(size_t, const MultiIndex&, const Q&)> rec = [&](size_t i, const MultiIndex& left,
                                                                        const Q& c) {
      if (i == here.size()) {
        std::vector<Tree::Branch> extra;
        for (size_t q = 0; q < here.size(); ++q) {
          const Factor& f = f_[here[q]];
          extra.push_back({{f.a.label, *f.a.m.minus(ls[q])}, f.t});
        }
        emit(tau, left + r, extra, kids, c, out);
        return;
      }
      const Edge& a = f_[here[i]].a;
      for (const auto& l : indices_below(left)) {
        if (!l.leq(a.m)) continue;
        ls[i] = l;
        rec(i + 1, *left.minus(l), c * Q(left.binomial(l)));
      }
    };
    rec(0, n, w);
  }

  void emit(const Tree& tau, const MultiIndex& k, const std::vector<Tree::Branch>& extra,
            const std::vector<Comb>& kids, const Q& c, Comb& out) {
    std::vector<Tree::Branch> br;
    std::function<void(size_t, const Q&)> rec = [&](size_t j, const Q& cc) {
      if (j == kids.size()) {
        auto all = br;
        all.insert(all.end(), extra.begin(), extra.end());
        add_term(out, Tree::make(k, tau.noise(), std::move(all)), cc);
        return;
      }
      for (const auto& [sub, v] : kids[j]) {
        br.push_back({tau.branches()[j].edge, sub});
        rec(j + 1, cc * v);
        br.pop_back();
      }
    };
    rec(0, c);
  }

  const std::vector<Factor>& f_;
  RaiseWeights w_;
  std::function<bool(const NodePath&)> allowed_;
};

}  // namespace

std::vector<NodePath> node_paths(const Tree& t) {
  std::vector<NodePath> out;
  NodePath cur;
  collect_paths(t, cur, out);
  return out;
}

Comb deformed_graft(const Tree& sigma, const Edge& a, const Tree& tau) {
  Comb out;
  const MultiIndex& n = tau.k();
  for (const auto& l : indices_below(n)) {
    auto am = a.m.minus(l);
    if (!am) continue;
    auto br = tau.branches();
    br.push_back({{a.label, *am}, sigma});
    add_term(out, Tree::make(*n.minus(l), tau.noise(), std::move(br)), Q(n.binomial(l)));
  }
  for (size_t j = 0; j < tau.branches().size(); ++j)
    replace_branch(tau, j, deformed_graft(sigma, a, tau.branches()[j].sub), 1, out);
  return out;
}

Comb raise(const Tree& tau, size_t i) {
  Comb out;
  add_term(out, tau.with_k(tau.k() + MultiIndex::unit(tau.dim(), i)), 1);
  for (size_t j = 0; j < tau.branches().size(); ++j)
    replace_branch(tau, j, raise(tau.branches()[j].sub, i), 1, out);
  return out;
}

Comb raise_tilde(const Tree& tau, const MultiIndex& k, RaiseWeights w, const std::vector<NodePath>& targets) {
  std::vector<Factor> none;
  std::function<bool(const NodePath&)> allowed = [](const NodePath&) { return true; };
  if (!targets.empty())
    allowed = [&targets](const NodePath& p) {
      for (const auto& t : targets)
        if (t == p) return true;
      return false;
    };
  Star2 s(none, w, allowed);
  NodePath path;
  return s.run(tau, {}, k, path);
}

Comb star2(const Tree& sigma, const Tree& tau, RaiseWeights w) {
  if (!sigma.noise().empty()) throw MalformedLeft("left operand " + sigma.key() + " has a root noise");
  if (sigma.dim() != tau.dim()) throw InvalidTree("dimension mismatch in star2");
  std::vector<Factor> f;
  std::vector<size_t> idx;
  for (const auto& b : sigma.branches()) {
    idx.push_back(f.size());
    f.push_back({b.edge, b.sub});
  }
  Star2 s(f, w, [](const NodePath&) { return true; });
  NodePath path;
  return s.run(tau, idx, sigma.k(), path);
}

Comb star2(const Comb& sigma, const Comb& tau, RaiseWeights w) {
  Comb out;
  for (const auto& [s, cs] : sigma)
    for (const auto& [t, ct] : tau) add_scaled(out, star2(s, t, w), cs * ct);
  return out;
}

Comb graft(const Comb& sigma, const Edge& a, const Comb& tau) {
  Comb out;
  for (const auto& [s, cs] : sigma)
    for (const auto& [t, ct] : tau) add_scaled(out, deformed_graft(s, a, t), cs * ct);
  return out;
}

Comb raise(const Comb& tau, size_t i) {
  Comb out;
  for (const auto& [t, c] : tau) add_scaled(out, raise(t, i), c);
  return out;
}

}  // namespace rsb
