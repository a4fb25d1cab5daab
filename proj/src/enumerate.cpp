#include "rsb/enumerate.hpp"

#include "rsb/errors.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <set>
#include <unordered_map>

namespace rsb {

Subcriticality check_subcritical(const EquationSpec& spec) {
  std::map<std::string, Q> L;
  for (const auto& [t, deg] : spec.kernels) {
    std::optional<Q> best;
    for (const auto& [key, dep] : spec.deps)
      if (key.first == t) {
        Q v = spec.noise_degree(key.second);
        if (!best || v < *best) best = v;
      }
    // A type with no admissible node never produces trees; give it a huge bound.
    L[t] = best ? *best : Q(1000000);
  }
  auto planted_min = [&](const Dependency& dep) -> std::optional<Q> {
    std::optional<Q> m;
    for (const auto& a : dep.vars) {
      Q v = spec.edge_degree(a) + L[a.label];
      if (!m || v < *m) m = v;
    }
    return m;
  };
  bool stable = false;
  for (int round = 0; round < 1000 && !stable; ++round) {
    stable = true;
    for (const auto& [t, deg] : spec.kernels) {
      std::optional<Q> best;
      for (const auto& [key, dep] : spec.deps) {
        if (key.first != t) continue;
        Q v = spec.noise_degree(key.second);
        if (auto pm = planted_min(dep); pm && *pm < 0) {
          if (!dep.arity)
            throw NotSubcritical("unbounded arity with a planted tree of degree " + to_string(*pm) +
                                 " below (" + t + "," + (key.second.empty() ? "0" : key.second) + ")");
          v += *pm * *dep.arity;
        }
        if (!best || v < *best) best = v;
      }
      if (best && *best < L[t]) {
        L[t] = *best;
        stable = false;
      }
    }
  }
  if (!stable) throw NotSubcritical("least tree degree does not stabilise");

  std::optional<Q> delta;
  for (const auto& [key, dep] : spec.deps) {
    auto pm = planted_min(dep);
    if (!pm) continue;
    if (!dep.arity && *pm <= 0)
      throw NotSubcritical("unbounded arity with planted trees of degree <= 0 below (" + key.first + "," +
                           (key.second.empty() ? "0" : key.second) + ")");
    Q others = dep.arity ? Q(Q(*dep.arity - 1) * std::min(Q(0), *pm)) : Q(0);
    for (const auto& a : dep.vars) {
      Q v = spec.noise_degree(key.second) + spec.edge_degree(a) + others;
      if (!delta || v < *delta) delta = v;
    }
  }
  if (!delta) delta = Q(1000000);
  if (*delta <= 0)
    throw NotSubcritical("no positive degree increase per production step (delta = " + to_string(*delta) + ")");
  return {L, *delta};
}

namespace {

struct Option {
  Tree::Branch branch;
  Q deg;
  int edges;
};

class Generator {
 public:
  Generator(const EquationSpec& spec, Subcriticality sc) : spec_(spec), sc_(std::move(sc)) {}

  const std::vector<Tree>& gen(const std::string& t, const Q& budget, int edges) {
    std::string key = t + "|" + to_string(budget) + "|" + std::to_string(edges);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<Tree> out;
    if (edges >= 0 && budget >= sc_.min_degree.at(t)) {
      for (const auto& [dk, dep] : spec_.deps) {
        if (dk.first != t) continue;
        node(dk.second, dep, budget, edges, out);
      }
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  void node(const std::string& l, const Dependency& dep, const Q& budget, int edges, std::vector<Tree>& out) {
    Q rem = budget - spec_.noise_degree(l);
    int left = edges - (l.empty() ? 0 : 1);
    if (left < 0) return;
    int slots = dep.arity ? std::min(*dep.arity, left) : left;
    std::vector<Option> opts;
    if (slots > 0 && !dep.vars.empty()) {
      Q lp;
      bool first = true;
      for (const auto& a : dep.vars) {
        Q v = spec_.edge_degree(a) + sc_.min_degree.at(a.label);
        if (first || v < lp) lp = v;
        first = false;
      }
      Q reserve = Q(slots - 1) * std::min(Q(0), lp);
      for (const auto& a : dep.vars) {
        Q cb = rem - spec_.edge_degree(a) - reserve;
        for (const auto& child : gen(a.label, cb, left - 1))
          opts.push_back({{a, child}, spec_.edge_degree(a) + degree(child, spec_), 1 + child.edges()});
      }
    }
    Q min_opt = 0;
    for (const auto& o : opts) min_opt = std::min(min_opt, o.deg);

    std::vector<Tree::Branch> chosen;
    std::function<void(size_t, const Q&, int)> rec = [&](size_t from, const Q& sum, int used) {
      if (sum <= rem) {
        for (const auto& k : indices_with_scaled_at_most(spec_.dim(), spec_.s, rem - sum))
          out.push_back(Tree::make(k, l, chosen));
      }
      if (static_cast<int>(chosen.size()) >= slots) return;
      int after = slots - static_cast<int>(chosen.size()) - 1;
      for (size_t i = from; i < opts.size(); ++i) {
        const auto& o = opts[i];
        if (used + o.edges > left) continue;
        if (sum + o.deg + Q(after) * min_opt > rem) continue;
        chosen.push_back(o.branch);
        rec(i, sum + o.deg, used + o.edges);
        chosen.pop_back();
      }
    };
    rec(0, Q(0), 0);
  }

  const EquationSpec& spec_;
  Subcriticality sc_;
  std::unordered_map<std::string, std::vector<Tree>> memo_;
};

}  // namespace

std::vector<Tree> enumerate_trees(const EquationSpec& spec, const Cutoff& cut, Space space) {
  Generator g(spec, check_subcritical(spec));
  int edges = cut.max_edges.value_or(INT_MAX / 4);
  std::set<Tree> all;
  for (const auto& [t, deg] : spec.kernels)
    for (const auto& tr : g.gen(t, cut.gamma, edges))
      if (space == Space::T || tr.noise().empty()) all.insert(tr);
  std::vector<std::pair<Q, Tree>> keyed;
  for (const auto& t : all) keyed.emplace_back(degree(t, spec), t);
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Tree> out;
  for (auto& [d, t] : keyed) out.push_back(t);
  return out;
}

Cutoff default_cutoff(const EquationSpec& spec) { return {spec.gamma.value_or(Q(0)), spec.max_edges}; }

}  // namespace rsb
