#include "rsb/classical.hpp"

#include "rsb/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <sstream>

namespace rsb::classical {

PlainTree::PlainTree() : key_(".") {}

PlainTree::PlainTree(std::vector<PlainTree> children) : children_(std::move(children)) {
  std::sort(children_.begin(), children_.end());
  if (children_.empty()) {
    key_ = ".";
    return;
  }
  key_ = "B+(";
  for (size_t i = 0; i < children_.size(); ++i) {
    if (i) key_ += ' ';
    key_ += children_[i].key_;
    nodes_ += children_[i].nodes_;
  }
  key_ += ')';
}

bool PlainTree::operator<(const PlainTree& o) const {
  if (nodes_ != o.nodes_) return nodes_ < o.nodes_;
  return key_ < o.key_;
}

Z PlainTree::symmetry() const {
  Z s = 1;
  for (size_t i = 0; i < children_.size();) {
    size_t j = i;
    while (j < children_.size() && children_[j] == children_[i]) ++j;
    const Z si = children_[i].symmetry();
    s *= factorial(j - i);
    for (size_t r = i; r < j; ++r) s *= si;
    i = j;
  }
  return s;
}

namespace {

struct PlainParser {
  const std::string& s;
  size_t pos = 0;

  void skip() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == ',' || s[pos] == '\t')) ++pos;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw InvalidTree(why + " at offset " + std::to_string(pos) + " in \"" + s + "\"");
  }
  PlainTree tree() {
    skip();
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      return PlainTree();
    }
    if (s.compare(pos, 3, "B+(") != 0) fail("expected '.' or 'B+('");
    pos += 3;
    std::vector<PlainTree> ch;
    for (;;) {
      skip();
      if (pos >= s.size()) fail("unterminated B+(");
      if (s[pos] == ')') {
        ++pos;
        break;
      }
      ch.push_back(tree());
    }
    return PlainTree(std::move(ch));
  }
};

}  // namespace

PlainTree parse_plain_tree(const std::string& text) {
  PlainParser p{text};
  PlainTree t = p.tree();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return t;
}

PlainForest forest_product(const PlainForest& a, const PlainForest& b) {
  PlainForest r = a;
  r.insert(r.end(), b.begin(), b.end());
  std::sort(r.begin(), r.end());
  return r;
}

std::string forest_key(const PlainForest& f) {
  if (f.empty()) return "1";
  std::string k;
  for (size_t i = 0; i < f.size(); ++i) k += (i ? " " : "") + f[i].key();
  return k;
}

int forest_nodes(const PlainForest& f) {
  int n = 0;
  for (const auto& t : f) n += t.nodes();
  return n;
}

std::vector<PlainTree> trees_up_to(int max_nodes) {
  std::vector<std::vector<PlainTree>> by_size(std::max(max_nodes, 0) + 1);
  std::vector<PlainTree> all;
  for (int n = 1; n <= max_nodes; ++n) {
    // forests with n-1 nodes as nondecreasing sequences from `all`
    std::vector<PlainTree> chosen;
    std::function<void(size_t, int)> rec = [&](size_t from, int left) {
      if (left == 0) {
        by_size[n].push_back(PlainTree(chosen));
        return;
      }
      for (size_t i = from; i < all.size(); ++i) {
        if (all[i].nodes() > left) break;
        chosen.push_back(all[i]);
        rec(i, left - all[i].nodes());
        chosen.pop_back();
      }
    };
    rec(0, n - 1);
    std::sort(by_size[n].begin(), by_size[n].end());
    all.insert(all.end(), by_size[n].begin(), by_size[n].end());
  }
  return all;
}

Z gamma_density(const PlainTree& t) {
  Z g = t.nodes();
  for (const auto& c : t.children()) g *= gamma_density(c);
  return g;
}

namespace {

Coproduct multiply(const Coproduct& a, const Coproduct& b) {
  Coproduct r;
  for (const auto& [x, cx] : a)
    for (const auto& [y, cy] : b) r[{forest_product(x.first, y.first), forest_product(x.second, y.second)}] += cx * cy;
  return r;
}

Coproduct unit_coproduct() { return Coproduct{{ForestPair{}, Z(1)}}; }

}  // namespace

Coproduct bck_coproduct(const PlainTree& t) {
  // Delta B+(f) = 1 (x) B+(f) + (B+ (x) id) Delta f
  Coproduct below = unit_coproduct();
  for (const auto& c : t.children()) below = multiply(below, bck_coproduct(c));
  Coproduct r;
  r[{PlainForest{}, PlainForest{t}}] += 1;
  for (const auto& [lr, c] : below) r[{PlainForest{PlainTree(lr.first)}, lr.second}] += c;
  return r;
}

Coproduct bck_coproduct(const PlainForest& f) {
  Coproduct r = unit_coproduct();
  for (const auto& t : f) r = multiply(r, bck_coproduct(t));
  return r;
}

namespace {

// (finished components, component of the root, contracted tree)
using EcState = std::tuple<PlainForest, PlainTree, PlainTree>;

std::map<EcState, Z> ec_states(const PlainTree& t) {
  std::map<EcState, Z> acc;
  acc[{PlainForest{}, PlainTree(), PlainTree()}] = 1;
  for (const auto& child : t.children()) {
    const auto sub = ec_states(child);
    std::map<EcState, Z> next;
    for (const auto& [st, c] : acc) {
      const auto& [done, comp, contr] = st;
      for (const auto& [cs, cc] : sub) {
        const auto& [cdone, ccomp, ccontr] = cs;
        PlainForest d = forest_product(done, cdone);
        // cut the edge: the child's component is finished, its contraction hangs below
        {
          std::vector<PlainTree> ch = contr.children();
          ch.push_back(ccontr);
          next[{forest_product(d, PlainForest{ccomp}), comp, PlainTree(ch)}] += c * cc;
        }
        // keep the edge: the child's component joins ours, its contraction merges into our node
        {
          std::vector<PlainTree> comp_ch = comp.children();
          comp_ch.push_back(ccomp);
          std::vector<PlainTree> ch = contr.children();
          ch.insert(ch.end(), ccontr.children().begin(), ccontr.children().end());
          next[{d, PlainTree(comp_ch), PlainTree(ch)}] += c * cc;
        }
      }
    }
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

Coproduct ec_coproduct(const PlainTree& t) {
  Coproduct r;
  for (const auto& [st, c] : ec_states(t)) {
    const auto& [done, comp, contr] = st;
    r[{forest_product(done, PlainForest{comp}), PlainForest{contr}}] += c;
  }
  return r;
}

Coproduct ec_coproduct(const PlainForest& f) {
  Coproduct r = unit_coproduct();
  for (const auto& t : f) r = multiply(r, ec_coproduct(t));
  return r;
}

std::map<Triple, Z> cointeraction_lhs(const PlainForest& f) {
  std::map<Triple, Z> r;
  for (const auto& [rp, c] : bck_coproduct(f))
    for (const auto& [r12, c1] : ec_coproduct(rp.first))
      for (const auto& [p12, c2] : ec_coproduct(rp.second))
        r[{forest_product(r12.first, p12.first), r12.second, p12.second}] += c * c1 * c2;
  return r;
}

std::map<Triple, Z> cointeraction_rhs(const PlainForest& f) {
  std::map<Triple, Z> r;
  for (const auto& [ab, c] : ec_coproduct(f))
    for (const auto& [b12, c1] : bck_coproduct(ab.second)) r[{ab.first, b12.first, b12.second}] += c * c1;
  return r;
}

std::vector<PlainForest> forests_up_to(int max_nodes) {
  const auto trees = trees_up_to(max_nodes);
  std::vector<PlainForest> out;
  PlainForest cur;
  std::function<void(size_t, int)> rec = [&](size_t from, int left) {
    if (!cur.empty()) out.push_back(cur);
    for (size_t i = from; i < trees.size(); ++i) {
      if (trees[i].nodes() > left) break;
      cur.push_back(trees[i]);
      rec(i, left - trees[i].nodes());
      cur.pop_back();
    }
  };
  rec(0, max_nodes);
  return out;
}

Q Character::operator()(const PlainTree& t) const {
  auto it = values.find(t);
  return it == values.end() ? Q(0) : it->second;
}

Q Character::operator()(const PlainForest& f) const {
  Q r = 1;
  for (const auto& t : f) {
    r *= (*this)(t);
    if (r == 0) break;
  }
  return r;
}

Character convolve(const Character& alpha, const Character& beta, CoproductKind kind, int max_nodes) {
  Character r;
  r.unit = kind == CoproductKind::BCK ? alpha.unit * beta.unit : beta.unit;
  for (const auto& t : trees_up_to(max_nodes)) {
    const Coproduct cp = kind == CoproductKind::BCK ? bck_coproduct(t) : ec_coproduct(t);
    Q v = 0;
    for (const auto& [lr, c] : cp) v += Q(c) * alpha(lr.first) * beta(lr.second);
    if (v != 0) r.values[t] = v;
  }
  return r;
}

Character exact_flow_character(int max_nodes, const Q& scale) {
  Character r;
  for (const auto& t : trees_up_to(max_nodes)) {
    Q p = 1;
    for (int i = 0; i < t.nodes(); ++i) p *= scale;
    r.values[t] = p / Q(gamma_density(t));
  }
  return r;
}

Character bck_counit(int) { return Character{}; }

Character ec_counit(int) {
  Character r;
  r.unit = 0;
  r.values[PlainTree()] = 1;
  return r;
}

// ---- polynomials ----------------------------------------------------------

Poly poly_var(size_t dim, size_t i) {
  std::vector<int> e(dim, 0);
  e[i] = 1;
  return Poly{{e, Q(1)}};
}

Poly poly_const(size_t dim, const Q& c) {
  if (c == 0) return {};
  return Poly{{std::vector<int>(dim, 0), c}};
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [e, c] : b) {
    Q& v = r[e];
    v += c;
    if (v == 0) r.erase(e);
  }
  return r;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r[e] += ca * cb;
    }
  std::erase_if(r, [](const auto& kv) { return kv.second == 0; });
  return r;
}

Poly poly_scale(const Poly& a, const Q& c) {
  if (c == 0) return {};
  Poly r = a;
  for (auto& [e, v] : r) v *= c;
  return r;
}

Poly poly_partial(const Poly& a, size_t i) {
  Poly r;
  for (const auto& [e, c] : a) {
    if (e[i] == 0) continue;
    std::vector<int> f = e;
    --f[i];
    r[f] += c * e[i];
  }
  return r;
}

std::string poly_str(const Poly& p) {
  if (p.empty()) return "0";
  std::string s;
  for (const auto& [e, c] : p) {
    if (!s.empty()) s += " + ";
    s += to_string(c);
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i]) s += "*y" + std::to_string(i) + (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
  }
  return s;
}

namespace {

// Truncated series arithmetic; every series has exactly order+1 coefficients.
struct Ring {
  size_t dim;
  int order;

  HSeries zero() const { return HSeries{std::vector<Poly>(order + 1)}; }
  HSeries lift(const Poly& p) const {
    HSeries r = zero();
    r.c[0] = p;
    return r;
  }
  HSeries add(const HSeries& a, const HSeries& b) const {
    HSeries r = zero();
    for (int n = 0; n <= order; ++n) r.c[n] = poly_add(a.c[n], b.c[n]);
    return r;
  }
  HSeries mul(const HSeries& a, const HSeries& b) const {
    HSeries r = zero();
    for (int i = 0; i <= order; ++i) {
      if (a.c[i].empty()) continue;
      for (int j = 0; i + j <= order; ++j)
        if (!b.c[j].empty()) r.c[i + j] = poly_add(r.c[i + j], poly_mul(a.c[i], b.c[j]));
    }
    return r;
  }
  HSeries scale(const HSeries& a, const Q& q) const {
    HSeries r = zero();
    for (int n = 0; n <= order; ++n) r.c[n] = poly_scale(a.c[n], q);
    return r;
  }
  HSeries shift(const HSeries& a, int k) const {  // h^k a, k may be negative
    HSeries r = zero();
    for (int n = 0; n <= order; ++n)
      if (n - k >= 0 && n - k <= order) r.c[n] = a.c[n - k];
    return r;
  }
  HSeries partial(const HSeries& a, size_t i) const {
    HSeries r = zero();
    for (int n = 0; n <= order; ++n) r.c[n] = poly_partial(a.c[n], i);
    return r;
  }
  bool is_zero(const HSeries& a) const {
    return std::all_of(a.c.begin(), a.c.end(), [](const Poly& p) { return p.empty(); });
  }
};

HVector lift(const Ring& R, const VectorField& F) {
  HVector r;
  for (const auto& p : F.f) r.push_back(R.lift(p));
  return r;
}

HVector identity(const Ring& R) {
  HVector r;
  for (size_t i = 0; i < R.dim; ++i) r.push_back(R.lift(poly_var(R.dim, i)));
  return r;
}

// F^{(n)}(v_1, ..., v_n) summed over index tuples.
HVector elementary(const Ring& R, const HVector& F, const PlainTree& t) {
  std::vector<HVector> ch;
  for (const auto& c : t.children()) ch.push_back(elementary(R, F, c));
  HVector out;
  for (const auto& Fc : F) {
    HSeries acc = R.zero();
    std::function<void(size_t, const HSeries&, const HSeries&)> rec = [&](size_t j, const HSeries& deriv,
                                                                         const HSeries& weight) {
      if (R.is_zero(deriv) || R.is_zero(weight)) return;
      if (j == ch.size()) {
        acc = R.add(acc, R.mul(deriv, weight));
        return;
      }
      for (size_t i = 0; i < R.dim; ++i) rec(j + 1, R.partial(deriv, i), R.mul(weight, ch[j][i]));
    };
    rec(0, Fc, R.lift(poly_const(R.dim, 1)));
    out.push_back(acc);
  }
  return out;
}

HVector bseries_over(const Ring& R, const Character& alpha, const HVector& F) {
  HVector out = identity(R);
  for (auto& s : out) s = R.scale(s, alpha.unit);
  for (const auto& t : trees_up_to(R.order)) {
    const Q a = alpha(t);
    if (a == 0) continue;
    const HVector e = elementary(R, F, t);
    for (size_t i = 0; i < R.dim; ++i) out[i] = R.add(out[i], R.shift(R.scale(e[i], a / Q(t.symmetry())), t.nodes()));
  }
  return out;
}

// p(Y) with Y a vector of series.
HSeries evaluate(const Ring& R, const Poly& p, const HVector& Y) {
  HSeries acc = R.zero();
  for (const auto& [e, c] : p) {
    HSeries m = R.lift(poly_const(R.dim, c));
    for (size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) m = R.mul(m, Y[i]);
    acc = R.add(acc, m);
  }
  return acc;
}

// sum_{|k| <= m} delta^k / k! d^k G(y); delta has no h^0 term.
HSeries taylor_compose(const Ring& R, const Poly& G, const HVector& delta, int m) {
  HSeries acc = R.zero();
  std::vector<int> k(R.dim, 0);
  std::function<void(size_t, int, const Poly&, const HSeries&, const Q&)> rec =
      [&](size_t i, int left, const Poly& g, const HSeries& dpow, const Q& inv_fact) {
        if (i == R.dim) {
          acc = R.add(acc, R.scale(R.mul(dpow, R.lift(g)), inv_fact));
          return;
        }
        Poly gi = g;
        HSeries di = dpow;
        Q fi = inv_fact;
        for (int ki = 0; ki <= left; ++ki) {
          if (gi.empty() || R.is_zero(di)) break;
          rec(i + 1, left - ki, gi, di, fi);
          gi = poly_partial(gi, i);
          di = R.mul(di, delta[i]);
          fi /= Q(ki + 1);
        }
      };
  rec(0, m, G, R.lift(poly_const(R.dim, 1)), Q(1));
  return acc;
}

void compare(const Ring& R, const HVector& lhs, const HVector& rhs, const std::string& what, ClassicalReport& rep) {
  for (size_t i = 0; i < R.dim; ++i)
    for (int n = 0; n <= R.order; ++n) {
      ++rep.compared;
      if (lhs[i].c[n] != rhs[i].c[n])
        rep.mismatches.push_back(what + " h^" + std::to_string(n) + " component " + std::to_string(i) + ": " +
                                 poly_str(lhs[i].c[n]) + " vs " + poly_str(rhs[i].c[n]));
    }
}

void check_order(int order) {
  if (order < 0 || order > kMaxClassicalOrder)
    throw OrderTooLarge("order " + std::to_string(order) + " exceeds " + std::to_string(kMaxClassicalOrder));
}

}  // namespace

std::vector<Poly> elementary_differential(const VectorField& F, const PlainTree& t) {
  Ring R{F.dim, 0};
  std::vector<Poly> out;
  for (const auto& s : elementary(R, lift(R, F), t)) out.push_back(s.c[0]);
  return out;
}

bool elementary_differentials_independent(const VectorField& F, int order) {
  check_order(order);
  const auto trees = trees_up_to(order);
  for (int n = 1; n <= order; ++n) {
    // rows: trees with n nodes; columns: (component, exponent)
    std::vector<std::map<std::pair<size_t, std::vector<int>>, Q>> rows;
    for (const auto& t : trees) {
      if (t.nodes() != n) continue;
      std::map<std::pair<size_t, std::vector<int>>, Q> row;
      const auto e = elementary_differential(F, t);
      for (size_t i = 0; i < e.size(); ++i)
        for (const auto& [ex, c] : e[i]) row[{i, ex}] = c;
      rows.push_back(std::move(row));
    }
    // Sparse elimination; pivots processed in increasing column order never reappear.
    using Col = std::pair<size_t, std::vector<int>>;
    std::map<Col, std::map<Col, Q>> basis;
    for (auto row : rows) {
      for (const auto& [pivot, b] : basis) {
        auto it = row.find(pivot);
        if (it == row.end()) continue;
        const Q f = it->second / b.at(pivot);
        for (const auto& [col, v] : b) {
          Q& x = row[col];
          x -= f * v;
          if (x == 0) row.erase(col);
        }
      }
      if (row.empty()) return false;
      const Col pivot = row.begin()->first;
      basis.emplace(pivot, std::move(row));
    }
  }
  return true;
}

HVector bseries(const Character& alpha, const VectorField& F, int order) {
  check_order(order);
  Ring R{F.dim, order};
  return bseries_over(R, alpha, lift(R, F));
}

HVector exact_flow(const VectorField& F, int order) {
  check_order(order);
  Ring R{F.dim, order};
  HVector Y = identity(R);
  for (int n = 0; n < order; ++n)
    for (size_t i = 0; i < R.dim; ++i) {
      const HSeries fy = evaluate(R, F.f[i], Y);
      Y[i].c[n + 1] = poly_scale(fy.c[n], Q(1, n + 1));
    }
  return Y;
}

VectorField named_field(const std::string& name) {
  VectorField F;
  if (name == "linear") {
    F.dim = 1;
    F.f = {poly_var(1, 0)};
  } else if (name == "square") {
    F.dim = 1;
    F.f = {poly_mul(poly_var(1, 0), poly_var(1, 0))};
  } else if (name == "quadratic2d") {
    // y0' = y1 + y0^2,  y1' = -y0 + 1/2 y0 y1
    F.dim = 2;
    F.f = {poly_add(poly_var(2, 1), poly_mul(poly_var(2, 0), poly_var(2, 0))),
           poly_add(poly_scale(poly_var(2, 0), -1), poly_scale(poly_mul(poly_var(2, 0), poly_var(2, 1)), Q(1, 2)))};
  } else if (name == "quartic2d") {
    // dense degree-4 field with fixed small rational coefficients
    F.dim = 2;
    for (int comp = 0; comp < 2; ++comp) {
      Poly p;
      for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 4; ++j) {
          int num = (7 * i + 3 * j + 5 * comp + 2) % 11 - 5;
          if (num == 0) num = 1;
          p[{i, j}] = Q(num, 1 + (i + 2 * j + comp) % 3);
        }
      for (auto& [e, c] : p) c.canonicalize();
      F.f.push_back(p);
    }
  } else if (name.rfind("trees", 0) == 0 && name.size() > 5) {
    // one coordinate per rooted tree with at most n nodes: y_t' = prod over children c of y_c
    const int n = std::stoi(name.substr(5));
    check_order(n);
    const auto trees = trees_up_to(n);
    std::map<PlainTree, size_t> index;
    for (size_t i = 0; i < trees.size(); ++i) index[trees[i]] = i;
    F.dim = trees.size();
    for (const auto& t : trees) {
      Poly p = poly_const(F.dim, 1);
      for (const auto& c : t.children()) p = poly_mul(p, poly_var(F.dim, index.at(c)));
      F.f.push_back(p);
    }
  } else {
    throw SpecError("unknown vector field '" + name + "'");
  }
  return F;
}

VectorField parse_field_json(const std::string& text) {
  // {"dim": 2, "components": [[["1", [0, 1]], ["-1/2", [2, 0]]], ...]}
  const auto j = nlohmann::json::parse(text);
  VectorField F;
  F.dim = j.at("dim").get<size_t>();
  for (const auto& comp : j.at("components")) {
    Poly p;
    for (const auto& term : comp) {
      auto e = term.at(1).get<std::vector<int>>();
      if (e.size() != F.dim) throw SpecError("exponent vector of wrong length");
      p = poly_add(p, Poly{{e, parse_rational(term.at(0).get<std::string>())}});
    }
    F.f.push_back(p);
  }
  if (F.f.size() != F.dim) throw SpecError("expected one component per dimension");
  return F;
}

std::string ClassicalReport::json() const {
  nlohmann::ordered_json j;
  j["check"] = name;
  j["order"] = order;
  j["compared"] = compared;
  j["ok"] = ok();
  j["mismatches"] = mismatches;
  return j.dump();
}

ClassicalReport verify_classical_composition(const Character& alpha, const Character& beta, const VectorField& F,
                                             int order) {
  check_order(order);
  if (alpha.unit != 1 || beta.unit != 1) throw Error("composition needs characters with unit coefficient 1");
  ClassicalReport rep;
  rep.name = "classical-composition";
  rep.order = order;
  Ring R{F.dim, order};
  const HVector FH = lift(R, F);
  const HVector inner = bseries_over(R, alpha, FH);
  HVector delta = inner;
  const HVector y = identity(R);
  for (size_t i = 0; i < R.dim; ++i) delta[i] = R.add(inner[i], R.scale(y[i], -1));

  // outer series term by term, each F[t] composed with the inner series
  HVector taylor = inner, direct = inner;
  for (const auto& t : trees_up_to(order)) {
    const Q b = beta(t);
    if (b == 0) continue;
    const auto G = elementary_differential(F, t);
    const Q w = b / Q(t.symmetry());
    for (size_t i = 0; i < R.dim; ++i) {
      taylor[i] = R.add(taylor[i], R.shift(R.scale(taylor_compose(R, G[i], delta, order), w), t.nodes()));
      direct[i] = R.add(direct[i], R.shift(R.scale(evaluate(R, G[i], inner), w), t.nodes()));
    }
  }
  const HVector conv = bseries_over(R, convolve(beta, alpha, CoproductKind::BCK, order), FH);
  compare(R, taylor, conv, "taylor vs convolution", rep);
  compare(R, direct, conv, "evaluation vs convolution", rep);
  return rep;
}

ClassicalReport verify_classical_substitution(const Character& beta, const Character& alpha, const VectorField& F,
                                              int order) {
  check_order(order);
  if (alpha.unit != 0) throw Error("substitution needs alpha with zero unit coefficient");
  ClassicalReport rep;
  rep.name = "classical-substitution";
  rep.order = order;
  Ring R{F.dim, order};
  const HVector FH = lift(R, F);
  HVector modified = bseries_over(R, alpha, FH);
  for (auto& s : modified) s = R.shift(s, -1);
  const HVector lhs = bseries_over(R, beta, modified);
  const HVector rhs = bseries_over(R, convolve(alpha, beta, CoproductKind::EC, order), FH);
  compare(R, lhs, rhs, "substituted field vs convolution", rep);
  return rep;
}

ClassicalReport verify_classical_cointeraction(const Character& beta, const Character& alpha1,
                                               const Character& alpha2, int max_nodes) {
  check_order(max_nodes);
  ClassicalReport rep;
  rep.name = "classical-cointeraction";
  rep.order = max_nodes;
  const auto ba1 = convolve(beta, alpha1, CoproductKind::EC, max_nodes);
  const auto ba2 = convolve(beta, alpha2, CoproductKind::EC, max_nodes);
  const auto lhs = convolve(ba1, ba2, CoproductKind::BCK, max_nodes);
  const auto rhs = convolve(beta, convolve(alpha1, alpha2, CoproductKind::BCK, max_nodes), CoproductKind::EC,
                            max_nodes);
  for (const auto& t : trees_up_to(max_nodes)) {
    rep.compared += 2;
    if (lhs(t) != rhs(t))
      rep.mismatches.push_back("character " + t.key() + ": " + to_string(lhs(t)) + " vs " + to_string(rhs(t)));
  }
  for (const auto& f : forests_up_to(max_nodes)) {
    ++rep.compared;
    if (cointeraction_lhs(f) != cointeraction_rhs(f)) rep.mismatches.push_back("coproduct on forest " + forest_key(f));
  }
  return rep;
}

ClassicalReport verify_exact_flow(const VectorField& F, int order) {
  check_order(order);
  ClassicalReport rep;
  rep.name = "classical-exact-flow";
  rep.order = order;
  Ring R{F.dim, order};
  compare(R, bseries(exact_flow_character(order), F, order), exact_flow(F, order), "1/gamma series vs exact flow",
          rep);
  return rep;
}

}  // namespace rsb::classical
