#include "rsb/tree.hpp"

#include "rsb/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>

namespace rsb {

namespace {

std::shared_ptr<const TreeNode> build(MultiIndex k, std::string noise, std::vector<Tree::Branch> br) {
  if (noise == "0") noise.clear();
  for (const auto& b : br) {
    if (b.edge.m.dim() != k.dim() || b.sub.dim() != k.dim())
      throw InvalidTree("dimension mismatch in branch " + b.factor_key());
  }
  std::vector<std::pair<std::string, Tree::Branch>> keyed;
  keyed.reserve(br.size());
  for (auto& b : br) keyed.emplace_back(b.factor_key(), std::move(b));
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  auto n = std::make_shared<TreeNode>();
  n->k = std::move(k);
  n->noise = std::move(noise);
  std::string key;
  if (!n->k.is_zero()) key = "X^" + n->k.str();
  if (!n->noise.empty()) key += (key.empty() ? "" : "*") + ("Xi[" + n->noise + "]");
  n->sym = n->k.factorial();
  n->edges = n->noise.empty() ? 0 : 1;
  size_t run = 0;
  for (size_t i = 0; i < keyed.size(); ++i) {
    const auto& [fk, b] = keyed[i];
    key += (key.empty() ? "" : "*") + fk;
    n->edges += 1 + b.sub.edges();
    n->nodes += b.sub.node_count();
    run = (i > 0 && keyed[i - 1].first == fk) ? run + 1 : 1;
    n->sym *= b.sub.symmetry();
    n->sym *= static_cast<unsigned long>(run);
    n->branches.push_back(b);
  }
  n->key = key.empty() ? "1" : key;
  return n;
}

}  // namespace

std::string Tree::Branch::factor_key() const { return "I[" + edge.str() + "](" + sub.key() + ")"; }

Tree::Tree() : p_(build(MultiIndex(0), "", {})) {}

Tree Tree::make(MultiIndex k, std::string noise, std::vector<Branch> branches) {
  return Tree(build(std::move(k), std::move(noise), std::move(branches)));
}

Tree Tree::unit(size_t dim) { return make(MultiIndex(dim), "", {}); }
Tree Tree::monomial(const MultiIndex& k) { return make(k, "", {}); }
Tree Tree::noise(size_t dim, const std::string& l) { return make(MultiIndex(dim), l, {}); }
Tree Tree::planted(const Edge& a, const Tree& t) { return make(MultiIndex(t.dim()), "", {{a, t}}); }

const MultiIndex& Tree::k() const { return p_->k; }
const std::string& Tree::noise() const { return p_->noise; }
const std::vector<Tree::Branch>& Tree::branches() const { return p_->branches; }
const std::string& Tree::key() const { return p_->key; }
const Z& Tree::symmetry() const { return p_->sym; }
int Tree::edges() const { return p_->edges; }
int Tree::node_count() const { return p_->nodes; }
size_t Tree::dim() const { return p_->k.dim(); }
bool Tree::is_unit() const { return p_->key == "1"; }
bool Tree::is_planted() const { return p_->k.is_zero() && p_->noise.empty() && p_->branches.size() == 1; }

Tree Tree::with_k(const MultiIndex& k) const { return make(k, noise(), branches()); }
Tree Tree::with_noise(const std::string& l) const { return make(k(), l, branches()); }

bool Tree::operator==(const Tree& o) const { return p_ == o.p_ || p_->key == o.p_->key; }
bool Tree::operator<(const Tree& o) const { return p_ != o.p_ && p_->key < o.p_->key; }

Tree tree_product(const Tree& a, const Tree& b) {
  if (a.dim() != b.dim()) throw InvalidTree("dimension mismatch in tree product");
  if (!a.noise().empty() && !b.noise().empty())
    throw NoiseClash("Xi[" + a.noise() + "] * Xi[" + b.noise() + "]");
  std::vector<Tree::Branch> br = a.branches();
  br.insert(br.end(), b.branches().begin(), b.branches().end());
  return Tree::make(a.k() + b.k(), a.noise().empty() ? b.noise() : a.noise(), std::move(br));
}

// ---------------------------------------------------------------- parsing

namespace {

struct Parser {
  const std::string& s;
  size_t dim;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidTree(what + " at position " + std::to_string(pos) + " in '" + s + "'");
  }
  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool accept(const std::string& tok) {
    skip();
    if (s.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  void expect(const std::string& tok) {
    if (!accept(tok)) fail("expected '" + tok + "'");
  }
  std::string label() {
    skip();
    size_t st = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_' || s[pos] == '\''))
      ++pos;
    if (st == pos) fail("expected a label");
    return s.substr(st, pos - st);
  }
  MultiIndex index() {
    expect("(");
    std::vector<int> v;
    do {
      skip();
      size_t st = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (st == pos) fail("expected a natural number");
      v.push_back(std::stoi(s.substr(st, pos - st)));
    } while (accept(","));
    expect(")");
    if (v.size() != dim) fail("multi-index of length " + std::to_string(v.size()) + ", expected " + std::to_string(dim));
    return MultiIndex(v);
  }

  Tree product() {
    MultiIndex k(dim);
    std::string noise;
    std::vector<Tree::Branch> br;
    do {
      skip();
      if (accept("X^")) {
        k = k + index();
      } else if (accept("Xi[")) {
        std::string l = label();
        expect("]");
        if (l == "0") continue;
        if (!noise.empty()) fail("node with two noise edges");
        noise = l;
      } else if (accept("I[")) {
        std::string t = label();
        expect(",");
        MultiIndex m = index();
        expect("]");
        expect("(");
        Tree sub = product();
        expect(")");
        br.push_back({{t, m}, sub});
      } else if (accept("1")) {
      } else if (accept("(")) {
        Tree inner = product();
        expect(")");
        if (!noise.empty() && !inner.noise().empty()) fail("node with two noise edges");
        k = k + inner.k();
        if (noise.empty()) noise = inner.noise();
        br.insert(br.end(), inner.branches().begin(), inner.branches().end());
      } else {
        fail("unexpected token");
      }
    } while (accept("*"));
    return Tree::make(k, noise, br);
  }
};

}  // namespace

Tree parse_tree(const std::string& text, size_t dim) {
  Parser p{text, dim};
  Tree t = p.product();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing characters");
  return t;
}

Q degree(const Tree& t, const EquationSpec& spec) {
  Q r = t.k().scaled(spec.s) + spec.noise_degree(t.noise());
  for (const auto& b : t.branches()) r += spec.edge_degree(b.edge) + degree(b.sub, spec);
  return r;
}

// ---------------------------------------------------------------- forests

Forest::Forest(std::vector<Tree> trees) {
  for (auto& t : trees)
    if (!t.is_unit()) trees_.push_back(std::move(t));
  std::sort(trees_.begin(), trees_.end());
}

Z Forest::symmetry() const {
  Z r = 1;
  unsigned long run = 0;
  for (size_t i = 0; i < trees_.size(); ++i) {
    run = (i > 0 && trees_[i - 1] == trees_[i]) ? run + 1 : 1;
    r *= trees_[i].symmetry();
    r *= run;
  }
  return r;
}

std::string Forest::key() const {
  if (trees_.empty()) return "1";
  std::string r;
  for (size_t i = 0; i < trees_.size(); ++i) r += (i ? " . " : "") + trees_[i].key();
  return r;
}

Forest Forest::operator*(const Forest& o) const {
  std::vector<Tree> all = trees_;
  all.insert(all.end(), o.trees_.begin(), o.trees_.end());
  return Forest(std::move(all));
}

// ---------------------------------------------------------------- combinations

Comb single(const Tree& t, const Q& c) {
  Comb r;
  add_term(r, t, c);
  return r;
}

Comb product(const Comb& a, const Comb& b) {
  Comb r;
  for (const auto& [x, cx] : a)
    for (const auto& [y, cy] : b) add_term(r, tree_product(x, y), cx * cy);
  return r;
}

Q inner_product(const Comb& u, const Comb& v) {
  Q r = 0;
  for (const auto& [t, c] : u) {
    auto it = v.find(t);
    if (it != v.end()) r += c * it->second * Q(t.symmetry());
  }
  return r;
}

Comb project_leq_degree(const Comb& u, const Q& gamma, const EquationSpec& spec) {
  Comb r;
  for (const auto& [t, c] : u)
    if (degree(t, spec) <= gamma) r.emplace(t, c);
  return r;
}

namespace {

std::string coef_prefix(const Q& c, bool first) {
  std::string r;
  if (sgn(c) < 0) r = first ? "-" : " - ";
  else if (!first) r = " + ";
  Q a = abs(c);
  if (a != 1) r += to_string(a) + " ";
  return r;
}

}  // namespace

std::string to_string(const Comb& c) {
  if (c.empty()) return "0";
  std::string r;
  bool first = true;
  for (const auto& [t, v] : c) {
    r += coef_prefix(v, first) + t.key();
    first = false;
  }
  return r;
}

std::string to_json(const Comb& c) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [t, v] : c)
    j.push_back({{"num", v.get_num().get_str()}, {"den", v.get_den().get_str()}, {"tree", t.key()}});
  return j.dump();
}

std::string to_string(const SplitComb& c) {
  if (c.empty()) return "0";
  std::string r;
  bool first = true;
  for (const auto& [p, v] : c) {
    r += coef_prefix(v, first) + p.first.key() + " (x) " + p.second.key();
    first = false;
  }
  return r;
}

std::string to_string(const ForestSplitComb& c) {
  if (c.empty()) return "0";
  std::string r;
  bool first = true;
  for (const auto& [p, v] : c) {
    r += coef_prefix(v, first) + "{" + p.first.key() + "} (x) " + p.second.key();
    first = false;
  }
  return r;
}

}  // namespace rsb
