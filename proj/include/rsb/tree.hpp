#pragma once

#include "rsb/multiindex.hpp"
#include "rsb/rational.hpp"
#include "rsb/spec.hpp"

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace rsb {

struct TreeNode;

// Immutable decorated tree X^k Xi_l prod_i I_{a_i}(tau_i). The noise label is
// stored on the node ("" means Xi_0), so noise leaves never appear as nodes.
// Equality and ordering go through the canonical encoding.
class Tree {
 public:
  struct Branch;

  Tree();  // the unit tree 1 in dimension 0; mostly a placeholder
  static Tree make(MultiIndex k, std::string noise, std::vector<Branch> branches);
  static Tree unit(size_t dim);
  static Tree monomial(const MultiIndex& k);
  static Tree noise(size_t dim, const std::string& l);
  static Tree planted(const Edge& a, const Tree& t);

  const MultiIndex& k() const;
  const std::string& noise() const;
  const std::vector<Branch>& branches() const;
  const std::string& key() const;
  const Z& symmetry() const;
  int edges() const;       // kernel edges + nonzero-noise edges
  int node_count() const;  // excluding noise leaves
  size_t dim() const;
  bool is_unit() const;
  bool is_planted() const;

  Tree with_k(const MultiIndex& k) const;
  Tree with_noise(const std::string& l) const;
  Tree without_root_noise() const { return with_noise(""); }

  bool operator==(const Tree& o) const;
  bool operator<(const Tree& o) const;

 private:
  explicit Tree(std::shared_ptr<const TreeNode> p) : p_(std::move(p)) {}
  std::shared_ptr<const TreeNode> p_;
};

struct Tree::Branch {
  Edge edge;
  Tree sub;
  std::string factor_key() const;
};

struct TreeNode {
  MultiIndex k;
  std::string noise;
  std::vector<Tree::Branch> branches;
  std::string key;
  Z sym;
  int edges = 0;
  int nodes = 1;
};

// Root identification. Throws NoiseClash if both roots carry a noise.
Tree tree_product(const Tree& a, const Tree& b);

// Parses the canonical grammar; dim = d+1. Accepts any factor order and
// returns the canonical tree. Xi[0] is the unit.
Tree parse_tree(const std::string& text, size_t dim);

Q degree(const Tree& t, const EquationSpec& spec);

// Multiset of trees; 1 is the empty forest and never stored.
class Forest {
 public:
  Forest() = default;
  explicit Forest(std::vector<Tree> trees);
  static Forest single(const Tree& t) { return Forest({t}); }

  const std::vector<Tree>& trees() const { return trees_; }
  bool empty() const { return trees_.empty(); }
  size_t size() const { return trees_.size(); }
  Z symmetry() const;  // prod m_i! S(tau_i)^{m_i}
  std::string key() const;
  Forest operator*(const Forest& o) const;

  bool operator==(const Forest& o) const { return trees_ == o.trees_; }
  bool operator<(const Forest& o) const { return trees_ < o.trees_; }

 private:
  std::vector<Tree> trees_;
};

using Comb = std::map<Tree, Q>;
using ForestComb = std::map<Forest, Q>;
using SplitComb = std::map<std::pair<Tree, Tree>, Q>;
using ForestSplitComb = std::map<std::pair<Forest, Tree>, Q>;

template <class Map, class Key>
void add_term(Map& m, const Key& k, const Q& c) {
  if (is_zero(c)) return;
  auto [it, inserted] = m.try_emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (is_zero(it->second)) m.erase(it);
  }
}

template <class Map>
void add_scaled(Map& into, const Map& from, const Q& c) {
  for (const auto& [k, v] : from) add_term(into, k, v * c);
}

Comb single(const Tree& t, const Q& c = 1);
Comb product(const Comb& a, const Comb& b);  // bilinear tree product

// <u,v> = sum u(t) v(t) S(t).
Q inner_product(const Comb& u, const Comb& v);

Comb project_leq_degree(const Comb& u, const Q& gamma, const EquationSpec& spec);

std::string to_string(const Comb& c);
std::string to_json(const Comb& c);
std::string to_string(const SplitComb& c);
std::string to_string(const ForestSplitComb& c);

}  // namespace rsb
