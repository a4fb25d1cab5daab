#pragma once

#include "rsb/rational.hpp"

#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace rsb::classical {

// Undecorated rooted tree; children kept sorted by key. "." is the single
// node, "B+(t1 t2 ...)" grafts the listed trees onto a new root.
class PlainTree {
 public:
  PlainTree();  // the single node
  explicit PlainTree(std::vector<PlainTree> children);

  const std::vector<PlainTree>& children() const { return children_; }
  const std::string& key() const { return key_; }
  int nodes() const { return nodes_; }
  int edges() const { return nodes_ - 1; }
  Z symmetry() const;

  bool operator==(const PlainTree& o) const { return key_ == o.key_; }
  bool operator<(const PlainTree& o) const;  // by node count, then key

 private:
  std::vector<PlainTree> children_;
  std::string key_;
  int nodes_ = 1;
};

PlainTree parse_plain_tree(const std::string& text);

// Sorted multiset; the empty forest is the unit 1.
using PlainForest = std::vector<PlainTree>;
PlainForest forest_product(const PlainForest& a, const PlainForest& b);
std::string forest_key(const PlainForest& f);  // "1" when empty
int forest_nodes(const PlainForest& f);

// All trees with 1..max_nodes nodes, ordered by (nodes, key).
std::vector<PlainTree> trees_up_to(int max_nodes);

Z gamma_density(const PlainTree& t);

using ForestPair = std::pair<PlainForest, PlainForest>;
using Coproduct = std::map<ForestPair, Z>;

// Trunk on the left, pruned forest on the right; includes t (x) 1 and 1 (x) t.
Coproduct bck_coproduct(const PlainTree& t);
// Extracted spanning subforest on the left, contracted tree on the right.
Coproduct ec_coproduct(const PlainTree& t);
Coproduct bck_coproduct(const PlainForest& f);
Coproduct ec_coproduct(const PlainForest& f);

using Triple = std::tuple<PlainForest, PlainForest, PlainForest>;
std::map<Triple, Z> cointeraction_lhs(const PlainForest& f);  // M^{(13)(2)(4)} (EC (x) EC) BCK
std::map<Triple, Z> cointeraction_rhs(const PlainForest& f);  // (id (x) BCK) EC

// Non-empty forests with at most max_nodes nodes in total.
std::vector<PlainForest> forests_up_to(int max_nodes);

// Character: `values` on trees, extended multiplicatively to forests with
// value 1 on the empty forest. `unit` is the coefficient of the identity in
// the B-series B(alpha, F, h); it is not the empty-forest value.
struct Character {
  Q unit = 1;
  std::map<PlainTree, Q> values;
  Q operator()(const PlainTree& t) const;
  Q operator()(const PlainForest& f) const;
};

enum class CoproductKind { BCK, EC };

// (alpha (x) beta) Delta on every tree up to max_nodes.
Character convolve(const Character& alpha, const Character& beta, CoproductKind kind, int max_nodes);

Character exact_flow_character(int max_nodes, const Q& scale = 1);  // scale^{|t|} / gamma(t)
Character bck_counit(int max_nodes);                                // unit 1, zero on trees
Character ec_counit(int max_nodes);                                 // unit 0, 1 on the single node

// ---- Polynomial vector fields and truncated h-series -------------------

using Poly = std::map<std::vector<int>, Q>;  // exponent vector -> coefficient

Poly poly_var(size_t dim, size_t i);
Poly poly_const(size_t dim, const Q& c);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, const Q& c);
Poly poly_partial(const Poly& a, size_t i);
std::string poly_str(const Poly& p);

// sum_{n <= order} h^n c_n with polynomial coefficients.
struct HSeries {
  std::vector<Poly> c;
};
using HVector = std::vector<HSeries>;  // one series per component

struct VectorField {
  size_t dim = 1;
  std::vector<Poly> f;
};

VectorField named_field(const std::string& name);  // "linear", "square", "quadratic2d", "quartic2d", "trees<n>"
VectorField parse_field_json(const std::string& text);

// F[t] as polynomials.
std::vector<Poly> elementary_differential(const VectorField& F, const PlainTree& t);

// True when, for each n <= order, the F[t] with |t| = n are linearly
// independent; series equality then forces equality tree by tree.
bool elementary_differentials_independent(const VectorField& F, int order);

// B(alpha, F, h)(y) up to h^order.
HVector bseries(const Character& alpha, const VectorField& F, int order);

// Taylor coefficients of the exact flow of y' = F(y), by Picard iteration on series.
HVector exact_flow(const VectorField& F, int order);

struct ClassicalReport {
  std::string name;
  int order = 0;
  long compared = 0;
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
  std::string json() const;
};

// B(beta) o B(alpha): Taylor composition of the outer series with the inner
// one, against B(beta *_BCK alpha). Requires unit 1 for both.
ClassicalReport verify_classical_composition(const Character& alpha, const Character& beta, const VectorField& F,
                                             int order);
// B(beta, h^{-1} B(alpha, F, h), h) against B(alpha *_EC beta, F, h). Requires alpha.unit = 0.
ClassicalReport verify_classical_substitution(const Character& beta, const Character& alpha, const VectorField& F,
                                              int order);
// Character form on every tree up to max_nodes, plus the coproduct form
// termwise on every forest up to max_nodes.
ClassicalReport verify_classical_cointeraction(const Character& beta, const Character& alpha1,
                                               const Character& alpha2, int max_nodes);
// B(1/gamma, F, h) against the Picard series of the exact flow.
ClassicalReport verify_exact_flow(const VectorField& F, int order);

constexpr int kMaxClassicalOrder = 8;

}  // namespace rsb::classical
