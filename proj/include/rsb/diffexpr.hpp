#pragma once

#include "rsb/spec.hpp"
#include "rsb/tree.hpp"

#include <map>
#include <string>
#include <vector>

namespace rsb {

// D_{a_1} ... D_{a_n} F^l_t with derivs kept sorted.
struct Atom {
  std::string t;
  std::string l;  // "" = noise 0
  std::vector<Edge> derivs;
  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

// prod Z_a^p times a product of atoms.
struct Monomial {
  std::vector<std::pair<Edge, int>> z;  // sorted by variable, powers > 0
  std::vector<Atom> atoms;              // sorted multiset
  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;
};

class DiffExpr {
 public:
  DiffExpr() = default;
  static DiffExpr constant(const Q& c);
  static DiffExpr variable(const Edge& a);
  // F^l_t, or 0 when (t,l) carries no nonlinearity.
  static DiffExpr atom(const EquationSpec& spec, const std::string& t, const std::string& l);

  const std::map<Monomial, Q>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  void add(const Monomial& m, const Q& c);

  DiffExpr& operator+=(const DiffExpr& o);
  DiffExpr operator+(const DiffExpr& o) const;
  DiffExpr operator-(const DiffExpr& o) const;
  DiffExpr operator*(const DiffExpr& o) const;
  DiffExpr operator*(const Q& c) const;
  bool operator==(const DiffExpr& o) const { return terms_ == o.terms_; }

  std::string str() const;
  std::string json() const;

 private:
  std::map<Monomial, Q> terms_;
};

Monomial monomial_product(const Monomial& a, const Monomial& b);

// Leibniz derivation in the variable u_a. On an atom it appends a when a is in
// the dependency set and the arity still allows one more derivative.
DiffExpr derive_D(const EquationSpec& spec, const DiffExpr& e, const Edge& a);

// d^{e_i} = sum_a Z_{a+e_i} D_a, a over the variables present and the
// dependency sets of the atoms present; d^k = prod_i (d^{e_i})^{k_i}.
DiffExpr derive_partial(const EquationSpec& spec, const DiffExpr& e, const MultiIndex& k);

// F_t(tau) = { d^k D_{a_1} ... D_{a_n} F^l_t } prod_j F_{t_j}(tau_j).
DiffExpr elementary_differential(const EquationSpec& spec, const std::string& t, const Tree& tau);
DiffExpr elementary_differential(const EquationSpec& spec, const std::string& t, const Comb& c);

}  // namespace rsb
