#pragma once

#include "rsb/coalgebra.hpp"
#include "rsb/diffexpr.hpp"
#include "rsb/enumerate.hpp"

#include <string>
#include <vector>

namespace rsb {

// Linear coefficients of a B_- series; alpha(1) is read from the map like any
// other tree (absent = 0).
using BMinus = std::map<Tree, Q>;

Q linear_value(const BMinus& a, const Tree& t);

// Character on T_+, multiplicative for the tree product: beta(X_i) per
// direction and beta on planted trees I_a(tau) (absent = 0).
struct TPlusChar {
  std::vector<Q> x;
  TreeChar planted;
  Q monomial(const MultiIndex& k) const;
  Q value(const Tree& sigma) const;  // sigma without root noise
};

// The products X^k prod I_{a_j}(tau_j) built from the planted support of beta
// with degree <= budget.gamma and edges <= budget.max_edges.
std::vector<Tree> tplus_monomials(const EquationSpec& spec, const TPlusChar& beta, const Cutoff& budget);

// sum alpha(tau)/S(tau) F_t(tau).
DiffExpr eval_bminus(const EquationSpec& spec, const BMinus& alpha, const std::string& t);
// sum_k beta(X^k) Z_{(t,m+k)}/k! (|k|_s <= poly_gamma) + sum beta(I_a(tau))/S(tau) F_t(tau).
DiffExpr eval_bplus(const EquationSpec& spec, const TPlusChar& beta, const Edge& a, const Q& poly_gamma);

struct FunctionComposition {
  DiffExpr faa_di_bruno;  // prod (U_a - u_a)^{n_a}/n_a! prod D_a^{n_a} f, truncated
  DiffExpr bminus_form;   // sum beta(sigma)/S(sigma) hat-F(sigma)
  std::vector<std::pair<Tree, Q>> coefficients;  // sigma -> beta(sigma)
};

// f composed with U_a = B_+(beta, F, a), truncated at total degree
// base_degree + (piece degrees) <= cut.gamma and edges likewise.
FunctionComposition compose_with_function(const EquationSpec& spec, const DiffExpr& f, const TPlusChar& beta,
                                          const Cutoff& cut, const Q& base_degree = 0, int base_edges = 0);

struct SeriesComparison {
  std::string target;
  DiffExpr lhs;
  DiffExpr rhs;
  std::vector<DiffExpr> others;  // further routes, all required to match lhs
  bool agree() const;
};

// B_-(alpha) o B_+(beta): lhs = Faa di Bruno route, rhs = B_-(beta star_2 alpha).
SeriesComparison compose_series(const EquationSpec& spec, const BMinus& alpha, const TPlusChar& beta,
                                const Cutoff& cut, const std::string& t);
BMinus star2_convolution(const EquationSpec& spec, const BMinus& alpha, const TPlusChar& beta, const Cutoff& cut);

struct SubstitutionOptions {
  bool extra_unit_term = false;
};

// hat-F_t(tau) with children hat-F and Xi_0 replaced by sum_{tau'} beta(tau')/S(tau') tau' (1 included).
DiffExpr hat_F(const EquationSpec& spec, const TreeChar& beta, const std::string& t, const Tree& tau,
               const SubstitutionOptions& o = {});

// B_-(alpha) o_s B_-(beta): lhs = hat-F recursion, rhs = sum alpha/S F(M*_beta tau) with M* via star_1.
SeriesComparison substitute_series(const EquationSpec& spec, const BMinus& alpha, const TreeChar& beta,
                                   const std::string& t, const SubstitutionOptions& o = {});

// B_-(alpha) o_{s,r} B_-(beta) for alpha multiplicative on T_+ against
// B_-(beta) o B_+(alpha) computed by both composition routes.
SeriesComparison root_substitute_series(const EquationSpec& spec, const TPlusChar& alpha, const BMinus& beta,
                                        const Cutoff& cut, const std::string& t);

// B_-(beta, F_circ) o_{s,r} B_-(beta, F) against B_-(beta) o_s B_-(beta) via star_1.
SeriesComparison root_substitution_circ(const EquationSpec& spec, const TreeChar& beta, const std::string& t);

}  // namespace rsb
