#pragma once

#include "rsb/grafting.hpp"
#include "rsb/tree.hpp"

#include <functional>
#include <vector>

namespace rsb {

// Values of a character on trees. As a forest character it is extended
// multiplicatively with value 1 on the empty forest (= the tree 1).
using TreeChar = std::map<Tree, Q>;

Q char_value(const TreeChar& c, const Tree& t);
Q char_value(const TreeChar& c, const Forest& f);

// Largest |.|_s carried by polynomial and edge-derivative decorations of any
// tree in the list; a Delta_2 cap at least this large loses no pairing with them.
Q support_cap(const std::vector<Tree>& trees, const EquationSpec& spec);

// Delta_2 with the l-sum truncated at |l|_s <= cap. hat = true gives the
// variant with Delta Xi_l = Xi_l (x) 1 + 1 (x) Xi_l (l != 0).
SplitComb delta2(const Tree& t, const std::vector<Q>& s, const Q& cap, bool hat = false);

enum class Delta1Variant {
  Corrected,    // hat-Delta_2' tau = Delta_2 tau + [root noise != 0] tau (x) 1
  LiteralHat,   // multiplicative hat-Delta_2 throughout
};

ForestSplitComb delta_circ(const Tree& t, const std::vector<Q>& s, const Q& cap,
                           Delta1Variant v = Delta1Variant::Corrected);
ForestSplitComb delta1(const Tree& t, const std::vector<Q>& s, const Q& cap,
                       Delta1Variant v = Delta1Variant::Corrected);
// Multiplicative extension T_- -> T_- (x) T_-.
std::map<std::pair<Forest, Forest>, Q> delta1(const Forest& f, const std::vector<Q>& s, const Q& cap,
                                              Delta1Variant v = Delta1Variant::Corrected);

// sigma_1 ... sigma_m star_1 tau by the recursion over root extraction.
Comb star1(const Forest& sigma, const Tree& tau);
Comb star1(const Forest& sigma, const Comb& tau);

struct MStarOptions {
  bool extra_unit_term = false;  // adds a second copy of 1 to M* Xi_0
};

// M*_beta through the tree recursion (X^k prod I(M* tau_i)) star_2 M* Xi_l.
Comb mstar_recursive(const TreeChar& beta, const Tree& t, const MStarOptions& o = {});
// M*_beta as sum over forests beta(f)/S(f) f star_1 tau.
Comb mstar_star1(const TreeChar& beta, const Tree& t);
Comb mstar(const TreeChar& beta, const Comb& c);  // star_1 route, linear extension
// hat-M*_beta (X^k prod I(tau_i)) = X^k prod I(M*_beta tau_i).
Comb mhat_star(const TreeChar& beta, const Tree& t);

// M_beta = (beta (x) id) Delta_1 and hat-M_beta = (beta (x) id) Delta_circ.
Comb m_beta(const TreeChar& beta, const Tree& t, const std::vector<Q>& s, const Q& cap);
Comb mhat_beta(const TreeChar& beta, const Tree& t, const std::vector<Q>& s, const Q& cap);

// Preparation maps.
using LinearMap = std::function<Comb(const Tree&)>;

Comb apply(const LinearMap& f, const Comb& c);

// Extraction at the root: R_beta tau = sum beta(extracted) trunk over
// hat-Delta_2' tau, so that M_circ R_beta = M_beta.
Comb r_beta(const TreeChar& beta, const Tree& t, const std::vector<Q>& s, const Q& cap);
// Its adjoint: tau star_2 (1 + sum_sigma beta(sigma)/S(sigma) sigma) on Xi_0-rooted
// tau, the identity on noise-rooted tau. A right star_2 morphism by associativity.
Comb r_beta_star(const TreeChar& beta, const Tree& t);

// Adjoint of R restricted to a finite basis: sum_rho <tau, R rho>/S(rho) rho.
Comb adjoint_on_basis(const LinearMap& R, const Tree& t, const std::vector<Tree>& basis);

// Checks R*(sigma star_2 tau) = sigma star_2 R* tau by pairing against every
// rho of `probe`; the adjoint is taken on `basis`. Throws IncompatiblePreparationMap.
void validate_preparation_map(const LinearMap& R, const std::vector<Tree>& left, const std::vector<Tree>& right,
                              const std::vector<Tree>& probe, const std::vector<Tree>& basis);

// M = M_circ R with M_circ multiplicative, M_circ I_a(tau) = I_a(M tau).
Comb renormalise(const LinearMap& R, const Tree& t);

}  // namespace rsb
