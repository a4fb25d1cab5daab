#pragma once

#include "rsb/tree.hpp"

#include <vector>

namespace rsb {

// Weight attached to a split k = sum_v k_v of a raising operator.
//   Multinomial: k!/prod k_v!, i.e. prod_i (up^i)^{k_i}  (default, dual to Delta_2)
//   Plain:       1 per decomposition
enum class RaiseWeights { Multinomial, Plain };

using NodePath = std::vector<size_t>;  // branch indices from the root

std::vector<NodePath> node_paths(const Tree& t);

// sigma deformed-grafted onto every node of tau along a new edge a, with the
// binomial transfer of node decoration into the edge derivative.
Comb deformed_graft(const Tree& sigma, const Edge& a, const Tree& tau);

// up^i tau = sum over nodes v of tau with e_i added at v.
Comb raise(const Tree& tau, size_t i);

// Splits k over the given nodes (all nodes when targets is empty).
Comb raise_tilde(const Tree& tau, const MultiIndex& k, RaiseWeights w = RaiseWeights::Multinomial,
                 const std::vector<NodePath>& targets = {});

// sigma star_2 tau for sigma = X^k prod I_{a_i}(sigma_i): simultaneous deformed
// grafting of the planted factors onto the nodes of tau, then raising by k on
// the original nodes. Throws MalformedLeft if sigma has a root noise.
Comb star2(const Tree& sigma, const Tree& tau, RaiseWeights w = RaiseWeights::Multinomial);
Comb star2(const Comb& sigma, const Comb& tau, RaiseWeights w = RaiseWeights::Multinomial);

Comb graft(const Comb& sigma, const Edge& a, const Comb& tau);
Comb raise(const Comb& tau, size_t i);

}  // namespace rsb
