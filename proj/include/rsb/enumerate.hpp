#pragma once

#include "rsb/spec.hpp"
#include "rsb/tree.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rsb {

enum class Space { T, TPlus };

struct Cutoff {
  Q gamma;
  std::optional<int> max_edges;
};

struct Subcriticality {
  std::map<std::string, Q> min_degree;  // least degree of a tree hanging below each kernel type
  Q delta;                              // guaranteed budget decrease per generated edge
};

// Throws NotSubcritical when no positive delta exists.
Subcriticality check_subcritical(const EquationSpec& spec);

// Canonical trees of degree <= gamma (and at most max_edges edges), sorted by
// (degree, encoding). T_+ keeps the Xi_0-rooted ones.
std::vector<Tree> enumerate_trees(const EquationSpec& spec, const Cutoff& cut, Space space);

// Cutoff from the gamma and max_edges defaults of an equation file, overridable.
Cutoff default_cutoff(const EquationSpec& spec);

}  // namespace rsb
