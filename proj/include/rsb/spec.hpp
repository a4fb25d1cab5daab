#pragma once

#include "rsb/multiindex.hpp"
#include "rsb/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rsb {

// Index a = (t, m) in D_+ = L_+ x N^{d+1}; also the variable Z_a.
struct Edge {
  std::string label;
  MultiIndex m;
  std::string str() const { return label + "," + m.str(); }
  auto operator<=>(const Edge&) const = default;
  bool operator==(const Edge&) const = default;
};

struct Dependency {
  std::vector<Edge> vars;
  std::optional<int> arity;  // max number of derivatives; nullopt = unbounded
};

// The noise label "0" is the distinguished Xi_0; inside trees it is stored as "".
struct EquationSpec {
  int d = 0;
  std::vector<Q> s;
  std::map<std::string, Q> kernels;
  std::map<std::string, Q> noises;
  std::map<std::pair<std::string, std::string>, Dependency> deps;  // (t, l) with l in noises
  Q poly_degree_cap = 0;
  std::optional<Q> gamma;
  std::optional<int> max_edges;

  size_t dim() const { return static_cast<size_t>(d + 1); }
  Q kernel_degree(const std::string& t) const;
  Q noise_degree(const std::string& l) const;  // "" or "0" -> 0
  Q edge_degree(const Edge& a) const { return kernel_degree(a.label) - a.m.scaled(s); }
  const Dependency* dependency(const std::string& t, const std::string& l) const;
  void validate() const;
};

EquationSpec load_spec(const std::string& path);
EquationSpec parse_spec(const std::string& json_text);
std::string spec_to_json(const EquationSpec& spec);

}  // namespace rsb
