#pragma once

#include "rsb/rational.hpp"

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rsb {

// Exponent vector in N^{d+1}. Subtraction that would leave N returns nullopt;
// callers treat that as an annihilated term.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(size_t dim) : e_(dim, 0) {}
  explicit MultiIndex(std::vector<int> e);
  static MultiIndex unit(size_t dim, size_t i);

  size_t dim() const { return e_.size(); }
  int operator[](size_t i) const { return e_[i]; }
  int& operator[](size_t i) { return e_[i]; }
  const std::vector<int>& entries() const { return e_; }

  bool is_zero() const;
  int total() const;
  bool leq(const MultiIndex& o) const;  // componentwise

  MultiIndex operator+(const MultiIndex& o) const;
  std::optional<MultiIndex> minus(const MultiIndex& o) const;

  Z factorial() const;
  Z binomial(const MultiIndex& l) const;  // prod_i C(e_i, l_i)
  Q scaled(const std::vector<Q>& s) const;

  std::string str() const;  // "(k0,k1,...)"

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

 private:
  std::vector<int> e_;
};

// All l <= k componentwise, in lexicographic order.
std::vector<MultiIndex> indices_below(const MultiIndex& k);

// All l in N^{dim} with |l|_s <= cap, in lexicographic order.
std::vector<MultiIndex> indices_with_scaled_at_most(size_t dim, const std::vector<Q>& s, const Q& cap);

// All ways of writing k as an ordered sum of `parts` multi-indices.
void for_each_composition(const MultiIndex& k, size_t parts,
                          const std::function<void(const std::vector<MultiIndex>&)>& f);

}  // namespace rsb
