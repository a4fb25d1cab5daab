#pragma once

#include "rsb/rational.hpp"
#include "rsb/tree.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rsb {

// Seeded source of small rationals. Raw mt19937_64 output is mapped with an
// explicit modulo so sequences do not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::uint64_t below(std::uint64_t n) { return g_() % n; }
  long range(long lo, long hi) { return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
  // p/q with p in [-num, num] and q in [1, den].
  Q rational(long num = 3, long den = 3) {
    const long p = range(-num, num);
    Q q(Z(p), Z(range(1, den)));
    q.canonicalize();
    return q;
  }
  Q nonzero_rational(long num = 3, long den = 3);
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 g_;
};

inline Q Rng::nonzero_rational(long num, long den) {
  Q q;
  do q = rational(num, den);
  while (q == 0);
  return q;
}

struct TreeShape {
  size_t dim = 2;
  int max_edges = 4;
  int max_decoration = 2;  // entries of node and edge multi-indices
  std::vector<std::string> kernels{"t"};
  std::vector<std::string> noises{"x"};
};

// Random decorated tree with at most shape.max_edges edges (noise edges included).
Tree random_tree(Rng& rng, const TreeShape& shape);
MultiIndex random_index(Rng& rng, size_t dim, int max_entry);

}  // namespace rsb
