#include "rsb/random.hpp"

namespace rsb {

MultiIndex random_index(Rng& rng, size_t dim, int max_entry) {
  MultiIndex m(dim);
  for (size_t i = 0; i < dim; ++i) m[i] = static_cast<int>(rng.range(0, max_entry));
  return m;
}

namespace {

Tree grow(Rng& rng, const TreeShape& shape, int& budget, int depth) {
  const MultiIndex k = random_index(rng, shape.dim, shape.max_decoration);
  std::string noise;
  if (budget > 0 && !shape.noises.empty() && rng.below(3) == 0) {
    noise = shape.noises[rng.below(shape.noises.size())];
    --budget;
  }
  std::vector<Tree::Branch> branches;
  while (budget > 0 && depth < 4 && rng.below(2) == 0) {
    --budget;
    Edge a{shape.kernels[rng.below(shape.kernels.size())], random_index(rng, shape.dim, shape.max_decoration)};
    branches.push_back({a, grow(rng, shape, budget, depth + 1)});
  }
  return Tree::make(k, noise, branches);
}

}  // namespace

Tree random_tree(Rng& rng, const TreeShape& shape) {
  int budget = static_cast<int>(rng.range(0, shape.max_edges));
  return grow(rng, shape, budget, 0);
}

}  // namespace rsb
