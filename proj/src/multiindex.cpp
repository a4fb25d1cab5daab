#include "rsb/multiindex.hpp"

#include "rsb/errors.hpp"

namespace rsb {

MultiIndex::MultiIndex(std::vector<int> e) : e_(std::move(e)) {
  for (int x : e_)
    if (x < 0) throw InvalidTree("negative multi-index entry");
}

MultiIndex MultiIndex::unit(size_t dim, size_t i) {
  MultiIndex m(dim);
  m.e_.at(i) = 1;
  return m;
}

bool MultiIndex::is_zero() const {
  for (int x : e_)
    if (x) return false;
  return true;
}

int MultiIndex::total() const {
  int t = 0;
  for (int x : e_) t += x;
  return t;
}

bool MultiIndex::leq(const MultiIndex& o) const {
  for (size_t i = 0; i < e_.size(); ++i)
    if (e_[i] > o.e_[i]) return false;
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  MultiIndex r = *this;
  for (size_t i = 0; i < e_.size(); ++i) r.e_[i] += o.e_[i];
  return r;
}

std::optional<MultiIndex> MultiIndex::minus(const MultiIndex& o) const {
  MultiIndex r = *this;
  for (size_t i = 0; i < e_.size(); ++i) {
    r.e_[i] -= o.e_[i];
    if (r.e_[i] < 0) return std::nullopt;
  }
  return r;
}

Z MultiIndex::factorial() const {
  Z r = 1;
  for (int x : e_) r *= rsb::factorial(x);
  return r;
}

Z MultiIndex::binomial(const MultiIndex& l) const {
  Z r = 1;
  for (size_t i = 0; i < e_.size(); ++i) r *= rsb::binomial(e_[i], l.e_[i]);
  return r;
}

Q MultiIndex::scaled(const std::vector<Q>& s) const {
  Q r = 0;
  for (size_t i = 0; i < e_.size(); ++i) r += s.at(i) * e_[i];
  return r;
}

std::string MultiIndex::str() const {
  std::string r = "(";
  for (size_t i = 0; i < e_.size(); ++i) {
    if (i) r += ',';
    r += std::to_string(e_[i]);
  }
  return r + ")";
}

std::vector<MultiIndex> indices_below(const MultiIndex& k) {
  std::vector<MultiIndex> out;
  MultiIndex cur(k.dim());
  while (true) {
    out.push_back(cur);
    size_t i = k.dim();
    while (i > 0) {
      --i;
      if (cur[i] < k[i]) {
        ++cur[i];
        for (size_t j = i + 1; j < k.dim(); ++j) cur[j] = 0;
        break;
      }
      if (i == 0) return out;
    }
    if (k.dim() == 0) return out;
  }
}

std::vector<MultiIndex> indices_with_scaled_at_most(size_t dim, const std::vector<Q>& s, const Q& cap) {
  std::vector<MultiIndex> out;
  if (cap < 0) return out;
  MultiIndex cur(dim);
  std::function<void(size_t, Q)> rec = [&](size_t i, Q left) {
    if (i == dim) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; Q(s[i] * v) <= left; ++v) {
      cur[i] = v;
      rec(i + 1, left - s[i] * v);
    }
    cur[i] = 0;
  };
  rec(0, cap);
  return out;
}

void for_each_composition(const MultiIndex& k, size_t parts,
                          const std::function<void(const std::vector<MultiIndex>&)>& f) {
  std::vector<MultiIndex> cur(parts, MultiIndex(k.dim()));
  if (parts == 0) {
    if (k.is_zero()) f(cur);
    return;
  }
  std::function<void(size_t, const MultiIndex&)> rec = [&](size_t p, const MultiIndex& left) {
    if (p + 1 == parts) {
      cur[p] = left;
      f(cur);
      return;
    }
    for (const auto& l : indices_below(left)) {
      cur[p] = l;
      rec(p + 1, *left.minus(l));
    }
  };
  rec(0, k);
}

}  // namespace rsb
