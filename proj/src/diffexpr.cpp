#include "rsb/diffexpr.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace rsb {

DiffExpr DiffExpr::constant(const Q& c) {
  DiffExpr e;
  e.add(Monomial{}, c);
  return e;
}

DiffExpr DiffExpr::variable(const Edge& a) {
  DiffExpr e;
  e.add(Monomial{{{a, 1}}, {}}, 1);
  return e;
}

DiffExpr DiffExpr::atom(const EquationSpec& spec, const std::string& t, const std::string& l) {
  DiffExpr e;
  if (spec.dependency(t, l)) e.add(Monomial{{}, {Atom{t, l == "0" ? "" : l, {}}}}, 1);
  return e;
}

void DiffExpr::add(const Monomial& m, const Q& c) { add_term(terms_, m, c); }

DiffExpr& DiffExpr::operator+=(const DiffExpr& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

DiffExpr DiffExpr::operator+(const DiffExpr& o) const {
  DiffExpr r = *this;
  r += o;
  return r;
}

DiffExpr DiffExpr::operator-(const DiffExpr& o) const { return *this + o * Q(-1); }

Monomial monomial_product(const Monomial& a, const Monomial& b) {
  Monomial r;
  size_t i = 0, j = 0;
  while (i < a.z.size() || j < b.z.size()) {
    if (j == b.z.size() || (i < a.z.size() && a.z[i].first < b.z[j].first)) r.z.push_back(a.z[i++]);
    else if (i == a.z.size() || b.z[j].first < a.z[i].first) r.z.push_back(b.z[j++]);
    else {
      r.z.push_back({a.z[i].first, a.z[i].second + b.z[j].second});
      ++i;
      ++j;
    }
  }
  r.atoms.reserve(a.atoms.size() + b.atoms.size());
  std::merge(a.atoms.begin(), a.atoms.end(), b.atoms.begin(), b.atoms.end(), std::back_inserter(r.atoms));
  return r;
}

DiffExpr DiffExpr::operator*(const DiffExpr& o) const {
  DiffExpr r;
  for (const auto& [m1, c1] : terms_)
    for (const auto& [m2, c2] : o.terms_) r.add(monomial_product(m1, m2), c1 * c2);
  return r;
}

DiffExpr DiffExpr::operator*(const Q& c) const {
  DiffExpr r;
  if (rsb::is_zero(c)) return r;
  for (const auto& [m, v] : terms_) r.terms_.emplace(m, v * c);
  return r;
}

namespace {

std::string var_str(const Edge& a) { return "Z[" + a.str() + "]"; }

std::string atom_str(const Atom& at) {
  std::string r;
  for (const auto& a : at.derivs) r += "D[" + a.str() + "]";
  return r + "F[" + at.t + "," + (at.l.empty() ? "0" : at.l) + "]";
}

void derive_monomial(const EquationSpec& spec, const Monomial& m, const Q& c, const Edge& a, DiffExpr& out) {
  for (size_t i = 0; i < m.z.size(); ++i) {
    if (m.z[i].first != a) continue;
    Monomial r = m;
    int p = r.z[i].second;
    if (p == 1) r.z.erase(r.z.begin() + static_cast<long>(i));
    else r.z[i].second = p - 1;
    out.add(r, c * p);
  }
  for (size_t i = 0; i < m.atoms.size(); ++i) {
    if (i > 0 && m.atoms[i] == m.atoms[i - 1]) continue;  // counted below via multiplicity
    const Atom& at = m.atoms[i];
    const Dependency* dep = spec.dependency(at.t, at.l);
    if (!dep) continue;
    if (std::find(dep->vars.begin(), dep->vars.end(), a) == dep->vars.end()) continue;
    if (dep->arity && static_cast<int>(at.derivs.size()) >= *dep->arity) continue;
    size_t mult = 1;
    while (i + mult < m.atoms.size() && m.atoms[i + mult] == at) ++mult;
    Monomial r = m;
    r.atoms.erase(r.atoms.begin() + static_cast<long>(i));
    Atom na = at;
    na.derivs.insert(std::upper_bound(na.derivs.begin(), na.derivs.end(), a), a);
    r.atoms.insert(std::upper_bound(r.atoms.begin(), r.atoms.end(), na), na);
    out.add(r, c * static_cast<long>(mult));
  }
}

DiffExpr partial_unit(const EquationSpec& spec, const DiffExpr& e, size_t i) {
  DiffExpr out;
  for (const auto& [m, c] : e.terms()) {
    std::set<Edge> vars;
    for (const auto& [v, p] : m.z) vars.insert(v);
    for (const auto& at : m.atoms)
      if (const Dependency* dep = spec.dependency(at.t, at.l)) vars.insert(dep->vars.begin(), dep->vars.end());
    for (const auto& a : vars) {
      DiffExpr d;
      derive_monomial(spec, m, c, a, d);
      if (d.is_zero()) continue;
      Edge up{a.label, a.m + MultiIndex::unit(a.m.dim(), i)};
      out += d * DiffExpr::variable(up);
    }
  }
  return out;
}

}  // namespace

std::string DiffExpr::str() const {
  if (terms_.empty()) return "0";
  std::string r;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (sgn(c) < 0) r += first ? "-" : " - ";
    else if (!first) r += " + ";
    first = false;
    Q a = abs(c);
    std::string body;
    for (const auto& [v, p] : m.z) body += (body.empty() ? "" : "*") + var_str(v) + (p > 1 ? "^" + std::to_string(p) : "");
    for (const auto& at : m.atoms) body += (body.empty() ? "" : "*") + atom_str(at);
    if (body.empty()) r += to_string(a);
    else r += (a == 1 ? "" : to_string(a) + " ") + body;
  }
  return r;
}

std::string DiffExpr::json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [m, c] : terms_) {
    nlohmann::json t;
    t["coeff"] = to_string(c);
    t["Z"] = nlohmann::json::array();
    for (const auto& [v, p] : m.z) t["Z"].push_back({v.label, v.m.entries(), p});
    t["atoms"] = nlohmann::json::array();
    for (const auto& at : m.atoms) {
      nlohmann::json d = nlohmann::json::array();
      for (const auto& a : at.derivs) d.push_back({a.label, a.m.entries()});
      t["atoms"].push_back({at.t, at.l.empty() ? "0" : at.l, d});
    }
    j.push_back(t);
  }
  return j.dump();
}

DiffExpr derive_D(const EquationSpec& spec, const DiffExpr& e, const Edge& a) {
  DiffExpr out;
  for (const auto& [m, c] : e.terms()) derive_monomial(spec, m, c, a, out);
  return out;
}

DiffExpr derive_partial(const EquationSpec& spec, const DiffExpr& e, const MultiIndex& k) {
  DiffExpr r = e;
  for (size_t i = 0; i < k.dim(); ++i)
    for (int p = 0; p < k[i]; ++p) r = partial_unit(spec, r, i);
  return r;
}

DiffExpr elementary_differential(const EquationSpec& spec, const std::string& t, const Tree& tau) {
  DiffExpr root = DiffExpr::atom(spec, t, tau.noise());
  for (const auto& b : tau.branches()) {
    if (root.is_zero()) return root;
    root = derive_D(spec, root, b.edge);
  }
  root = derive_partial(spec, root, tau.k());
  for (const auto& b : tau.branches()) {
    if (root.is_zero()) return root;
    root = root * elementary_differential(spec, b.edge.label, b.sub);
  }
  return root;
}

DiffExpr elementary_differential(const EquationSpec& spec, const std::string& t, const Comb& c) {
  DiffExpr r;
  for (const auto& [tau, v] : c) r += elementary_differential(spec, t, tau) * v;
  return r;
}

}  // namespace rsb
