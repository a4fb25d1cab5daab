#include "rsb/spec.hpp"

#include "rsb/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace rsb {

using nlohmann::json;

namespace {

Q rational_of(const json& j) {
  if (j.is_number_integer()) return Q(j.get<long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << j.get<double>();
    return parse_rational(os.str());
  }
  throw SpecError("expected a rational, got " + j.dump());
}

std::string norm_noise(const std::string& l) { return l == "0" ? "" : l; }

}  // namespace

Q EquationSpec::kernel_degree(const std::string& t) const {
  auto it = kernels.find(t);
  if (it == kernels.end()) throw UnknownLabel("kernel label '" + t + "'");
  return it->second;
}

Q EquationSpec::noise_degree(const std::string& l) const {
  if (l.empty() || l == "0") return 0;
  auto it = noises.find(l);
  if (it == noises.end()) throw UnknownLabel("noise label '" + l + "'");
  return it->second;
}

const Dependency* EquationSpec::dependency(const std::string& t, const std::string& l) const {
  auto it = deps.find({t, norm_noise(l)});
  return it == deps.end() ? nullptr : &it->second;
}

void EquationSpec::validate() const {
  if (d < 0) throw SpecError("dimension must be >= 0");
  if (s.size() != dim()) throw SpecError("scaling must have d+1 entries");
  for (const auto& x : s)
    if (x <= 0) throw SpecError("scaling entries must be positive");
  if (kernels.empty()) throw SpecError("at least one kernel label required");
  for (const auto& [k, v] : kernels)
    if (noises.count(k) || k == "0") throw SpecError("label '" + k + "' is both kernel and noise");
  for (const auto& [key, dep] : deps) {
    kernel_degree(key.first);
    noise_degree(key.second);
    for (const auto& a : dep.vars) {
      kernel_degree(a.label);
      if (a.m.dim() != dim()) throw SpecError("dependency multi-index of wrong length");
    }
    if (dep.arity && *dep.arity < 0) throw SpecError("arity must be >= 0");
  }
  if (poly_degree_cap < 0) throw SpecError("poly_degree_cap must be >= 0");
}

namespace {

EquationSpec parse_spec_json(const std::string& text);

}  // namespace

EquationSpec parse_spec(const std::string& text) {
  try {
    return parse_spec_json(text);
  } catch (const json::exception& e) {
    throw SpecError(e.what());
  }
}

namespace {

EquationSpec parse_spec_json(const std::string& text) {
  json j = json::parse(text);
  EquationSpec sp;
  sp.d = j.at("dimension").get<int>();
  for (const auto& x : j.at("scaling")) sp.s.push_back(rational_of(x));
  for (const auto& [k, v] : j.at("kernel_labels").items()) sp.kernels[k] = rational_of(v);
  for (const auto& [k, v] : j.at("noise_labels").items()) {
    if (k == "0") {
      if (rational_of(v) != 0) throw SpecError("noise 0 must have degree 0");
      continue;
    }
    sp.noises[k] = rational_of(v);
  }
  for (const auto& e : j.at("dependency")) {
    std::string t = e.at("target").get<std::string>();
    std::string l = norm_noise(e.at("noise").get<std::string>());
    Dependency dep;
    for (const auto& v : e.at("vars")) {
      std::vector<int> m = v.at(1).get<std::vector<int>>();
      dep.vars.push_back({v.at(0).get<std::string>(), MultiIndex(m)});
    }
    std::sort(dep.vars.begin(), dep.vars.end());
    dep.vars.erase(std::unique(dep.vars.begin(), dep.vars.end()), dep.vars.end());
    if (e.contains("arity") && !e.at("arity").is_null()) dep.arity = e.at("arity").get<int>();
    if (!sp.deps.emplace(std::make_pair(t, l), dep).second)
      throw SpecError("duplicate dependency entry for (" + t + "," + e.at("noise").get<std::string>() + ")");
  }
  if (j.contains("poly_degree_cap")) sp.poly_degree_cap = rational_of(j.at("poly_degree_cap"));
  if (j.contains("gamma")) sp.gamma = rational_of(j.at("gamma"));
  if (j.contains("max_edges")) sp.max_edges = j.at("max_edges").get<int>();
  sp.validate();
  return sp;
}

}  // namespace

EquationSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string spec_to_json(const EquationSpec& sp) {
  json j;
  j["dimension"] = sp.d;
  j["scaling"] = json::array();
  for (const auto& x : sp.s) j["scaling"].push_back(to_string(x));
  j["kernel_labels"] = json::object();
  for (const auto& [k, v] : sp.kernels) j["kernel_labels"][k] = to_string(v);
  j["noise_labels"] = json::object();
  j["noise_labels"]["0"] = "0";
  for (const auto& [k, v] : sp.noises) j["noise_labels"][k] = to_string(v);
  j["dependency"] = json::array();
  for (const auto& [key, dep] : sp.deps) {
    json e;
    e["target"] = key.first;
    e["noise"] = key.second.empty() ? "0" : key.second;
    e["vars"] = json::array();
    for (const auto& a : dep.vars) e["vars"].push_back(json::array({a.label, a.m.entries()}));
    if (dep.arity) e["arity"] = *dep.arity;
    j["dependency"].push_back(e);
  }
  j["poly_degree_cap"] = to_string(sp.poly_degree_cap);
  if (sp.gamma) j["gamma"] = to_string(*sp.gamma);
  if (sp.max_edges) j["max_edges"] = *sp.max_edges;
  return j.dump(2);
}

}  // namespace rsb
