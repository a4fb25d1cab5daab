#pragma once

#include "rsb/bseries.hpp"
#include "rsb/classical.hpp"
#include "rsb/enumerate.hpp"
#include "rsb/model.hpp"
#include "rsb/random.hpp"
#include "rsb/spec.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rsb {

struct SuiteResult {
  std::string id;
  std::string title;
  long checked = 0;
  long failed = 0;
  std::vector<std::string> counterexamples;  // first few failures
  std::vector<std::pair<std::string, std::string>> details;
  double seconds = 0;

  bool pass() const { return failed == 0 && checked > 0; }
  void check(bool ok, const std::function<std::string()>& describe);
  void note(const std::string& key, const std::string& value) { details.emplace_back(key, value); }
};

struct VerifyContext {
  EquationSpec main_spec;  // bundled Phi^4-like spec unless overridden
  EquationSpec desk_spec;  // d = 1 spec for desk-scale and numerical suites
  Cutoff main_cut;
  Cutoff desk_cut;
  Cutoff bseries_cut;  // desk spec, used by the B-series theorem suite
  std::uint64_t seed = 42;
  ModelConfig model;
};

// Seeded characters shared by the B-series suite and the CLI.
struct BSeriesCharacters {
  BMinus alpha;        // unit coefficient 1, random on roughly a third of T
  TPlusChar beta;      // random X values, random on half of the planted trees
  TreeChar sub;        // three random values on trees with <= 2 edges
  BMinus alpha_small;  // alpha restricted to trees with <= 2 edges
  BMinus sub_series;   // 1 + sub, as a B_- series
};
BSeriesCharacters random_bseries_characters(const EquationSpec& spec, const Cutoff& cut, Rng& rng);
classical::Character random_classical_character(Rng& rng, int max_nodes, const Q& unit);

VerifyContext default_context(const std::string& spec_dir, std::uint64_t seed);

SuiteResult suite_classical_baseline(const VerifyContext& c);
SuiteResult suite_classical_theorems(const VerifyContext& c);
SuiteResult suite_classical_cointeraction(const VerifyContext& c);
SuiteResult suite_grafting_identities(const VerifyContext& c);
SuiteResult suite_star2_associativity(const VerifyContext& c);
SuiteResult suite_duality(const VerifyContext& c);
SuiteResult suite_cointeraction(const VerifyContext& c, int betas = 10);
SuiteResult suite_star_morphism(const VerifyContext& c);
SuiteResult suite_bseries_theorems(const VerifyContext& c, int trials = 20);
SuiteResult suite_model(const VerifyContext& c);

struct NamedSuite {
  std::string id;
  std::function<SuiteResult(const VerifyContext&)> run;
};
std::vector<NamedSuite> all_suites();

// Deterministic unless with_timings is set.
std::string report_json(const VerifyContext& c, const std::vector<SuiteResult>& results, bool with_timings);
std::string report_text(const std::vector<SuiteResult>& results, bool with_timings);

}  // namespace rsb
