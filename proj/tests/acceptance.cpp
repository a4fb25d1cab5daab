// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// The numerical tolerances (1e-12 polynomial, 1e-6 factorisation, slope >= deg - 0.2)
// live in suite_model; runtime limits are pinned below.

#include "rsb/verify.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace rsb;

namespace {

struct Criterion {
  int number;
  std::string name;
  std::function<SuiteResult(const VerifyContext&)> run;
  std::optional<double> limit_seconds;
};

struct Captured {
  std::string out;
  int status = -1;
};

Captured capture(const std::string& cmd) {
  Captured c;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return c;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) c.out.append(buf.data(), n);
  c.status = pclose(p);
  return c;
}

std::string seconds(double s) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(2) << s << " s";
  return o.str();
}

}  // namespace

int main() {
  const VerifyContext ctx = default_context(RSB_SPEC_DIR, 42);
  const std::vector<Criterion> criteria{
      {1, "classical baseline", [](const VerifyContext& c) { return suite_classical_baseline(c); }, 10.0},
      {2, "classical composition and substitution", [](const VerifyContext& c) { return suite_classical_theorems(c); }, 60.0},
      {3, "classical co-interaction", [](const VerifyContext& c) { return suite_classical_cointeraction(c); }, std::nullopt},
      {4, "multi-pre-Lie and non-commutation", [](const VerifyContext& c) { return suite_grafting_identities(c); }, std::nullopt},
      {5, "star_2 associativity", [](const VerifyContext& c) { return suite_star2_associativity(c); }, std::nullopt},
      {6, "star_2 / Delta_2 duality", [](const VerifyContext& c) { return suite_duality(c); }, std::nullopt},
      {7, "decorated co-interaction", [](const VerifyContext& c) { return suite_cointeraction(c, 10); }, std::nullopt},
      {8, "star_2 morphism of elementary differentials", [](const VerifyContext& c) { return suite_star_morphism(c); },
       std::nullopt},
      {9, "composition, substitution, root substitution", [](const VerifyContext& c) { return suite_bseries_theorems(c, 20); },
       300.0},
      {10, "numerical model", [](const VerifyContext& c) { return suite_model(c); }, 120.0},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    const SuiteResult r = cr.run(ctx);
    const bool in_time = !cr.limit_seconds || r.seconds < *cr.limit_seconds;
    const bool ok = r.pass() && in_time;
    if (!ok) ++failed;
    std::cout << (ok ? "PASS" : "FAIL") << "  C" << cr.number << " " << cr.name << ": " << r.checked << " checks, "
              << r.failed << " failed, " << seconds(r.seconds);
    if (cr.limit_seconds) std::cout << " (limit " << seconds(*cr.limit_seconds) << ")";
    std::cout << "\n";
    for (const auto& ce : r.counterexamples) std::cout << "      " << ce << "\n";
  }

  const char* env = std::getenv("RSB_CLI_PATH");
  const std::string cli = env ? env : RSB_CLI_DEFAULT;
  const std::string cmd = "'" + cli + "' --format json verify all --seed 42";
  const Captured a = capture(cmd), b = capture(cmd);
  const bool same = a.status == 0 && b.status == 0 && !a.out.empty() && a.out == b.out;
  if (!same) ++failed;
  std::cout << (same ? "PASS" : "FAIL") << "  C11 determinism of verify all --seed 42: " << a.out.size() << " and "
            << b.out.size() << " bytes, exit " << a.status << "/" << b.status << (same ? ", identical" : ", differ")
            << "\n";
  return failed == 0 ? 0 : 1;
}
