#include "rsb/rational.hpp"

#include "rsb/errors.hpp"

#include <cctype>

namespace rsb {

namespace {

// Accepts "p", "p/q", decimals "1.25", and sums/differences such as "-5/2-1/100".
Q parse_term(std::string_view s) {
  if (s.empty()) throw SpecError("empty rational");
  auto dot = s.find('.');
  if (dot != std::string_view::npos) {
    std::string digits(s.substr(0, dot));
    std::string frac(s.substr(dot + 1));
    bool neg = !digits.empty() && digits[0] == '-';
    if (neg || (!digits.empty() && digits[0] == '+')) digits.erase(0, 1);
    if (digits.empty()) digits = "0";
    Z den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    Q q(Z(digits + frac), den);
    q.canonicalize();
    return neg ? Q(-q) : q;
  }
  Q q;
  if (q.set_str(std::string(s), 10) != 0) throw SpecError("bad rational '" + std::string(s) + "'");
  if (sgn(q.get_den()) == 0) throw SpecError("zero denominator in '" + std::string(s) + "'");
  q.canonicalize();
  return q;
}

}  // namespace

Q parse_rational(std::string_view s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  if (t.empty()) throw SpecError("empty rational");
  Q total = 0;
  size_t start = 0;
  for (size_t i = 1; i <= t.size(); ++i) {
    if (i == t.size() || ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != '/')) {
      std::string_view part(t.data() + start, i - start);
      if (!part.empty() && part[0] == '+') part.remove_prefix(1);
      total += parse_term(part);
      start = i;
    }
  }
  return total;
}

std::string to_string(const Q& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const Z& z) { return z.get_str(); }

Z factorial(long n) {
  Z r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

Z binomial(long n, long k) {
  if (k < 0 || k > n) return 0;
  Z r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

}  // namespace rsb
