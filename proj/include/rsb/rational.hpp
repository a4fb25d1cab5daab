#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace rsb {

using Q = mpq_class;
using Z = mpz_class;

Q parse_rational(std::string_view s);
std::string to_string(const Q& q);
std::string to_string(const Z& z);

Z factorial(long n);
Z binomial(long n, long k);

inline bool is_zero(const Q& q) { return sgn(q) == 0; }

}  // namespace rsb
