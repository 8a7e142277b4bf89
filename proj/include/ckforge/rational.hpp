#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>

namespace ckforge {

using Integer = mpz_class;
using Rational = mpq_class;

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

// "-3/2", "7", "0"
std::string to_string(const Rational& q);
Rational parse_rational(std::string_view text);

Integer factorial(unsigned n);

std::size_t hash_value(const Integer& z);
std::size_t hash_value(const Rational& q);

}  // namespace ckforge
