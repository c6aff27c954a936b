#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace unitsel {

// Exact rationals backed by GMP. Expression templates are disabled so that
// std::max / std::min and auto deduce plain values.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

// Accepts "p/q", integers, and decimals with an optional exponent
// ("0.087" -> 87/1000, "1.5e-2" -> 3/200). Throws ParseError.
Rational parse_rational(std::string_view text);

// Canonical "p/q" form, or "p" when the denominator is 1.
std::string to_fraction_string(const Rational& value);

// Rounds half away from zero to `precision` digits after the point.
// Never prints "-0.000".
std::string to_decimal_string(const Rational& value, int precision = 3);

double to_double(const Rational& value);

}  // namespace unitsel
