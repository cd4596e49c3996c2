#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace thick {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

double to_double(const Rational& q);

// `p/q` canonical form; integers print without a denominator.
std::string to_string(const Rational& q);

// Accepts `-3`, `7/2`, `0.125`, `-1e-3`. Decimal input is converted exactly.
Rational parse_rational(std::string_view text);

bool is_integer(const Rational& q);
Integer floor(const Rational& q);

// Shortest decimal text that reads back as the same double.
std::string format_double(double v);

// Power with an integer exponent, exact.
Rational pow(const Rational& base, int exponent);

}  // namespace thick
