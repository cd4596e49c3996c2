#include "thick/rational.hpp"

#include "thick/errors.hpp"

#include <cctype>
#include <charconv>

namespace thick {

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::string to_string(const Rational& q) {
  const Integer num = boost::multiprecision::numerator(q);
  const Integer den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

namespace {

Integer parse_integer(std::string_view digits) {
  if (digits.empty()) throw DomainError("empty integer literal");
  for (char c : digits)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw DomainError("malformed number '" + std::string(digits) + "'");
  return Integer(std::string(digits));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Rational value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const Integer num = parse_integer(text.substr(0, slash));
    const Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
    value = Rational(num, den);
  } else {
    std::string_view mantissa = text;
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      mantissa = text.substr(0, e);
      std::string_view exp_text = text.substr(e + 1);
      bool exp_negative = false;
      if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
        exp_negative = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      exponent = parse_integer(exp_text).convert_to<long>();
      if (exp_negative) exponent = -exponent;
    }
    std::string digits;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
      digits = std::string(mantissa.substr(0, dot)) + std::string(mantissa.substr(dot + 1));
      exponent -= static_cast<long>(mantissa.size() - dot - 1);
    } else {
      digits = std::string(mantissa);
    }
    if (digits.empty()) throw DomainError("malformed number '" + std::string(text) + "'");
    value = Rational(parse_integer(digits));
    Integer scale = 1;
    for (long i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) scale *= 10;
    value = exponent < 0 ? value / Rational(scale) : value * Rational(scale);
  }
  return negative ? Rational(-value) : value;
}

bool is_integer(const Rational& q) { return boost::multiprecision::denominator(q) == 1; }

Integer floor(const Rational& q) {
  const Integer num = boost::multiprecision::numerator(q);
  const Integer den = boost::multiprecision::denominator(q);
  Integer quotient = num / den;
  if (num % den != 0 && num < 0) quotient -= 1;
  return quotient;
}

Rational pow(const Rational& base, int exponent) {
  Rational result = 1;
  Rational factor = exponent < 0 ? Rational(1 / base) : base;
  for (int i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) result *= factor;
  return result;
}

std::string format_double(double v) {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return std::string(buf, end);
}

}  // namespace thick
