#include "unitsel/rational.hpp"

#include <cctype>
#include <cstdlib>
#include <string>

#include "unitsel/errors.hpp"

namespace unitsel {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// GMP treats a leading 0 as an octal prefix, so strip zeros first.
BigInt decimal_integer(std::string_view digits) {
  while (digits.size() > 1 && digits.front() == '0') digits.remove_prefix(1);
  return BigInt(std::string(digits));
}

BigInt pow10(unsigned exponent) {
  BigInt result = 1;
  for (unsigned i = 0; i < exponent; ++i) result *= 10;
  return result;
}

[[noreturn]] void fail(std::string_view text) {
  throw ParseError("not a rational number: \"" + std::string(text) + "\"");
}

Rational parse_decimal(std::string_view body, std::string_view original) {
  long exponent = 0;
  if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = body.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6) fail(original);
    exponent = std::strtol(std::string(exp_text).c_str(), nullptr, 10);
    if (exp_negative) exponent = -exponent;
    body = body.substr(0, e);
  }

  std::string_view int_part = body;
  std::string_view frac_part;
  if (auto dot = body.find('.'); dot != std::string_view::npos) {
    int_part = body.substr(0, dot);
    frac_part = body.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) fail(original);
  if (!int_part.empty() && !all_digits(int_part)) fail(original);
  if (!frac_part.empty() && !all_digits(frac_part)) fail(original);

  std::string digits = std::string(int_part) + std::string(frac_part);
  BigInt numerator = decimal_integer(digits);
  exponent -= static_cast<long>(frac_part.size());
  if (exponent >= 0) {
    return Rational(numerator * pow10(static_cast<unsigned>(exponent)));
  }
  return Rational(numerator, pow10(static_cast<unsigned>(-exponent)));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) fail(text);

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) fail(text);
    const BigInt d = decimal_integer(den);
    if (d == 0) throw ParseError("zero denominator in \"" + std::string(text) + "\"");
    value = Rational(decimal_integer(num), d);
  } else {
    value = parse_decimal(s, text);
  }
  return negative ? Rational(-value) : value;
}

std::string to_fraction_string(const Rational& value) {
  if (denominator(value) == 1) return numerator(value).str();
  return numerator(value).str() + "/" + denominator(value).str();
}

std::string to_decimal_string(const Rational& value, int precision) {
  if (precision < 0) precision = 0;
  const BigInt scale = pow10(static_cast<unsigned>(precision));
  BigInt num = numerator(value);
  const BigInt den = denominator(value);
  const bool negative = num < 0;
  if (negative) num = -num;

  // floor((2*num*scale + den) / (2*den)) rounds half away from zero.
  BigInt scaled = (2 * num * scale + den) / (2 * den);
  std::string digits = scaled.str();
  if (precision > 0) {
    if (digits.size() <= static_cast<std::size_t>(precision)) {
      digits.insert(0, static_cast<std::size_t>(precision) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(precision), ".");
  }
  if (negative && scaled != 0) digits.insert(0, "-");
  return digits;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace unitsel
