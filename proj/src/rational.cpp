#include "psc/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace psc {

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

// GMP's string constructor auto-detects octal/hex from "0"/"0x" prefixes, so
// normalize the sign and strip leading zeros before handing the digits over.
Integer parse_integer(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  while (s.size() > 1 && s[0] == '0') s.remove_prefix(1);
  const Integer value{std::string(s)};
  return negative ? Integer(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");

  if (auto slash = s.find('/'); slash != std::string::npos) {
    const std::string num = s.substr(0, slash);
    const std::string den = s.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den)) {
      throw std::invalid_argument("malformed fraction: " + s);
    }
    const Integer d = parse_integer(den);
    if (d == 0) throw std::invalid_argument("zero denominator: " + s);
    return Rational(parse_integer(num), d);
  }

  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    const std::string frac = s.substr(dot + 1);
    if (digits == "-" || digits == "+" || digits.empty() ||
        !is_integer_literal(digits)) {
      throw std::invalid_argument("malformed decimal: " + s);
    }
    Integer den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    return Rational(parse_integer(digits), den);
  }

  if (!is_integer_literal(s)) {
    throw std::invalid_argument("malformed rational: " + s);
  }
  return Rational(parse_integer(s));
}

std::string fraction_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

std::string decimal_string(const Rational& r, int digits) {
  const bool negative = r < 0;
  Rational a = negative ? Rational(-r) : r;
  Integer scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const Integer scaled = numerator(a) * scale / denominator(a);
  const Integer whole = scaled / scale;
  std::string out = whole.str();
  if (digits > 0) {
    std::string frac = Integer(scaled % scale).str();
    frac.insert(frac.begin(), static_cast<std::size_t>(digits) - frac.size(),
                '0');
    out += "." + frac;
  }
  return negative ? "-" + out : out;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

ExpEnclosure exp_enclosure(const Rational& x, const Rational& max_width) {
  if (x < 0) throw std::invalid_argument("exp_enclosure requires x >= 0");
  if (x == 0) return {Rational(1), Rational(1)};

  // Halve the argument until y <= 1/2, then square the bounds back up.
  Rational y = x;
  int halvings = 0;
  while (y > Rational(1, 2)) {
    y /= 2;
    ++halvings;
  }

  for (int terms = 24;; terms *= 2) {
    Rational term = 1;
    Rational sum = 1;
    for (int i = 1; i <= terms; ++i) {
      term *= y;
      term /= i;
      sum += term;
    }
    // Remainder of the series after `terms` terms: next term times the
    // geometric bound 1/(1 - y) <= 2 for y <= 1/2.
    Rational rem = term * y / (terms + 1) * 2;
    Rational lo = sum;
    Rational hi = sum + rem;
    for (int i = 0; i < halvings; ++i) {
      lo *= lo;
      hi *= hi;
    }
    if (hi - lo <= max_width) return {lo, hi};
  }
}

}  // namespace psc
