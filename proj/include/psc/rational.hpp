#ifndef PSC_RATIONAL_HPP
#define PSC_RATIONAL_HPP

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace psc {

// All analysis-path probabilities are exact rationals. Floating point only
// appears on the sampling path (see counters::step) and in CSV rendering.
using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

/// Parses "a/b", an integer literal, or a decimal literal ("0.25" -> 1/4).
/// Decimal strings are expanded digit-by-digit, so the conversion is exact.
/// Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// Renders as "num/den" (always with the slash, e.g. "3/1").
std::string fraction_string(const Rational& r);

/// Decimal rendering with the given number of fractional digits, truncated
/// toward zero. Rendering only; never parsed back as a source of truth.
std::string decimal_string(const Rational& r, int digits = 12);

double to_double(const Rational& r);

/// Directed rational bounds lo <= e^x <= hi.
struct ExpEnclosure {
  Rational lo;
  Rational hi;
};

/// Encloses e^x for rational x >= 0 with hi - lo <= max_width, via a Taylor
/// partial sum with an explicit remainder bound plus argument halving.
ExpEnclosure exp_enclosure(const Rational& x, const Rational& max_width);

}  // namespace psc

#endif  // PSC_RATIONAL_HPP
