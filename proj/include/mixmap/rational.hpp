// Exact arithmetic used for all breakpoints and piece coefficients.
// Doubles are only a projection for evaluation hot paths.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace mixmap {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow_int(const BigInt& base, unsigned exp) {
    BigInt r = 1, b = base;
    while (exp) {
        if (exp & 1u) r *= b;
        b *= b;
        exp >>= 1u;
    }
    return r;
}

// base^exp with exp possibly negative; base must be nonzero for exp < 0.
Rational pow_rat(const Rational& base, long exp);

// floor as a true integer floor (works for negatives).
BigInt floor_rat(const Rational& q);

double to_double(const Rational& q);

// Natural log that survives values far outside double range.
double log_big(const BigInt& v);
double log_rat(const Rational& q);

// Parses "14", "14.5", "-0.125" into an exact rational.
Rational rational_from_decimal(const std::string& s);

// Exact round trip for binary64 values.
Rational rational_from_double(double x);

// "p/q" (or "p" when q == 1); inverse of rational_from_fraction_string.
std::string to_fraction_string(const Rational& q);
Rational rational_from_fraction_string(const std::string& s);

} // namespace mixmap
