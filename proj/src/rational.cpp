#include "mixmap/rational.hpp"

#include <cmath>
#include <cstdlib>

namespace mixmap {

Rational pow_rat(const Rational& base, long exp) {
    if (exp == 0) return Rational(1);
    bool neg = exp < 0;
    unsigned long e = neg ? static_cast<unsigned long>(-exp) : static_cast<unsigned long>(exp);
    Rational r = 1, b = base;
    while (e) {
        if (e & 1ul) r *= b;
        b *= b;
        e >>= 1ul;
    }
    if (neg) {
        if (r == 0) throw std::domain_error("pow_rat: zero base with negative exponent");
        r = Rational(1) / r;
    }
    return r;
}

BigInt floor_rat(const Rational& q) {
    BigInt n = numerator(q), d = denominator(q); // d > 0 in canonical form
    BigInt t = n / d;
    if (n < 0 && t * d != n) --t;
    return t;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

double log_big(const BigInt& v) {
    if (v <= 0) throw std::domain_error("log_big: nonpositive");
    unsigned bits = boost::multiprecision::msb(v); // index of top bit
    if (bits <= 900) return std::log(v.convert_to<double>());
    BigInt top = v >> (bits - 62);
    return std::log(top.convert_to<double>()) + static_cast<double>(bits - 62) * std::log(2.0);
}

double log_rat(const Rational& q) {
    if (q <= 0) throw std::domain_error("log_rat: nonpositive");
    return log_big(numerator(q)) - log_big(denominator(q));
}

Rational rational_from_decimal(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    std::string t = s;
    bool neg = false;
    size_t i = 0;
    if (t[0] == '+' || t[0] == '-') {
        neg = t[0] == '-';
        i = 1;
    }
    BigInt num = 0;
    BigInt den = 1;
    bool seen_digit = false, seen_dot = false;
    for (; i < t.size(); ++i) {
        char c = t[i];
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("bad rational literal: " + s);
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') throw std::invalid_argument("bad rational literal: " + s);
        seen_digit = true;
        num = num * 10 + (c - '0');
        if (seen_dot) den *= 10;
    }
    if (!seen_digit) throw std::invalid_argument("bad rational literal: " + s);
    Rational r(num, den);
    return neg ? -r : r;
}

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::domain_error("rational_from_double: nonfinite");
    return Rational(x); // exact: binary64 values are dyadic rationals
}

std::string to_fraction_string(const Rational& q) {
    std::string n = numerator(q).str();
    if (denominator(q) == 1) return n;
    return n + "/" + denominator(q).str();
}

Rational rational_from_fraction_string(const std::string& s) {
    auto pos = s.find('/');
    if (pos == std::string::npos) return Rational(BigInt(s));
    BigInt n(s.substr(0, pos)), d(s.substr(pos + 1));
    if (d <= 0) throw std::invalid_argument("bad fraction string: " + s);
    return Rational(n, d);
}

} // namespace mixmap
