// Dense univariate polynomials over the rationals.
// Used for piece definitions; degrees stay small (<= ~14) so dense is right.
#pragma once

#include "mixmap/rational.hpp"

#include <vector>

namespace mixmap {

struct PolyD {
    std::vector<double> c; // c[i] multiplies x^i
    double eval(double x) const {
        double r = 0.0;
        for (size_t i = c.size(); i-- > 0;) r = r * x + c[i];
        return r;
    }
};

struct Poly {
    std::vector<Rational> c; // c[i] multiplies x^i; trailing zeros trimmed; empty = 0

    static Poly constant(const Rational& a);
    static Poly linear(const Rational& a0, const Rational& a1); // a0 + a1 x

    void trim();
    int degree() const { return static_cast<int>(c.size()) - 1; } // -1 for zero poly

    Rational eval(const Rational& x) const;
    Poly derivative() const;
    Poly antiderivative() const; // constant term 0
    Rational integrate(const Rational& a, const Rational& b) const;

    // p(s*x + t)
    Poly compose_affine(const Rational& s, const Rational& t) const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(const Rational& k) const;
    bool operator==(const Poly& o) const { return c == o.c; }

    PolyD to_double() const;
};

} // namespace mixmap
