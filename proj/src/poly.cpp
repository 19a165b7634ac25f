#include "mixmap/poly.hpp"

namespace mixmap {

Poly Poly::constant(const Rational& a) {
    Poly p;
    if (a != 0) p.c = {a};
    return p;
}

Poly Poly::linear(const Rational& a0, const Rational& a1) {
    Poly p;
    p.c = {a0, a1};
    p.trim();
    return p;
}

void Poly::trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

Rational Poly::eval(const Rational& x) const {
    Rational r = 0;
    for (size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

Poly Poly::derivative() const {
    Poly d;
    if (c.size() <= 1) return d;
    d.c.resize(c.size() - 1);
    for (size_t i = 1; i < c.size(); ++i) d.c[i - 1] = c[i] * Rational(static_cast<long>(i));
    d.trim();
    return d;
}

Poly Poly::antiderivative() const {
    Poly a;
    if (c.empty()) return a;
    a.c.resize(c.size() + 1);
    a.c[0] = 0;
    for (size_t i = 0; i < c.size(); ++i)
        a.c[i + 1] = c[i] / Rational(static_cast<long>(i + 1));
    a.trim();
    return a;
}

Rational Poly::integrate(const Rational& a, const Rational& b) const {
    Poly A = antiderivative();
    return A.eval(b) - A.eval(a);
}

Poly Poly::compose_affine(const Rational& s, const Rational& t) const {
    // Horner: p(sx+t) = (...(c_n (sx+t) + c_{n-1})(sx+t) + ...)
    Poly lin = Poly::linear(t, s);
    Poly r;
    for (size_t i = c.size(); i-- > 0;) {
        r = r * lin + Poly::constant(c[i]);
    }
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r;
    r.c.resize(std::max(c.size(), o.c.size()), Rational(0));
    for (size_t i = 0; i < c.size(); ++i) r.c[i] += c[i];
    for (size_t i = 0; i < o.c.size(); ++i) r.c[i] += o.c[i];
    r.trim();
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    Poly r;
    r.c.resize(std::max(c.size(), o.c.size()), Rational(0));
    for (size_t i = 0; i < c.size(); ++i) r.c[i] += c[i];
    for (size_t i = 0; i < o.c.size(); ++i) r.c[i] -= o.c[i];
    r.trim();
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r;
    if (c.empty() || o.c.empty()) return r;
    r.c.assign(c.size() + o.c.size() - 1, Rational(0));
    for (size_t i = 0; i < c.size(); ++i)
        for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
    r.trim();
    return r;
}

Poly Poly::operator*(const Rational& k) const {
    Poly r = *this;
    for (auto& x : r.c) x *= k;
    r.trim();
    return r;
}

PolyD Poly::to_double() const {
    PolyD d;
    d.c.resize(c.size());
    for (size_t i = 0; i < c.size(); ++i) d.c[i] = mixmap::to_double(c[i]);
    return d;
}

} // namespace mixmap
