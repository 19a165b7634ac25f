#include "mixmap/smoothstep.hpp"

namespace mixmap {

Poly smoothstep_poly(int p) {
    if (p < 1) throw std::invalid_argument("smoothstep order must be >= 1");
    Poly t = Poly::linear(0, 1);
    Poly one_minus_t = Poly::linear(1, -1);
    Poly kern = Poly::constant(1);
    for (int i = 0; i < p - 1; ++i) kern = kern * t;
    for (int i = 0; i < p - 1; ++i) kern = kern * one_minus_t;
    Poly S = kern.antiderivative();
    Rational norm = S.eval(1);
    return S * (Rational(1) / norm);
}

} // namespace mixmap
