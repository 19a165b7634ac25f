// Corridor-certified joins between closed-form map pieces.
//
// A blend fills [a,b] given the derivative polynomials A_a, A_b of the
// adjacent pieces. The derivative of the join is
//   s'(v) = A_a(v) S((a+w-v)/w) + g S((v-a)/w)     on [a, a+w]
//   s'(v) = g                                      on [a+w, b-w]
//   s'(v) = g S((b-v)/w) + A_b(v) S((v-(b-w))/w)   on [b-w, b]
// with S the order-p smoothstep. Because S(u)+S(1-u)=1, each fade is a
// pointwise convex combination of A and g, so s' stays inside
// [min(range(A), g), max(range(A), g)]: the corridor certificate is exact.
// The plateau g is solved so the total increment equals delta_val exactly,
// and the junction jets of s' match A_a at a and A_b at b through order p-1.
//
// The fade width w is found by halving from w_start until the corridor
// [lo, hi] certifies; failure after max_halvings is a hard error.
#pragma once

#include "mixmap/poly.hpp"

namespace mixmap {

struct BlendSpec {
    Rational a, b;       // host-coordinate endpoints, a < b
    Poly A_a, A_b;       // adjacent derivative polys in the host coordinate
    Rational delta_val;  // required increment s(b) - s(a)
    Rational lo, hi;     // admissible derivative corridor (signed), lo <= hi
    int p = 3;           // smoothstep order; use k_max + 1
    Rational w_start;    // initial fade width, <= (b-a)/2
    int max_halvings = 64;
};

struct BlendResult {
    Rational w, gamma;
    // Value polys, each in the local coordinate of its own segment
    // (xi = v - segment start), normalized to s(a) = 0:
    Poly left;  // on [a, a+w]
    Poly mid;   // on [a+w, b-w]
    Poly right; // on [b-w, b]
};

BlendResult build_blend(const BlendSpec& spec);

} // namespace mixmap
