// Normalized beta smoothstep: S_p(u) = int_0^u t^{p-1}(1-t)^{p-1} dt, scaled so S_p(1)=1.
// S_p(u) + S_p(1-u) = 1 identically, and S_p^{(j)} vanishes at 0 and 1 for 1 <= j <= p-1.
#pragma once

#include "mixmap/poly.hpp"

namespace mixmap {

Poly smoothstep_poly(int p); // degree 2p-1

} // namespace mixmap
