#include "mixmap/params.hpp"

#include <algorithm>
#include <stdexcept>

namespace mixmap {

Rational MapParams::lambda_r() const { return pow_rat(lambda, r); }
Rational MapParams::delta() const { return pow_rat(lambda, -r); }
Rational MapParams::cap_C() const { return pow_rat(lambda, 2L * r) / 4; }
Rational MapParams::cap_C0() const { return Rational(3, 2) * lambda_r(); }
Rational MapParams::cap_C1() const { return pow_rat(lambda, static_cast<long>(r) * (2L * r - 1)); }
Rational MapParams::scale(int k) const { return pow_rat(lambda, -static_cast<long>(k) * r); }

MapParams MapParams::make(const Rational& lambda, int r, int k_max) {
    if (lambda < 14) throw std::invalid_argument("lambda must be >= 14");
    if (r < 1) throw std::invalid_argument("r must be >= 1");
    if (k_max < 0) k_max = 2 * r;
    if (k_max < r) throw std::invalid_argument("k_max must be >= r");
    MapParams p;
    p.lambda = lambda;
    p.r = r;
    p.k_max = k_max;
    return p;
}

BigInt M_of(const Rational& lambda, int n) {
    if (n < 1) throw std::invalid_argument("level index must be >= 1");
    Rational q = pow_rat(lambda, n) / Rational(2L * n * n);
    return 2 * floor_rat(q) - 1;
}

Rational LevelConstants::t(const BigInt& i) const {
    return x + Rational(i) * lap_width;
}

LevelConstants level_constants(const MapParams& p, int n) {
    if (n < 1) throw std::invalid_argument("level index must be >= 1");
    LevelConstants lc;
    lc.n = n;
    lc.M = M_of(p.lambda, n);
    long nn = n;
    lc.x = Rational(nn + 1, nn);
    lc.y = lc.x + Rational(1, 2 * nn * nn);
    lc.m = Rational(1) - Rational(1, (nn + 1) * (nn + 1));
    lc.k = Rational(2) * p.lambda_r() / Rational(lc.M);
    // w_n sits so the affine piece [y_{n+1}, w_n] of slope 2*lambda^{-nr}
    // carries f(w_n) exactly onto lambda^{-(n+1)r} x_n.
    Rational y_next = Rational(nn + 2, nn + 1) + Rational(1, 2 * (nn + 1) * (nn + 1));
    lc.w = y_next + Rational(nn + 2, 4 * nn * (nn + 1) * (nn + 1)) / p.lambda_r();
    lc.scale = p.scale(n);
    lc.h = lc.scale * lc.x * (Rational(1) - p.delta());
    lc.l = lc.x - lc.w;
    lc.lap_width = Rational(1, 2 * nn * nn) / Rational(lc.M);
    return lc;
}

Rational level_x(long n) { return Rational(n + 1, n); }

Rational level_y(long n) { return Rational(n + 1, n) + Rational(1, 2 * n * n); }

long zone_index(const Rational& x) {
    if (!(x > 1 && x < level_y(1))) throw std::domain_error("zone_index: x outside (1, y_1)");
    // y_m ~ 1 + 1/m, so 1/(x-1) lands within O(1) of the answer
    Rational inv = Rational(1) / (x - Rational(1));
    if (inv > 1000000) return 1000000;
    long c = floor_rat(inv).convert_to<long>();
    for (long m = std::max(1L, c - 2); m <= c + 2; ++m)
        if (level_y(m + 1) <= x && x < level_y(m)) return m;
    throw std::logic_error("zone_index: no level bracket found");
}

bool level_growth_exceeds_lambda(const Rational& lambda, int n) {
    long nn = n;
    return pow_rat(lambda, n) / Rational(nn * nn) >= lambda;
}

bool lap_count_in_growth_window(const Rational& lambda, int n) {
    long nn = n;
    Rational M(M_of(lambda, n));
    Rational g = pow_rat(lambda, n) / Rational(nn * nn);
    return g / 2 <= M && M <= g;
}

bool lap_count_floor_holds(const Rational& lambda, int n) {
    return Rational(M_of(lambda, n)) >= lambda - 3;
}

} // namespace mixmap
