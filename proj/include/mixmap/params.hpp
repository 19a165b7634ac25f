// Map parameters and the per-level constants the construction hangs off.
#pragma once

#include "mixmap/rational.hpp"

namespace mixmap {

struct MapParams {
    Rational lambda; // >= 14
    int r = 1;       // smoothness order, >= 1
    int k_max = 2;   // highest derivative order tracked by blends, >= r

    Rational lambda_r() const;  // lambda^r
    Rational delta() const;    // lambda^{-r}
    Rational cap_C() const;    // lambda^{2r}/4; quadratic cap curvature at oscillator extrema
    Rational cap_C0() const;   // (3/2) lambda^r; curvature of the hump cap at 1/2
    Rational cap_C1() const;   // lambda^{r(2r-1)}; coefficient of the flat cap (x-1)^{2r} at 1
    Rational scale(int k) const; // lambda^{-k r}

    static MapParams make(const Rational& lambda, int r, int k_max = -1);
};

struct LevelConstants {
    int n = 0;
    BigInt M;          // odd lap count, 2*floor(lambda^n/(2n^2)) - 1
    Rational x, y;     // level interval [x_n, y_n], x_n = 1 + 1/n, y_n = x_n + 1/(2n^2)
    Rational m;        // oscillator depth, 1 - 1/(n+1)^2
    Rational k;        // boundary slope of s_n, 2 lambda^r / M (so M*k = 2 lambda^r)
    Rational w;        // left end of the bridge piece [w_n, x_n]
    Rational h, l;     // bridge rise f(x_n)-f(w_n) and run x_n-w_n
    Rational scale;    // lambda^{-n r}
    Rational lap_width; // (y-x)/M = 1/(2 n^2 M)

    Rational t(const BigInt& i) const; // junction x_n + i*(y-x)/M, 0 <= i <= M
};

BigInt M_of(const Rational& lambda, int n);
LevelConstants level_constants(const MapParams& p, int n);

Rational level_x(long n); // 1 + 1/n
Rational level_y(long n); // 1 + 1/n + 1/(2n^2)

// Level index m >= 1 with level_y(m+1) <= x < level_y(m). Requires 1 < x < level_y(1).
// Saturates at 1e6 for x absurdly close to 1; every caller truncates far below that.
long zone_index(const Rational& x);

// lambda^n/n^2 >= lambda; lambda^n/(2n^2) <= M_n <= lambda^n/n^2; M_n >= lambda-3.
// All hold for lambda >= 8, n >= 1; checked exactly.
bool level_growth_exceeds_lambda(const Rational& lambda, int n);
bool lap_count_in_growth_window(const Rational& lambda, int n);
bool lap_count_floor_holds(const Rational& lambda, int n);

} // namespace mixmap
