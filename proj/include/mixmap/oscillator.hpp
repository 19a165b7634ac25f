// Level-n oscillator s_n : [0, M_n] -> [-m_n, 1] and the bridge profile
// phi_n : [0,1] -> [0,1] that connects a level to the affine ramp below it.
//
// s_n is built lap by lap from four unit shapes. Each shape has five
// segments on [0,1]: a closed form within delta of each end (affine at the
// outer boundary laps, quadratic caps of curvature C at interior extrema)
// and a corridor-certified blend between them. Laps share junction jets, so
// s_n is C^infinity on (0, M_n); properties enforced by construction:
//   s(0)=0, s(M)=1, alternating monotone laps,
//   s affine with slope k_n within delta of 0 and M,
//   |s'| <= lambda^r everywhere, |s'| >= min(1/2, k_n) at distance >= delta
//   from interior extrema.
#pragma once

#include "mixmap/blend.hpp"
#include "mixmap/params.hpp"

#include <array>
#include <vector>

namespace mixmap {

enum class LapKind { First, IncInterior, DecInterior, Last };

struct LapShape {
    LapKind kind = LapKind::First;
    bool increasing = true;
    std::array<Rational, 6> brk;                 // 0, d, d+w, 1-d-w, 1-d, 1
    std::array<double, 6> brk_d;
    std::vector<std::array<Poly, 5>> d;          // d[k][seg]: k-th derivative, local xi
    std::vector<std::array<PolyD, 5>> dd;
    Rational w;                                  // fade width of the blend

    int segment_of(const Rational& v) const;     // v in [0,1]
    Rational eval(const Rational& v, int order = 0) const;
    double eval_d(double v, int order = 0) const;
};

struct Oscillator {
    MapParams par;
    LevelConstants lc;
    LapShape first, inc, dec, last;

    const LapShape& shape_for_lap(const BigInt& j) const; // j in [0, M-1]
    // u in [0, M]; order-k derivative of s_n w.r.t. u
    Rational eval(const Rational& u, int order = 0) const;
    double eval_d(double u, int order = 0) const;
};

Oscillator build_oscillator(const MapParams& p, const LevelConstants& lc);

struct Bridge {
    MapParams par;
    LevelConstants lc;
    Rational dphi0, dphi1; // phi'(0), phi'(1) = lambda^r phi'(0)
    std::array<Rational, 4> brk; // 0, w, 1-w, 1
    std::array<double, 4> brk_d;
    std::vector<std::array<Poly, 3>> d;
    std::vector<std::array<PolyD, 3>> dd;
    Rational w;

    int segment_of(const Rational& x) const;
    Rational eval(const Rational& x, int order = 0) const; // phi on [0,1]
    double eval_d(double x, int order = 0) const;
};

Bridge build_bridge(const MapParams& p, const LevelConstants& lc);

// Grid sups of |s_n^{(k)}| across levels, one report per order k = 1..k_max.
// no_growth: the sup over the upper half of the level list does not exceed
// the lower half's sup by more than 5%, i.e. the bound is level-uniform.
struct UniformBoundsReport {
    int k = 0;
    std::vector<double> sup_by_level;
    double head_max = 0, tail_max = 0;
    bool no_growth = false;
};

std::vector<UniformBoundsReport> validate_uniform_bounds(const MapParams& p,
                                                         const std::vector<int>& levels,
                                                         int grid_per_segment);

} // namespace mixmap
