// The interval map on [0,4]: expanding linear ends, a quadratic hump over
// [1/2-d, 1/2+d] reaching 4, a flat C^r contact C1(x-1)^{2r} at the fixed
// point 1, and a countable stack of oscillator levels on (1, 5/2] tied
// together by bridges and affine ramps. Corridor-certified glue pieces join
// the closed forms without breaking monotonicity or the slope bound
// sup|f'| = lambda^r.
//
// All breakpoints and coefficients are exact rationals. Levels materialize
// lazily up to a hard cap; beyond the cap f is below 1e-74 and double
// evaluation returns 0 (exact evaluation refuses).
#pragma once

#include "mixmap/oscillator.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace mixmap {

enum class PieceKind {
    LinearLeft,  // [0, (5/2)d]           f = lambda^r x
    GlueLow,     // [(5/2)d, 1/2-d]       corridor [3/2, lambda^r]
    CapHalfL,    // [1/2-d, 1/2]          f = 4 - C0 (x-1/2)^2
    CapHalfR,    // [1/2, 1/2+d]
    GlueMid,     // [1/2+d, 1-d]          corridor [-lambda^r, -3/2]
    CapOne,      // [1-d, 1]              f = C1 (x-1)^{2r}
    LevelAffine, // [y_{n+1}, w_n]        slope 2 lambda^{-nr}
    LevelBridge, // [w_n, x_n]            f = f(w_n) + h_n phi_n((x-w_n)/l_n)
    LevelOsc,    // [x_n, y_n]            f = lambda^{-nr}(x_n + (y-x) s_n(u))
    GlueTop,     // [y_1, 4-(3/2)d]       corridor [3/2, lambda^r]
    LinearRight, // [4-(3/2)d, 4]         f = 4 + lambda^r (x-4)
};

const char* piece_kind_name(PieceKind k);

struct PieceRef {
    PieceKind kind;
    int level = 0; // set for the three level kinds
    bool deep = false; // x in (1, y_{cap+1}): deeper than the hard cap
};

// A closed-form piece: consecutive polynomial segments, each polynomial in
// the local coordinate (x - segment start).
struct FixedPiece {
    PieceKind kind = PieceKind::LinearLeft;
    Rational lo, hi;
    std::vector<Rational> seg_lo;
    std::vector<std::vector<Poly>> d; // d[k][seg]: order-k derivative polys
    std::vector<std::vector<PolyD>> dd;
    double lo_d = 0, hi_d = 0;
    std::vector<double> seg_lo_d;

    int segment_of(const Rational& x) const;
    Rational eval(const Rational& x, int order = 0) const;
    double eval_d(double x, int order = 0) const;
};

struct Level {
    LevelConstants lc;
    Oscillator osc;
    Bridge bridge;
    Rational y_next;       // y_{n+1}
    Rational affine_slope; // 2 lambda^{-nr}
    Rational f_w;          // f(w_n) = lambda^{-(n+1)r} x_n
    Rational f_y_next;     // f(y_{n+1}) = lambda^{-(n+1)r} y_{n+1}
    double x_d = 0, y_d = 0, w_d = 0, y_next_d = 0, inv_lapw_d = 0, l_d = 0;
};

class PiecewiseMap {
  public:
    const MapParams& params() const { return impl_->par; }
    int n_max() const { return impl_->n_max; }
    static constexpr int hard_cap() { return 64; }
    const Rational& top() const { return impl_->y1; } // y_1

    // -1 means deeper than the hard cap; x must lie in (1, y_1)
    int level_of(const Rational& x) const;
    const LevelConstants& lc(int n) const;     // constants only, cached
    const Level& level(int n) const;           // full level, built on demand

    PieceRef locate(const Rational& x) const;  // half-open pieces, right-closed at 4

    double eval(double x) const;
    double eval_derivative(double x, int k) const;
    Rational eval_exact(const Rational& x) const;
    // pure-double locate and eval; breakpoint-exactness not guaranteed.
    // Root-finding hot path.
    double eval_fast(double x) const;

    std::string to_json() const;
    std::string sample_csv(int count) const;
    int piece_ordinal(const PieceRef& pr) const; // export order; -1 for deep

    const std::array<FixedPiece, 8>& fixed_pieces() const { return impl_->fixed; }

    friend PiecewiseMap build_map(const MapParams& p, int n_max);
    static PiecewiseMap from_json(const std::string& text);

  private:
    struct Impl {
        MapParams par;
        int n_max = 0;
        Rational y1, lo_linear_end, hi_linear_start; // (5/2)d, 4-(3/2)d
        std::array<FixedPiece, 8> fixed; // LinearLeft..CapOne, GlueTop, LinearRight
        mutable std::map<int, LevelConstants> lc_cache;
        mutable std::map<int, std::unique_ptr<Level>> levels;
        mutable std::mutex mu;
    };
    std::shared_ptr<Impl> impl_;

    const FixedPiece& fixed_for(PieceKind k) const;
    Rational eval_exact_at(const PieceRef& pr, const Rational& x) const;
};

PiecewiseMap build_map(const MapParams& p, int n_max = 4);

} // namespace mixmap
