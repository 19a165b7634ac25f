// Structural verification ops for the built map: exact interval images,
// covering probes, windowed smoothness evidence at the flat fixed point,
// per-level monotonicity reports, and the global slope scan.
#pragma once

#include "mixmap/piecewise_map.hpp"

#include <vector>

namespace mixmap {

struct RInterval {
    Rational lo, hi;
};

// Interval image of f over J, computed from the monotonicity structure
// (turning points are only 1/2, 1 and the lap junctions t_i^n). The result
// is contained in the true image; each endpoint defect is at most 2^-120
// (zero while candidate values stay small enough to keep exact, which holds
// for every single application to vertex-interval endpoints).
RInterval map_image(const PiecewiseMap& m, const RInterval& J);

struct ProbeStep {
    double width = 0;              // |f^k(J)| (inner approximation)
    double growth = 0;             // width ratio against the previous step
    bool has_zero = false;         // 0 lies in f^k(J)
    bool turning_interior = false; // interior holds 1/2, 1, or some x_n, y_n
};

struct CoverReport {
    bool covered = false;
    int steps = -1;                // first k with f^k(J) = [0,4]
    bool witnessed = false;        // some step grew by >= 4/3 or hit the interior condition
    std::vector<ProbeStep> trace;
};

CoverReport mixing_probe(const PiecewiseMap& m, const RInterval& J, int max_steps);

struct SmoothnessWindow {
    int j = 0;           // window [1 - 2^-j, 1 + 2^-j]
    double log_max = 0;  // log sup |f^(k)| over the window sample sets
    double log_left = 0; // cap side [1 - 2^-j, 1]
    double log_right = 0; // level zones inside (1, 1 + 2^-j]
};

struct SmoothnessReport {
    int k = 0;
    int j0 = 0;                    // first window exponent, 2^-j0 <= delta
    std::vector<SmoothnessWindow> windows;
    bool monotone_ok = false;      // window maxima strictly decrease
    bool schedule_ok = false;      // maxima below C * lambda^{-j(r-k)/(r+1)}, C fit on window j0
    double fitted_log_C = 0;
};

// k must satisfy 0 <= k <= r. Windows j0..j0+4; the (1, 1+2^-j] side is
// evaluated per level in log space so that depths far beyond double range
// still contribute honestly.
SmoothnessReport verify_smoothness_at_one(const PiecewiseMap& m, int k, int samples_per_zone);

struct MonotoneReport {
    int n = 0;
    long laps_checked = 0;
    bool alternation_ok = false;    // orientations alternate, lap 0 increasing
    bool endpoint_table_ok = false; // exact junction images: odd -> scale*y_n, even -> scale*y_{n+1}
    bool ramp_slope_ok = false;     // (4/3) lambda^{-nr} <= f' <= lambda^r on [y_{n+1}, x_n]
    bool grid_sign_ok = false;      // sampled f' keeps each lap's sign
};

MonotoneReport verify_monotone_pieces(const PiecewiseMap& m, int n);

// f^(j)(0+) == f^(j)(4-) for 1 <= j <= k, and f(0) == f(4) mod 4 (exact).
bool torus_compatibility(const PiecewiseMap& m, int k);

struct SlopeScan {
    double sup_abs = 0;
    double sup_x = 0;
    std::vector<double> equality_x; // samples with |f'| >= lambda^r (1 - 1e-9)
};

// Golden-ratio quasi-random |f'| scan; always includes both endpoints.
SlopeScan scan_slope(const PiecewiseMap& m, int samples, unsigned long long seed);

} // namespace mixmap
