#include "mixmap/map_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mixmap {

namespace {

// lower and upper enclosure of one candidate image value
struct Bound {
    Rational lo, hi;
};

long total_bits(const Rational& v) {
    using boost::multiprecision::abs;
    using boost::multiprecision::msb;
    const BigInt num = abs(boost::multiprecision::numerator(v));
    const BigInt& den = boost::multiprecision::denominator(v);
    long bn = num == 0 ? 0 : static_cast<long>(msb(num)) + 1;
    long bd = static_cast<long>(msb(den)) + 1;
    return bn + bd;
}

// Iterated images walk through blend polynomials whose exact values would
// pile up denominator bits geometrically; once a value outgrows 512 bits it
// is replaced by a dyadic sandwich of mesh 2^-120. Structural candidates
// (0, 4, the scaled junction values) stay exact.
Bound enclose(const Rational& v) {
    if (total_bits(v) <= 512) return {v, v};
    static const BigInt two120 = BigInt(1) << 120;
    BigInt q = (boost::multiprecision::numerator(v) * two120) /
               boost::multiprecision::denominator(v); // v >= 0 here
    Rational lo(q, two120), hi(q + 1, two120);
    if (lo < 0) lo = 0;
    if (hi > 4) hi = 4;
    return {lo, hi};
}

// zone index n with level_y(n+1) <= v < level_y(n); no materialization cap
int zone_of(const Rational& v) {
    Rational inv = Rational(1) / (v - 1);
    if (inv > 1000000) return 1000000; // far beyond any materialization cap
    long c = floor_rat(inv).convert_to<long>();
    for (long n = std::max(1L, c - 2); n <= c + 2; ++n)
        if (level_y(n + 1) <= v && v < level_y(n)) return static_cast<int>(n);
    throw std::logic_error("zone_of: no level matched");
}

void add_endpoint(const PiecewiseMap& m, const Rational& e, std::vector<Bound>& out) {
    PieceRef pr = m.locate(e);
    if (pr.deep) {
        int cap = PiecewiseMap::hard_cap();
        out.push_back({Rational(0), m.params().scale(cap + 1) * level_y(cap + 1)});
        return;
    }
    out.push_back(enclose(m.eval_exact(e)));
}

// junction extrema of levels intersecting J, O(1) per level by index ranges
void add_level_candidates(const PiecewiseMap& m, const RInterval& J, std::vector<Bound>& out) {
    const Rational& y1 = m.top();
    if (!(J.hi > 1 && J.lo < y1)) return;
    int cap = PiecewiseMap::hard_cap();
    int n_s;
    if (J.hi >= y1) {
        n_s = 1;
    } else {
        n_s = zone_of(J.hi);
        if (n_s > cap) {
            // the whole overlap is deeper than the cap
            out.push_back({Rational(0), m.params().scale(cap + 1) * level_y(cap + 1)});
            return;
        }
    }
    int n_d = cap;
    if (J.lo > 1) {
        n_d = zone_of(J.lo);
        if (n_d > cap) {
            n_d = cap;
            out.push_back({Rational(0), m.params().scale(cap + 1) * level_y(cap + 1)});
        }
    }
    // Ends plus two neighbors each; strictly interior levels are fully
    // covered and their junction values are dominated by the scanned ones
    // (scale*y_n and scale*y_{n+1} both decrease in n).
    std::vector<int> levels;
    for (int n : {n_s, n_s + 1, n_s + 2, n_d - 2, n_d - 1, n_d})
        if (n >= 1 && n <= cap) levels.push_back(n);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (int n : levels) {
        const LevelConstants& c = m.lc(n);
        BigInt i_lo = -floor_rat((c.x - J.lo) / c.lap_width); // ceil((J.lo-x)/lapw)
        BigInt i_hi = floor_rat((J.hi - c.x) / c.lap_width);
        if (i_lo < 1) i_lo = 1;
        if (i_hi > c.M - 1) i_hi = c.M - 1;
        if (i_lo > i_hi) continue;
        bool span = i_hi > i_lo;
        bool has_odd = span || (i_lo % 2 != 0);
        bool has_even = span || (i_lo % 2 == 0);
        if (has_odd) out.push_back({c.scale * c.y, c.scale * c.y});
        if (has_even) {
            Rational v = c.scale * level_y(n + 1);
            out.push_back({v, v});
        }
    }
}

} // namespace

RInterval map_image(const PiecewiseMap& m, const RInterval& J) {
    if (!(J.lo >= 0 && J.hi <= 4 && J.lo <= J.hi)) throw std::domain_error("map_image: bad interval");
    std::vector<Bound> cand;
    add_endpoint(m, J.lo, cand);
    add_endpoint(m, J.hi, cand);
    if (J.lo <= Rational(1, 2) && Rational(1, 2) <= J.hi) cand.push_back({Rational(4), Rational(4)});
    if (J.lo <= 1 && 1 <= J.hi) cand.push_back({Rational(0), Rational(0)});
    add_level_candidates(m, J, cand);
    Rational lo = cand[0].hi, hi = cand[0].lo;
    for (const Bound& b : cand) {
        if (b.hi < lo) lo = b.hi;
        if (b.lo > hi) hi = b.lo;
    }
    if (lo > hi) lo = hi; // only possible when every candidate was a sandwich
    return {lo, hi};
}

namespace {

bool interior_turning(const PiecewiseMap& m, const RInterval& I) {
    auto inside = [&](const Rational& p) { return I.lo < p && p < I.hi; };
    if (inside(Rational(1, 2)) || inside(Rational(1))) return true;
    const Rational& y1 = m.top();
    if (!(I.hi > 1 && I.lo < y1)) return false;
    if (inside(y1)) return true;
    int cap = PiecewiseMap::hard_cap();
    int n_s = I.hi < y1 ? std::min(zone_of(I.hi), cap) : 1;
    int n_d = I.lo > 1 ? std::min(zone_of(I.lo), cap) : cap;
    if (n_d - n_s >= 2) return true; // a whole level zone sits inside
    for (int n = std::max(1, n_s - 1); n <= std::min(cap, n_d + 1); ++n)
        if (inside(level_x(n)) || inside(level_y(n))) return true;
    return false;
}

} // namespace

CoverReport mixing_probe(const PiecewiseMap& m, const RInterval& J0, int max_steps) {
    if (!(J0.lo >= 0 && J0.hi <= 4 && J0.lo < J0.hi))
        throw std::domain_error("mixing_probe: degenerate interval");
    CoverReport rep;
    RInterval J = J0;
    double prev_w = to_double(J.hi - J.lo);
    for (int k = 1; k <= max_steps; ++k) {
        RInterval I = map_image(m, J);
        ProbeStep st;
        st.width = to_double(I.hi - I.lo);
        st.growth = prev_w > 0 ? st.width / prev_w : 0;
        st.has_zero = I.lo == 0;
        st.turning_interior = interior_turning(m, I);
        rep.trace.push_back(st);
        if (st.growth >= 4.0 / 3.0 - 1e-12 || st.has_zero || st.turning_interior)
            rep.witnessed = true;
        if (I.lo == 0 && I.hi == 4) {
            rep.covered = true;
            rep.steps = k;
            break;
        }
        J = I;
        prev_w = st.width;
    }
    return rep;
}

namespace {

// log sup |f^(k)| contributed by level n inside (1, edge]; zones that stick
// out past the window edge are skipped. Works entirely in log space so that
// depths far below double range stay honest.
double level_log_sup(const MapParams& par, int n, int k, int grid, const Rational& edge) {
    LevelConstants c = level_constants(par, n);
    bool in_affine = c.w <= edge;
    bool in_bridge = c.x <= edge;
    bool in_osc = c.y <= edge;
    double best = -std::numeric_limits<double>::infinity();
    if (k == 0) {
        if (in_osc) return log_rat(c.scale * c.y);
        if (in_bridge) return log_rat(c.scale * c.x);
        if (in_affine) return log_rat(par.scale(n + 1) * c.x);
        return best;
    }
    if (in_affine && k == 1) best = std::max(best, log_rat(2 * c.scale));
    if (in_bridge) {
        Bridge br = build_bridge(par, c);
        double sup = 0;
        for (int i = 0; i <= grid; ++i)
            sup = std::max(sup, std::abs(br.eval_d(static_cast<double>(i) / grid, k)));
        if (sup > 0)
            best = std::max(best, log_rat(c.h / pow_rat(c.l, k)) + std::log(sup));
    }
    if (in_osc) {
        Oscillator osc = build_oscillator(par, c);
        const LapShape* shapes[4] = {&osc.first, &osc.inc, &osc.dec, &osc.last};
        double sup = 0;
        for (const LapShape* sh : shapes)
            for (int i = 0; i <= grid; ++i)
                sup = std::max(sup, std::abs(sh->eval_d(static_cast<double>(i) / grid, k)));
        if (sup > 0)
            best = std::max(best, log_rat(c.scale * pow_rat(Rational(c.M), k) *
                                          pow_rat(c.y - c.x, 1 - k)) +
                                      std::log(sup));
        // affine lap ends carry slope exactly k_n; invisible to the double
        // grid once k_n underflows, so account for it analytically
        if (k == 1) best = std::max(best, log_rat(c.scale * Rational(c.M) * c.k));
    }
    return best;
}

} // namespace

SmoothnessReport verify_smoothness_at_one(const PiecewiseMap& m, int k, int samples_per_zone) {
    const MapParams& par = m.params();
    if (k < 0 || k > par.r) throw std::domain_error("smoothness check needs 0 <= k <= r");
    int grid = std::max(16, samples_per_zone);
    SmoothnessReport rep;
    rep.k = k;
    int j0 = 1;
    while (Rational(pow_int(2, static_cast<unsigned>(j0))) < par.lambda_r()) ++j0;
    rep.j0 = j0;
    const int r = par.r;
    for (int j = j0; j < j0 + 5; ++j) {
        SmoothnessWindow w;
        w.j = j;
        Rational half(1, pow_int(2, static_cast<unsigned>(j)));
        // cap side: monotone in |x-1|, so the window edge attains the max;
        // cross-check the closed form against the built map
        Rational ff = par.cap_C1();
        for (int t = 0; t < k; ++t) ff *= (2 * r - t);
        double analytic = log_rat(ff) + (2.0 * r - k) * log_rat(half);
        double edge_val = std::abs(m.eval_derivative(1.0 - to_double(half), k));
        double sampled = 0;
        for (int i = 0; i < grid; ++i) {
            double x = 1.0 - to_double(half) * (1.0 - static_cast<double>(i) / grid);
            sampled = std::max(sampled, std::abs(m.eval_derivative(x, k)));
        }
        sampled = std::max(sampled, edge_val);
        if (std::abs(std::log(sampled) - analytic) > 1e-6)
            throw std::logic_error("cap-side derivative disagrees with its closed form");
        w.log_left = std::log(sampled);
        // level side
        w.log_right = -std::numeric_limits<double>::infinity();
        Rational edge = 1 + half;
        int nf = zone_of(edge);
        for (int n = nf; n < nf + 4; ++n)
            w.log_right = std::max(w.log_right, level_log_sup(par, n, k, grid, edge));
        w.log_max = std::max(w.log_left, w.log_right);
        rep.windows.push_back(w);
    }
    rep.monotone_ok = true;
    for (size_t i = 1; i < rep.windows.size(); ++i)
        if (!(rep.windows[i].log_max < rep.windows[i - 1].log_max)) rep.monotone_ok = false;
    double lnlam = log_rat(par.lambda);
    double rate = (static_cast<double>(r - k) / (r + 1)) * lnlam;
    rep.fitted_log_C = rep.windows[0].log_max + rate * rep.windows[0].j;
    rep.schedule_ok = true;
    for (const SmoothnessWindow& w : rep.windows)
        if (!(w.log_max <= rep.fitted_log_C - rate * w.j + 1e-9)) rep.schedule_ok = false;
    return rep;
}

MonotoneReport verify_monotone_pieces(const PiecewiseMap& m, int n) {
    MonotoneReport rep;
    rep.n = n;
    const Level& lv = m.level(n);
    const LevelConstants& c = lv.lc;
    double lam_r = to_double(m.params().lambda_r());
    double scale_d = to_double(c.scale);

    rep.alternation_ok = true;
    rep.grid_sign_ok = true;
    rep.endpoint_table_ok = true;

    // stride keeps huge levels affordable without skipping the ends
    BigInt M = c.M;
    BigInt stride = 1;
    if (M > 400000) stride = M / 400000;
    const double offs[4] = {0.15, 0.4, 0.6, 0.85};
    double lapw_d = to_double(c.lap_width);
    double x_d = to_double(c.x);
    Rational f_top = c.scale * c.y;
    Rational f_bot = c.scale * level_y(n + 1);
    for (BigInt i = 0; i < M; i += stride, ++rep.laps_checked) {
        bool expect_inc = (i % 2) == 0;
        if (m.level(n).osc.shape_for_lap(i).increasing != expect_inc) rep.alternation_ok = false;
        double base = x_d + to_double(Rational(i)) * lapw_d;
        for (double o : offs) {
            double d = m.eval_derivative(base + o * lapw_d, 1);
            if (expect_inc ? d <= 0 : d >= 0) rep.grid_sign_ok = false;
            if (std::abs(d) > lam_r * (1 + 1e-9)) rep.grid_sign_ok = false;
        }
        if (i >= 1) {
            Rational got = m.eval_exact(c.t(i));
            if (got != ((i % 2) != 0 ? f_top : f_bot)) rep.endpoint_table_ok = false;
        }
    }
    if (m.eval_exact(c.t(c.M - 1)) != f_bot) rep.endpoint_table_ok = false;
    if (m.eval_exact(c.x) != c.scale * c.x) rep.endpoint_table_ok = false;
    if (m.eval_exact(c.y) != c.scale * c.y) rep.endpoint_table_ok = false;

    // ramp [y_{n+1}, x_n]: affine slope exact, bridge corridor sampled
    rep.ramp_slope_ok = lv.affine_slope == 2 * c.scale &&
                        lv.affine_slope >= Rational(4, 3) * c.scale &&
                        lv.affine_slope <= m.params().lambda_r();
    double w_d = to_double(c.w);
    double l_d = to_double(c.l);
    for (int i = 0; i <= 64; ++i) {
        double xx = w_d + l_d * (static_cast<double>(i) / 64);
        double d = m.eval_derivative(std::min(xx, to_double(c.x)), 1);
        if (d < (4.0 / 3.0) * scale_d * (1 - 1e-9) || d > lam_r * (1 + 1e-9))
            rep.ramp_slope_ok = false;
    }
    return rep;
}

bool torus_compatibility(const PiecewiseMap& m, int k) {
    if (k < 1 || k > m.params().k_max) throw std::domain_error("torus check order out of range");
    const FixedPiece& left = m.fixed_pieces()[0];
    const FixedPiece& right = m.fixed_pieces()[7];
    Rational f0 = left.eval(Rational(0));
    Rational f4 = right.eval(Rational(4));
    Rational wrap = f4 - f0;
    if (boost::multiprecision::denominator(wrap) != 1 ||
        boost::multiprecision::numerator(wrap) % 4 != 0)
        return false;
    for (int j = 1; j <= k; ++j)
        if (left.eval(Rational(0), j) != right.eval(Rational(4), j)) return false;
    return true;
}

SlopeScan scan_slope(const PiecewiseMap& m, int samples, unsigned long long seed) {
    SlopeScan s;
    double lam_r = to_double(m.params().lambda_r());
    const double g = 0.6180339887498949;
    double u = static_cast<double>(seed % 9007199254740993ULL) / 9007199254740993.0;
    auto probe = [&](double x) {
        double d = std::abs(m.eval_derivative(x, 1));
        if (d > s.sup_abs) {
            s.sup_abs = d;
            s.sup_x = x;
        }
        if (d >= lam_r * (1 - 1e-9)) s.equality_x.push_back(x);
    };
    probe(0.0);
    probe(4.0);
    for (int i = 0; i < samples; ++i) {
        u += g;
        if (u >= 1) u -= 1;
        probe(4.0 * u);
    }
    return s;
}

} // namespace mixmap
