#include "mixmap/oscillator.hpp"

#include <cmath>

namespace mixmap {

namespace {

constexpr int kDerivOrders = 16; // beyond the stored degree all derivatives are zero polys

template <size_t N>
void fill_derivatives(std::vector<std::array<Poly, N>>& d,
                      std::vector<std::array<PolyD, N>>& dd) {
    d.resize(kDerivOrders);
    dd.resize(kDerivOrders);
    for (int k = 1; k < kDerivOrders; ++k)
        for (size_t s = 0; s < N; ++s) d[k][s] = d[k - 1][s].derivative();
    for (int k = 0; k < kDerivOrders; ++k)
        for (size_t s = 0; s < N; ++s) dd[k][s] = d[k][s].to_double();
}

} // namespace

int LapShape::segment_of(const Rational& v) const {
    if (v < 0 || v > 1) throw std::domain_error("lap coordinate out of range");
    for (int i = 4; i >= 1; --i)
        if (v >= brk[i]) return i;
    return 0;
}

Rational LapShape::eval(const Rational& v, int order) const {
    int s = segment_of(v);
    if (order >= kDerivOrders) return 0;
    return d[order][static_cast<size_t>(s)].eval(v - brk[s]);
}

double LapShape::eval_d(double v, int order) const {
    int s = 0;
    for (int i = 4; i >= 1; --i)
        if (v >= brk_d[i]) { s = i; break; }
    if (order >= kDerivOrders) return 0.0;
    return dd[order][static_cast<size_t>(s)].eval(v - brk_d[s]);
}

namespace {

LapShape build_lap_shape(const MapParams& p, const LevelConstants& lc, LapKind kind) {
    Rational del = p.delta();
    Rational C = p.cap_C();
    Rational lam_r = p.lambda_r();
    Rational k = lc.k, m = lc.m;
    bool increasing = kind != LapKind::DecInterior;

    Poly seg0, seg4;          // local xi on [0, delta]
    Poly A_a, A_b;            // host lap coordinate v
    Rational delta_val, start_val, end_val;
    switch (kind) {
        case LapKind::First:
            seg0 = Poly::linear(0, k);
            seg4 = Poly::constant(1) - Poly::linear(-del, 1) * Poly::linear(-del, 1) * C;
            A_a = Poly::constant(k);
            A_b = Poly::linear(2 * C, -2 * C); // -2C(v-1)
            start_val = k * del;
            end_val = Rational(3, 4);
            break;
        case LapKind::IncInterior:
            seg0 = Poly::constant(-m) + Poly::linear(0, 1) * Poly::linear(0, 1) * C;
            seg4 = Poly::constant(1) - Poly::linear(-del, 1) * Poly::linear(-del, 1) * C;
            A_a = Poly::linear(0, 2 * C);
            A_b = Poly::linear(2 * C, -2 * C);
            start_val = -m + Rational(1, 4);
            end_val = Rational(3, 4);
            break;
        case LapKind::DecInterior:
            seg0 = Poly::constant(1) - Poly::linear(0, 1) * Poly::linear(0, 1) * C;
            seg4 = Poly::constant(-m) + Poly::linear(-del, 1) * Poly::linear(-del, 1) * C;
            A_a = Poly::linear(0, -2 * C);
            A_b = Poly::linear(-2 * C, 2 * C);
            start_val = Rational(3, 4);
            end_val = -m + Rational(1, 4);
            break;
        case LapKind::Last:
            seg0 = Poly::constant(-m) + Poly::linear(0, 1) * Poly::linear(0, 1) * C;
            seg4 = Poly::linear(1 - k * del, k); // k(xi-delta)+1
            A_a = Poly::linear(0, 2 * C);
            A_b = Poly::constant(k);
            start_val = -m + Rational(1, 4);
            end_val = 1 - k * del;
            break;
    }
    delta_val = end_val - start_val;

    BlendSpec spec;
    spec.a = del;
    spec.b = 1 - del;
    spec.A_a = A_a;
    spec.A_b = A_b;
    spec.delta_val = delta_val;
    Rational half(1, 2);
    Rational floor_slope = k < half ? k : half;
    if (increasing) {
        spec.lo = floor_slope;
        spec.hi = lam_r;
    } else {
        spec.lo = -lam_r;
        spec.hi = -floor_slope;
    }
    spec.p = p.k_max + 1;
    spec.w_start = del;
    BlendResult b = build_blend(spec);

    LapShape sh;
    sh.kind = kind;
    sh.increasing = increasing;
    sh.w = b.w;
    sh.brk = {Rational(0), del, del + b.w, 1 - del - b.w, 1 - del, Rational(1)};
    for (int i = 0; i < 6; ++i) sh.brk_d[i] = to_double(sh.brk[i]);
    sh.d.resize(1);
    sh.d[0] = {seg0,
               b.left + Poly::constant(start_val),
               b.mid + Poly::constant(start_val),
               b.right + Poly::constant(start_val),
               seg4};
    // junction sanity: blend end meets the outer closed form
    if (sh.d[0][3].eval(b.w) != end_val || sh.d[0][4].eval(0) != end_val)
        throw std::logic_error("lap shape: junction value mismatch");
    fill_derivatives(sh.d, sh.dd);
    return sh;
}

} // namespace

const LapShape& Oscillator::shape_for_lap(const BigInt& j) const {
    if (j < 0 || j >= lc.M) throw std::domain_error("lap index out of range");
    if (j == 0) return first;
    if (j == lc.M - 1) return last;
    return (j % 2 == 0) ? inc : dec;
}

Rational Oscillator::eval(const Rational& u, int order) const {
    if (u < 0 || u > Rational(lc.M)) throw std::domain_error("oscillator coordinate out of range");
    BigInt j = floor_rat(u);
    if (j == lc.M) --j; // u == M evaluates on the last lap
    return shape_for_lap(j).eval(u - Rational(j), order);
}

double Oscillator::eval_d(double u, int order) const {
    double j = std::floor(u);
    double M = to_double(Rational(lc.M));
    if (j >= M) j = M - 1;
    if (j < 0) j = 0;
    // beyond 2^53 laps the double coordinate no longer resolves parity; the
    // level scale is below 1e-10 there, so any interior shape is fine
    const LapShape& sh =
        j < 1 ? first : (j >= M - 1 ? last : (std::fmod(j, 2.0) == 0.0 ? inc : dec));
    return sh.eval_d(u - j, order);
}

Oscillator build_oscillator(const MapParams& p, const LevelConstants& lc) {
    Oscillator o;
    o.par = p;
    o.lc = lc;
    o.first = build_lap_shape(p, lc, LapKind::First);
    o.inc = build_lap_shape(p, lc, LapKind::IncInterior);
    o.dec = build_lap_shape(p, lc, LapKind::DecInterior);
    o.last = build_lap_shape(p, lc, LapKind::Last);
    if (o.first.eval(0) != 0 || o.last.eval(1) != 1)
        throw std::logic_error("oscillator: boundary values wrong");
    return o;
}

int Bridge::segment_of(const Rational& x) const {
    if (x < 0 || x > 1) throw std::domain_error("bridge coordinate out of range");
    if (x >= brk[2]) return 2;
    if (x >= brk[1]) return 1;
    return 0;
}

Rational Bridge::eval(const Rational& x, int order) const {
    int s = segment_of(x);
    if (order >= kDerivOrders) return 0;
    return d[order][static_cast<size_t>(s)].eval(x - brk[s]);
}

double Bridge::eval_d(double x, int order) const {
    int s = x >= brk_d[2] ? 2 : (x >= brk_d[1] ? 1 : 0);
    if (order >= kDerivOrders) return 0.0;
    return dd[order][static_cast<size_t>(s)].eval(x - brk_d[s]);
}

std::vector<UniformBoundsReport> validate_uniform_bounds(const MapParams& p,
                                                         const std::vector<int>& levels,
                                                         int grid_per_segment) {
    std::vector<Oscillator> oscs;
    oscs.reserve(levels.size());
    for (int n : levels) oscs.push_back(build_oscillator(p, level_constants(p, n)));

    std::vector<UniformBoundsReport> out;
    for (int k = 1; k <= p.k_max; ++k) {
        UniformBoundsReport rep;
        rep.k = k;
        for (const Oscillator& o : oscs) {
            double sup = 0.0;
            for (const LapShape* sh : {&o.first, &o.inc, &o.dec, &o.last}) {
                for (int seg = 0; seg < 5; ++seg) {
                    Rational len = sh->brk[seg + 1] - sh->brk[seg];
                    for (int i = 0; i <= grid_per_segment; ++i) {
                        Rational v = sh->brk[seg] + len * Rational(i, grid_per_segment);
                        double a = std::abs(to_double(sh->eval(v, k)));
                        if (a > sup) sup = a;
                    }
                }
            }
            rep.sup_by_level.push_back(sup);
        }
        size_t half = rep.sup_by_level.size() / 2;
        for (size_t i = 0; i < rep.sup_by_level.size(); ++i) {
            double s = rep.sup_by_level[i];
            if (i < half)
                rep.head_max = std::max(rep.head_max, s);
            else
                rep.tail_max = std::max(rep.tail_max, s);
        }
        rep.no_growth = rep.tail_max <= rep.head_max * 1.05;
        out.push_back(std::move(rep));
    }
    return out;
}

Bridge build_bridge(const MapParams& p, const LevelConstants& lc) {
    Bridge br;
    br.par = p;
    br.lc = lc;
    // f'(w_n+) = 2 lambda^{-nr} and f'(x_n-) = 2 lambda^{-(n-1)r} pin the
    // endpoint slopes of phi through f' = (h/l) phi'.
    br.dphi0 = 2 * lc.l / (lc.x * (1 - p.delta()));
    br.dphi1 = p.lambda_r() * br.dphi0;

    BlendSpec spec;
    spec.a = 0;
    spec.b = 1;
    spec.A_a = Poly::constant(br.dphi0);
    spec.A_b = Poly::constant(br.dphi1);
    spec.delta_val = 1;
    spec.lo = Rational(2, 3) * br.dphi0;          // f' >= (4/3) lambda^{-nr}
    spec.hi = p.lambda_r() * lc.l / lc.h;         // f' <= lambda^r
    spec.p = p.k_max + 1;
    spec.w_start = Rational(1, 4);
    BlendResult b = build_blend(spec);

    br.w = b.w;
    br.brk = {Rational(0), b.w, 1 - b.w, Rational(1)};
    for (int i = 0; i < 4; ++i) br.brk_d[i] = to_double(br.brk[i]);
    br.d.resize(1);
    br.d[0] = {b.left, b.mid, b.right};
    if (br.eval(0) != 0 || br.eval(1) != 1)
        throw std::logic_error("bridge: boundary values wrong");
    fill_derivatives(br.d, br.dd);
    return br;
}

} // namespace mixmap
