#include "mixmap/piecewise_map.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace mixmap {

using ojson = nlohmann::ordered_json;

const char* piece_kind_name(PieceKind k) {
    switch (k) {
        case PieceKind::LinearLeft: return "linear_left";
        case PieceKind::GlueLow: return "glue_low";
        case PieceKind::CapHalfL: return "cap_half_left";
        case PieceKind::CapHalfR: return "cap_half_right";
        case PieceKind::GlueMid: return "glue_mid";
        case PieceKind::CapOne: return "cap_one";
        case PieceKind::LevelAffine: return "level_affine";
        case PieceKind::LevelBridge: return "level_bridge";
        case PieceKind::LevelOsc: return "level_osc";
        case PieceKind::GlueTop: return "glue_top";
        case PieceKind::LinearRight: return "linear_right";
    }
    return "?";
}

int FixedPiece::segment_of(const Rational& x) const {
    int s = 0;
    for (size_t i = 1; i < seg_lo.size(); ++i)
        if (x >= seg_lo[i]) s = static_cast<int>(i);
    return s;
}

Rational FixedPiece::eval(const Rational& x, int order) const {
    if (order >= static_cast<int>(d.size())) return 0;
    int s = segment_of(x);
    return d[static_cast<size_t>(order)][static_cast<size_t>(s)].eval(x - seg_lo[static_cast<size_t>(s)]);
}

double FixedPiece::eval_d(double x, int order) const {
    if (order >= static_cast<int>(dd.size())) return 0.0;
    size_t s = 0;
    for (size_t i = 1; i < seg_lo_d.size(); ++i)
        if (x >= seg_lo_d[i]) s = i;
    return dd[static_cast<size_t>(order)][s].eval(x - seg_lo_d[s]);
}

namespace {

constexpr int kOrders = 16;

void finish_piece(FixedPiece& fp) {
    fp.d.resize(kOrders);
    fp.dd.resize(kOrders);
    size_t nseg = fp.d[0].size();
    for (int k = 1; k < kOrders; ++k) {
        fp.d[static_cast<size_t>(k)].resize(nseg);
        for (size_t s = 0; s < nseg; ++s)
            fp.d[static_cast<size_t>(k)][s] = fp.d[static_cast<size_t>(k - 1)][s].derivative();
    }
    for (int k = 0; k < kOrders; ++k) {
        fp.dd[static_cast<size_t>(k)].resize(nseg);
        for (size_t s = 0; s < nseg; ++s)
            fp.dd[static_cast<size_t>(k)][s] = fp.d[static_cast<size_t>(k)][s].to_double();
    }
    fp.lo_d = to_double(fp.lo);
    fp.hi_d = to_double(fp.hi);
    fp.seg_lo_d.resize(fp.seg_lo.size());
    for (size_t i = 0; i < fp.seg_lo.size(); ++i) fp.seg_lo_d[i] = to_double(fp.seg_lo[i]);
}

FixedPiece make_single(PieceKind kind, const Rational& lo, const Rational& hi, const Poly& value) {
    FixedPiece fp;
    fp.kind = kind;
    fp.lo = lo;
    fp.hi = hi;
    fp.seg_lo = {lo};
    fp.d.resize(1);
    fp.d[0] = {value};
    finish_piece(fp);
    return fp;
}

FixedPiece make_glue(PieceKind kind, const Rational& lo, const Rational& hi,
                     const Rational& base, const BlendSpec& spec) {
    BlendResult b = build_blend(spec);
    FixedPiece fp;
    fp.kind = kind;
    fp.lo = lo;
    fp.hi = hi;
    fp.seg_lo = {lo, lo + b.w, hi - b.w};
    fp.d.resize(1);
    fp.d[0] = {b.left + Poly::constant(base), b.mid + Poly::constant(base),
               b.right + Poly::constant(base)};
    finish_piece(fp);
    return fp;
}

Poly poly_pow(const Poly& p, int e) {
    Poly r = Poly::constant(1);
    for (int i = 0; i < e; ++i) r = r * p;
    return r;
}

} // namespace

PiecewiseMap build_map(const MapParams& p, int n_max) {
    if (n_max < 1 || n_max > PiecewiseMap::hard_cap())
        throw std::invalid_argument("n_max out of range");
    auto impl = std::make_shared<PiecewiseMap::Impl>();
    impl->par = p;
    impl->n_max = n_max;
    Rational del = p.delta();
    Rational lam_r = p.lambda_r();
    Rational C0 = p.cap_C0();
    Rational C1 = p.cap_C1();
    impl->y1 = Rational(5, 2);
    impl->lo_linear_end = Rational(5, 2) * del;
    impl->hi_linear_start = 4 - Rational(3, 2) * del;

    impl->fixed[0] = make_single(PieceKind::LinearLeft, 0, impl->lo_linear_end,
                                 Poly::linear(0, lam_r));
    {
        BlendSpec s;
        s.a = impl->lo_linear_end;
        s.b = Rational(1, 2) - del;
        s.A_a = Poly::constant(lam_r);
        s.A_b = Poly::linear(C0, -2 * C0); // -2 C0 (x - 1/2)
        s.delta_val = Rational(3, 2) * (1 - del);
        s.lo = Rational(3, 2);
        s.hi = lam_r;
        s.p = p.k_max + 1;
        s.w_start = (s.b - s.a) / 2;
        impl->fixed[1] = make_glue(PieceKind::GlueLow, s.a, s.b, Rational(5, 2), s);
    }
    impl->fixed[2] = make_single(
        PieceKind::CapHalfL, Rational(1, 2) - del, Rational(1, 2),
        Poly::constant(4) - Poly::linear(-del, 1) * Poly::linear(-del, 1) * C0);
    impl->fixed[3] =
        make_single(PieceKind::CapHalfR, Rational(1, 2), Rational(1, 2) + del,
                    Poly::constant(4) - Poly::linear(0, 1) * Poly::linear(0, 1) * C0);
    {
        BlendSpec s;
        s.a = Rational(1, 2) + del;
        s.b = 1 - del;
        s.A_a = Poly::linear(C0, -2 * C0);
        s.A_b = poly_pow(Poly::linear(-1, 1), 2 * p.r - 1) * (Rational(2 * p.r) * C1);
        s.delta_val = Rational(5, 2) * del - 4;
        s.lo = -lam_r;
        s.hi = Rational(-3, 2);
        s.p = p.k_max + 1;
        s.w_start = (s.b - s.a) / 2;
        impl->fixed[4] = make_glue(PieceKind::GlueMid, s.a, s.b, 4 - Rational(3, 2) * del, s);
    }
    impl->fixed[5] = make_single(PieceKind::CapOne, 1 - del, 1,
                                 poly_pow(Poly::linear(-del, 1), 2 * p.r) * C1);
    {
        BlendSpec s;
        s.a = impl->y1;
        s.b = impl->hi_linear_start;
        s.A_a = Poly::constant(2);
        s.A_b = Poly::constant(lam_r);
        s.delta_val = Rational(5, 2) * (1 - del);
        s.lo = Rational(3, 2);
        s.hi = lam_r;
        s.p = p.k_max + 1;
        s.w_start = (s.b - s.a) / 2;
        impl->fixed[6] = make_glue(PieceKind::GlueTop, s.a, s.b, impl->lo_linear_end, s);
    }
    impl->fixed[7] = make_single(PieceKind::LinearRight, impl->hi_linear_start, 4,
                                 Poly::linear(Rational(5, 2), lam_r));

    // exact value continuity across the fixed chain
    auto& F = impl->fixed;
    if (F[0].eval(F[0].hi) != Rational(5, 2)) throw std::logic_error("chain: linear->glue");
    for (int i = 1; i <= 4; ++i)
        if (F[static_cast<size_t>(i)].eval(F[static_cast<size_t>(i)].hi) !=
            F[static_cast<size_t>(i + 1)].eval(F[static_cast<size_t>(i + 1)].lo))
            throw std::logic_error("chain: fixed piece continuity");
    if (F[5].eval(Rational(1)) != 0) throw std::logic_error("chain: f(1) != 0");
    if (F[6].eval(F[6].hi) != F[7].eval(F[7].lo)) throw std::logic_error("chain: glue_top->linear");
    if (F[7].eval(Rational(4)) != 4) throw std::logic_error("chain: f(4) != 4");

    PiecewiseMap m;
    m.impl_ = impl;
    for (int n = 1; n <= n_max; ++n) m.level(n); // eager build validates corridors
    // oscillator top of level 1 meets the top glue's base value
    if (m.level(1).lc.scale * m.level(1).lc.y != impl->lo_linear_end)
        throw std::logic_error("chain: level 1 -> glue_top");
    return m;
}

const LevelConstants& PiecewiseMap::lc(int n) const {
    if (n < 1 || n > hard_cap() + 2) throw std::domain_error("level out of range");
    std::lock_guard<std::mutex> g(impl_->mu);
    auto it = impl_->lc_cache.find(n);
    if (it == impl_->lc_cache.end())
        it = impl_->lc_cache.emplace(n, level_constants(impl_->par, n)).first;
    return it->second;
}

const Level& PiecewiseMap::level(int n) const {
    if (n < 1 || n > hard_cap()) throw std::domain_error("level out of range");
    {
        std::lock_guard<std::mutex> g(impl_->mu);
        auto it = impl_->levels.find(n);
        if (it != impl_->levels.end()) return *it->second;
    }
    auto lv = std::make_unique<Level>();
    lv->lc = level_constants(impl_->par, n);
    lv->osc = build_oscillator(impl_->par, lv->lc);
    lv->bridge = build_bridge(impl_->par, lv->lc);
    lv->y_next = level_y(n + 1);
    lv->affine_slope = 2 * lv->lc.scale;
    lv->f_w = impl_->par.scale(n + 1) * lv->lc.x;
    lv->f_y_next = impl_->par.scale(n + 1) * lv->y_next;
    lv->x_d = to_double(lv->lc.x);
    lv->y_d = to_double(lv->lc.y);
    lv->w_d = to_double(lv->lc.w);
    lv->y_next_d = to_double(lv->y_next);
    lv->inv_lapw_d = to_double(Rational(1) / lv->lc.lap_width);
    lv->l_d = to_double(lv->lc.l);
    std::lock_guard<std::mutex> g(impl_->mu);
    auto [it, inserted] = impl_->levels.emplace(n, std::move(lv));
    (void)inserted; // first writer wins; concurrent builds are identical
    return *it->second;
}

int PiecewiseMap::level_of(const Rational& x) const {
    if (!(x > 1 && x < impl_->y1)) throw std::domain_error("level_of: x outside (1, y_1)");
    Rational inv = Rational(1) / (x - 1);
    BigInt cand = floor_rat(inv);
    if (cand > hard_cap() + 2) return -1;
    long c = cand.convert_to<long>();
    for (long n = std::max(1L, c - 2); n <= c + 2; ++n) {
        if (n > hard_cap()) return -1;
        if (level_y(n + 1) <= x && x < level_y(n)) return static_cast<int>(n);
    }
    throw std::logic_error("level_of: no level matched");
}

PieceRef PiecewiseMap::locate(const Rational& x) const {
    if (x < 0 || x > 4) throw std::domain_error("x outside [0,4]");
    Rational del = impl_->par.delta();
    if (x < impl_->lo_linear_end) return {PieceKind::LinearLeft, 0, false};
    if (x < Rational(1, 2) - del) return {PieceKind::GlueLow, 0, false};
    if (x < Rational(1, 2)) return {PieceKind::CapHalfL, 0, false};
    if (x < Rational(1, 2) + del) return {PieceKind::CapHalfR, 0, false};
    if (x < 1 - del) return {PieceKind::GlueMid, 0, false};
    if (x <= 1) return {PieceKind::CapOne, 0, false};
    if (x < impl_->y1) {
        int n = level_of(x);
        if (n < 0) return {PieceKind::LevelAffine, 0, true};
        const LevelConstants& c = lc(n);
        if (x < c.w) return {PieceKind::LevelAffine, n, false};
        if (x < c.x) return {PieceKind::LevelBridge, n, false};
        return {PieceKind::LevelOsc, n, false};
    }
    if (x < impl_->hi_linear_start) return {PieceKind::GlueTop, 0, false};
    return {PieceKind::LinearRight, 0, false};
}

const FixedPiece& PiecewiseMap::fixed_for(PieceKind k) const {
    switch (k) {
        case PieceKind::LinearLeft: return impl_->fixed[0];
        case PieceKind::GlueLow: return impl_->fixed[1];
        case PieceKind::CapHalfL: return impl_->fixed[2];
        case PieceKind::CapHalfR: return impl_->fixed[3];
        case PieceKind::GlueMid: return impl_->fixed[4];
        case PieceKind::CapOne: return impl_->fixed[5];
        case PieceKind::GlueTop: return impl_->fixed[6];
        case PieceKind::LinearRight: return impl_->fixed[7];
        default: throw std::logic_error("fixed_for: level piece");
    }
}

Rational PiecewiseMap::eval_exact_at(const PieceRef& pr, const Rational& x) const {
    switch (pr.kind) {
        case PieceKind::LevelAffine: {
            const Level& lv = level(pr.level);
            return lv.f_y_next + lv.affine_slope * (x - lv.y_next);
        }
        case PieceKind::LevelBridge: {
            const Level& lv = level(pr.level);
            return lv.f_w + lv.lc.h * lv.bridge.eval((x - lv.lc.w) / lv.lc.l);
        }
        case PieceKind::LevelOsc: {
            const Level& lv = level(pr.level);
            Rational u = (x - lv.lc.x) / lv.lc.lap_width;
            return lv.lc.scale * (lv.lc.x + (lv.lc.y - lv.lc.x) * lv.osc.eval(u));
        }
        default: return fixed_for(pr.kind).eval(x);
    }
}

Rational PiecewiseMap::eval_exact(const Rational& x) const {
    PieceRef pr = locate(x);
    if (pr.deep) throw std::domain_error("eval_exact: x deeper than materialization cap");
    return eval_exact_at(pr, x);
}

double PiecewiseMap::eval(double x) const { return eval_derivative(x, 0); }

double PiecewiseMap::eval_derivative(double x, int k) const {
    if (!(x >= 0 && x <= 4)) throw std::domain_error("x outside [0,4]");
    if (k < 0 || k > impl_->par.k_max)
        throw std::domain_error("derivative order outside tracked range");
    Rational rx = rational_from_double(x);
    PieceRef pr = locate(rx);
    if (pr.deep) return 0.0;
    switch (pr.kind) {
        case PieceKind::LevelAffine: {
            const Level& lv = level(pr.level);
            if (k == 0) return to_double(lv.f_y_next + lv.affine_slope * (rx - lv.y_next));
            if (k == 1) return to_double(lv.affine_slope);
            return 0.0;
        }
        case PieceKind::LevelBridge: {
            const Level& lv = level(pr.level);
            double xi = to_double((rx - lv.lc.w) / lv.lc.l);
            double base = k == 0 ? to_double(lv.f_w) : 0.0;
            return base + to_double(lv.lc.h / pow_rat(lv.lc.l, k)) * lv.bridge.eval_d(xi, k);
        }
        case PieceKind::LevelOsc: {
            const Level& lv = level(pr.level);
            Rational u = (rx - lv.lc.x) / lv.lc.lap_width;
            BigInt j = floor_rat(u);
            if (j == lv.lc.M) --j;
            double v = to_double(u - Rational(j));
            double s = lv.osc.shape_for_lap(j).eval_d(v, k);
            Rational scale = lv.lc.scale * pow_rat(Rational(lv.lc.M), k) *
                             pow_rat(lv.lc.y - lv.lc.x, 1 - k);
            if (k == 0) return to_double(lv.lc.scale * lv.lc.x) + to_double(scale) * s;
            return to_double(scale) * s;
        }
        default: {
            const FixedPiece& fp = fixed_for(pr.kind);
            int s = fp.segment_of(rx);
            double xi = to_double(rx - fp.seg_lo[static_cast<size_t>(s)]);
            return fp.dd[static_cast<size_t>(std::min(k, kOrders - 1))][static_cast<size_t>(s)]
                .eval(xi);
        }
    }
}

double PiecewiseMap::eval_fast(double x) const {
    const Impl& im = *impl_;
    double del = to_double(im.par.delta());
    double lam_r = to_double(im.par.lambda_r());
    if (x <= 0) return 0.0;
    double y1 = 2.5;
    if (x < to_double(im.lo_linear_end)) return lam_r * x;
    if (x <= 1.0) {
        if (x < 0.5 - del) return im.fixed[1].eval_d(x);
        if (x < 0.5) return im.fixed[2].eval_d(x);
        if (x < 0.5 + del) return im.fixed[3].eval_d(x);
        if (x < 1.0 - del) return im.fixed[4].eval_d(x);
        return im.fixed[5].eval_d(x);
    }
    if (x < y1) {
        long n = static_cast<long>(std::floor(1.0 / (x - 1.0)));
        const Level* lv = nullptr;
        for (long c = std::max(1L, n - 2); c <= n + 2 && c <= hard_cap(); ++c) {
            auto it = im.levels.find(static_cast<int>(c));
            if (it == im.levels.end()) continue;
            const Level& L = *it->second;
            if (x >= L.y_next_d && x <= L.y_d) { lv = &L; break; }
        }
        if (!lv) {
            if (n > hard_cap()) return 0.0;
            return eval(x); // exact locate materializes the right level for next time
        }
        const Level& L = *lv;
        if (x < L.w_d)
            return to_double(L.f_y_next) + to_double(L.affine_slope) * (x - L.y_next_d);
        if (x < L.x_d)
            return to_double(L.f_w) + to_double(L.lc.h) * L.bridge.eval_d((x - L.w_d) / L.l_d);
        double u = (x - L.x_d) * L.inv_lapw_d;
        double s = L.osc.eval_d(u);
        return to_double(L.lc.scale) * (L.x_d + (L.y_d - L.x_d) * s);
    }
    if (x < im.fixed[7].lo_d) return im.fixed[6].eval_d(x);
    return im.fixed[7].eval_d(std::min(x, 4.0));
}

int PiecewiseMap::piece_ordinal(const PieceRef& pr) const {
    if (pr.deep) return -1;
    int nm = impl_->n_max;
    switch (pr.kind) {
        case PieceKind::LinearLeft: return 0;
        case PieceKind::GlueLow: return 1;
        case PieceKind::CapHalfL: return 2;
        case PieceKind::CapHalfR: return 3;
        case PieceKind::GlueMid: return 4;
        case PieceKind::CapOne: return 5;
        case PieceKind::LevelAffine:
            return pr.level > nm ? -1 : 6 + 3 * (nm - pr.level);
        case PieceKind::LevelBridge:
            return pr.level > nm ? -1 : 7 + 3 * (nm - pr.level);
        case PieceKind::LevelOsc:
            return pr.level > nm ? -1 : 8 + 3 * (nm - pr.level);
        case PieceKind::GlueTop: return 6 + 3 * nm;
        case PieceKind::LinearRight: return 7 + 3 * nm;
    }
    return -1;
}

namespace {

ojson poly_json(const Poly& p) {
    ojson a = ojson::array();
    for (const auto& c : p.c) a.push_back(to_fraction_string(c));
    return a;
}

ojson fixed_piece_json(const FixedPiece& fp, int id) {
    ojson j;
    j["id"] = id;
    j["kind"] = piece_kind_name(fp.kind);
    j["domain"] = {to_fraction_string(fp.lo), to_fraction_string(fp.hi)};
    ojson segs = ojson::array();
    for (size_t s = 0; s < fp.seg_lo.size(); ++s) {
        ojson seg;
        seg["start"] = to_fraction_string(fp.seg_lo[s]);
        seg["coeffs"] = poly_json(fp.d[0][s]);
        segs.push_back(seg);
    }
    j["segments"] = segs;
    return j;
}

ojson shape_json(const LapShape& sh) {
    ojson j;
    ojson brk = ojson::array();
    for (const auto& b : sh.brk) brk.push_back(to_fraction_string(b));
    j["breaks"] = brk;
    ojson segs = ojson::array();
    for (int s = 0; s < 5; ++s) segs.push_back(poly_json(sh.d[0][static_cast<size_t>(s)]));
    j["segments"] = segs;
    return j;
}

} // namespace

std::string PiecewiseMap::to_json() const {
    const Impl& im = *impl_;
    ojson j;
    j["lambda"] = to_fraction_string(im.par.lambda);
    j["r"] = im.par.r;
    j["k_max"] = im.par.k_max;
    j["n_max"] = im.n_max;
    ojson pieces = ojson::array();
    for (int i = 0; i < 6; ++i) pieces.push_back(fixed_piece_json(im.fixed[static_cast<size_t>(i)], i));
    for (int n = im.n_max; n >= 1; --n) {
        const Level& lv = level(n);
        int base = 6 + 3 * (im.n_max - n);
        {
            ojson a;
            a["id"] = base;
            a["kind"] = piece_kind_name(PieceKind::LevelAffine);
            a["level"] = n;
            a["domain"] = {to_fraction_string(lv.y_next), to_fraction_string(lv.lc.w)};
            a["value_at_lo"] = to_fraction_string(lv.f_y_next);
            a["slope"] = to_fraction_string(lv.affine_slope);
            pieces.push_back(a);
        }
        {
            ojson b;
            b["id"] = base + 1;
            b["kind"] = piece_kind_name(PieceKind::LevelBridge);
            b["level"] = n;
            b["domain"] = {to_fraction_string(lv.lc.w), to_fraction_string(lv.lc.x)};
            b["value_at_lo"] = to_fraction_string(lv.f_w);
            b["rise"] = to_fraction_string(lv.lc.h);
            b["run"] = to_fraction_string(lv.lc.l);
            ojson brk = ojson::array();
            for (const auto& q : lv.bridge.brk) brk.push_back(to_fraction_string(q));
            b["profile_breaks"] = brk;
            ojson segs = ojson::array();
            for (int s = 0; s < 3; ++s) segs.push_back(poly_json(lv.bridge.d[0][static_cast<size_t>(s)]));
            b["profile_segments"] = segs;
            pieces.push_back(b);
        }
        {
            ojson o;
            o["id"] = base + 2;
            o["kind"] = piece_kind_name(PieceKind::LevelOsc);
            o["level"] = n;
            o["domain"] = {to_fraction_string(lv.lc.x), to_fraction_string(lv.lc.y)};
            o["M"] = lv.lc.M.str();
            o["scale"] = to_fraction_string(lv.lc.scale);
            o["depth"] = to_fraction_string(lv.lc.m);
            o["boundary_slope"] = to_fraction_string(lv.lc.k);
            o["shapes"] = {{"first", shape_json(lv.osc.first)},
                           {"inc", shape_json(lv.osc.inc)},
                           {"dec", shape_json(lv.osc.dec)},
                           {"last", shape_json(lv.osc.last)}};
            pieces.push_back(o);
        }
    }
    pieces.push_back(fixed_piece_json(im.fixed[6], 6 + 3 * im.n_max));
    pieces.push_back(fixed_piece_json(im.fixed[7], 7 + 3 * im.n_max));
    j["pieces"] = pieces;
    j["unmaterialized"] = {"1", to_fraction_string(level_y(im.n_max + 1))};
    return j.dump(1);
}

PiecewiseMap PiecewiseMap::from_json(const std::string& text) {
    ojson j = ojson::parse(text);
    MapParams p = MapParams::make(rational_from_fraction_string(j.at("lambda").get<std::string>()),
                                  j.at("r").get<int>(), j.at("k_max").get<int>());
    PiecewiseMap m = build_map(p, j.at("n_max").get<int>());
    ojson again = ojson::parse(m.to_json());
    if (again != j) throw std::runtime_error("map json does not match its parameters");
    return m;
}

std::string PiecewiseMap::sample_csv(int count) const {
    if (count < 2) throw std::invalid_argument("sample count too small");
    std::ostringstream os;
    os << "x,fx,dfx,piece_id\n";
    char buf[96];
    for (int i = 0; i < count; ++i) {
        double x = 4.0 * i / (count - 1);
        double fx = eval(x);
        double dfx = eval_derivative(x, 1);
        int id = piece_ordinal(locate(rational_from_double(x)));
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", x, fx, dfx, id);
        os << buf;
    }
    return os.str();
}

} // namespace mixmap
