#include "mixmap/graph.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace mixmap {

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kExplicitCap = 6;   // beyond this the explicit graph is pointless; use the quotient
constexpr int kQuotientCap = 16;  // lap counts must fit a long

// Collatz-Wielandt certification: for any positive v and irreducible
// nonnegative A, min_i (Av)_i/v_i <= rho(A) <= max_i (Av)_i/v_i. Iterating
// v <- v + Av keeps v positive and kills periodicity, so the bounds close.
template <class MatVec>
RadiusEnclosure certify_radius(std::size_t n, MatVec&& apply) {
    std::vector<double> v(n, 1.0), w(n);
    RadiusEnclosure best{0.0, std::numeric_limits<double>::infinity()};
    for (int iter = 0; iter < 200000; ++iter) {
        apply(v, w);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double ratio = w[i] / v[i];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        best.lo = std::max(best.lo, lo);
        best.hi = std::min(best.hi, hi);
        if (best.hi - best.lo <= 1e-11 * std::max(1.0, best.hi)) break;
        double mx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] += w[i];
            mx = std::max(mx, v[i]);
        }
        for (std::size_t i = 0; i < n; ++i) v[i] /= mx;
    }
    if (best.hi == std::numeric_limits<double>::infinity()) best.hi = best.lo;
    return best;
}

// iterative Tarjan over a CSR-like adjacency accessor
template <class Succ>
std::vector<std::vector<long>> tarjan_sccs(long V, Succ&& succ, std::vector<long>& comp) {
    std::vector<long> idx(static_cast<std::size_t>(V), -1), low(static_cast<std::size_t>(V), 0);
    std::vector<unsigned char> onstk(static_cast<std::size_t>(V), 0);
    std::vector<long> stk;
    std::vector<std::pair<long, long>> call; // (vertex, next successor position)
    std::vector<std::vector<long>> sccs;
    comp.assign(static_cast<std::size_t>(V), -1);
    long counter = 0;
    for (long root = 0; root < V; ++root) {
        if (idx[static_cast<std::size_t>(root)] >= 0) continue;
        call.emplace_back(root, 0);
        idx[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
        stk.push_back(root);
        onstk[static_cast<std::size_t>(root)] = 1;
        while (!call.empty()) {
            auto& [v, pos] = call.back();
            auto sv = static_cast<std::size_t>(v);
            long deg = succ.degree(v);
            if (pos < deg) {
                long w = succ.target(v, pos);
                ++pos;
                auto sw = static_cast<std::size_t>(w);
                if (idx[sw] < 0) {
                    idx[sw] = low[sw] = counter++;
                    stk.push_back(w);
                    onstk[sw] = 1;
                    call.emplace_back(w, 0);
                } else if (onstk[sw]) {
                    low[sv] = std::min(low[sv], idx[sw]);
                }
            } else {
                if (low[sv] == idx[sv]) {
                    std::vector<long> members;
                    long w;
                    do {
                        w = stk.back();
                        stk.pop_back();
                        onstk[static_cast<std::size_t>(w)] = 0;
                        comp[static_cast<std::size_t>(w)] = static_cast<long>(sccs.size());
                        members.push_back(w);
                    } while (w != v);
                    std::sort(members.begin(), members.end());
                    sccs.push_back(std::move(members));
                }
                long finished = v;
                call.pop_back();
                if (!call.empty()) {
                    auto sp = static_cast<std::size_t>(call.back().first);
                    low[sp] = std::min(low[sp], low[static_cast<std::size_t>(finished)]);
                }
            }
        }
    }
    return sccs;
}

template <class Radius>
double entropy_from_sccs(long count, Radius&& radius) {
    double best = 0.0;
    for (long s = 0; s < count; ++s) {
        RadiusEnclosure enc = radius(s);
        double mid = 0.5 * (enc.lo + enc.hi);
        if (mid > 1.0) best = std::max(best, std::log(mid));
    }
    return best;
}

} // namespace

struct MarkovGraph::Data {
    MapParams par;
    GraphOptions opt;
    int N = 0;
    std::vector<long> M; // 1-based lap counts, with overrides
    std::vector<Vertex> verts;
    std::vector<long> offs;
    std::vector<std::int32_t> targets;
    std::vector<long> osc_base, so_base, gap_base;
    long tail_base = 0, special_base = 0;
    std::vector<long> comp;
    std::vector<std::vector<long>> sccs;

    // cached geometry; image_decomposition runs over every vertex inside a
    // tight budget, so no pow/gcd recomputation per call
    std::vector<Rational> scale_;        // lambda^{-kr}, k = 0..N+1
    std::vector<Rational> xlev_, ylev_;  // level corners, 1..N+1
    std::vector<Rational> lapw_;         // lap widths, 1..N
    std::vector<std::vector<VertexInterval>> so_iv_, gap_iv_; // [n][k], k = 0..n
    std::vector<VertexInterval> tail_iv_;                     // [n], 2..N
    std::vector<VertexInterval> gap0_img_, tail_img_;         // images, cached
    Rational tail_bottom_, hole_top_;

    void build_geometry() {
        scale_.resize(static_cast<std::size_t>(N) + 2);
        for (int k = 0; k <= N + 1; ++k) scale_[static_cast<std::size_t>(k)] = par.scale(k);
        xlev_.resize(static_cast<std::size_t>(N) + 2);
        ylev_.resize(static_cast<std::size_t>(N) + 2);
        for (int n = 1; n <= N + 1; ++n) {
            xlev_[static_cast<std::size_t>(n)] = level_x(n);
            ylev_[static_cast<std::size_t>(n)] = level_y(n);
        }
        lapw_.resize(static_cast<std::size_t>(N) + 1);
        for (int n = 1; n <= N; ++n)
            lapw_[static_cast<std::size_t>(n)] =
                Rational(1, 2L * n * n) / Rational(M[static_cast<std::size_t>(n)]);
        so_iv_.resize(static_cast<std::size_t>(N) + 1);
        gap_iv_.resize(static_cast<std::size_t>(N) + 1);
        for (int n = 1; n <= N; ++n) {
            auto sn = static_cast<std::size_t>(n);
            so_iv_[sn].resize(sn + 1);
            gap_iv_[sn].resize(sn + 1);
            for (int k = 0; k <= n; ++k) {
                const Rational& s = scale_[static_cast<std::size_t>(k)];
                so_iv_[sn][static_cast<std::size_t>(k)] = {s * xlev_[sn], s * ylev_[sn]};
                gap_iv_[sn][static_cast<std::size_t>(k)] = {s * ylev_[sn + 1], s * xlev_[sn]};
            }
        }
        tail_iv_.resize(static_cast<std::size_t>(N) + 1);
        tail_img_.resize(static_cast<std::size_t>(N) + 1);
        for (int n = 2; n <= N; ++n) {
            auto sn = static_cast<std::size_t>(n);
            tail_iv_[sn] = {scale_[sn] * ylev_[sn], scale_[sn - 1]};
            tail_img_[sn] = n >= 3 ? VertexInterval{scale_[sn - 1] * ylev_[sn], scale_[sn - 2]}
                                   : VertexInterval{scale_[1] * ylev_[2], Rational(1)};
        }
        gap0_img_.resize(static_cast<std::size_t>(N) + 1);
        for (int n = 1; n <= N; ++n) {
            auto sn = static_cast<std::size_t>(n);
            gap0_img_[sn] = {scale_[sn + 1] * ylev_[sn + 1], scale_[sn] * xlev_[sn]};
        }
        tail_bottom_ = scale_[static_cast<std::size_t>(N)] * ylev_[static_cast<std::size_t>(N)];
        hole_top_ = ylev_[static_cast<std::size_t>(N) + 1];
    }

    VertexInterval interval_of(const Vertex& v) const {
        switch (v.kind) {
            case VertexKind::Osc: {
                auto sn = static_cast<std::size_t>(v.n);
                return {xlev_[sn] + Rational(v.i - 1) * lapw_[sn],
                        xlev_[sn] + Rational(v.i) * lapw_[sn]};
            }
            case VertexKind::ScaledOsc:
                return so_iv_[static_cast<std::size_t>(v.n)][static_cast<std::size_t>(v.i)];
            case VertexKind::Gap:
                return gap_iv_[static_cast<std::size_t>(v.n)][static_cast<std::size_t>(v.i)];
            case VertexKind::Tail: return tail_iv_[static_cast<std::size_t>(v.n)];
            case VertexKind::LeftHump:
                return {Rational(5, 2) * scale_[1], Rational(1, 2)};
            case VertexKind::Hump: return {Rational(1, 2), Rational(1)};
            case VertexKind::Right: return {ylev_[1], Rational(4)};
        }
        throw std::logic_error("interval_of: bad kind");
    }

    VertexInterval image_of(const Vertex& v) const {
        switch (v.kind) {
            case VertexKind::Osc: {
                auto sn = static_cast<std::size_t>(v.n);
                if (v.i == 1) return so_iv_[sn][sn];
                return {gap_iv_[sn][sn].lo, so_iv_[sn][sn].hi};
            }
            case VertexKind::ScaledOsc:
                return so_iv_[static_cast<std::size_t>(v.n)][static_cast<std::size_t>(v.i) - 1];
            case VertexKind::Gap:
                if (v.i >= 1)
                    return gap_iv_[static_cast<std::size_t>(v.n)]
                                  [static_cast<std::size_t>(v.i) - 1];
                return gap0_img_[static_cast<std::size_t>(v.n)];
            case VertexKind::Tail: return tail_img_[static_cast<std::size_t>(v.n)];
            case VertexKind::LeftHump: return {ylev_[1], Rational(4)};
            case VertexKind::Hump: return {Rational(0), Rational(4)};
            case VertexKind::Right: return {scale_[1] * ylev_[1], Rational(4)};
        }
        throw std::logic_error("image_of: bad kind");
    }

    // successor intervals in ascending position order (the tiling order of
    // the image), paired with their vertices
    template <class F>
    void emit_spans(const Vertex& v, F&& f) const {
        auto slab = [&](int k, int m_hi, int m_lo) {
            // scale-k slab, zones m_hi down to m_lo: gap then oscillator block
            for (int m = m_hi; m >= m_lo; --m) {
                auto sm = static_cast<std::size_t>(m);
                auto sk = static_cast<std::size_t>(k);
                f(gap_iv_[sm][sk], gap_vertex(m, k));
                f(so_iv_[sm][sk], scaled_osc_vertex(m, k));
            }
        };
        switch (v.kind) {
            case VertexKind::Osc: {
                auto sn = static_cast<std::size_t>(v.n);
                if (v.i >= 2) f(gap_iv_[sn][sn], gap_vertex(v.n, v.n));
                f(so_iv_[sn][sn], scaled_osc_vertex(v.n, v.n));
                return;
            }
            case VertexKind::ScaledOsc:
                if (v.i >= 2) {
                    f(so_iv_[static_cast<std::size_t>(v.n)][static_cast<std::size_t>(v.i) - 1],
                      scaled_osc_vertex(v.n, v.i - 1));
                } else {
                    auto sn = static_cast<std::size_t>(v.n);
                    Rational t = xlev_[sn];
                    for (long i = 1; i <= M[sn]; ++i) {
                        Rational t_next = t + lapw_[sn];
                        f(VertexInterval{t, t_next}, osc_vertex(v.n, i));
                        t = t_next;
                    }
                }
                return;
            case VertexKind::Gap:
                if (v.i >= 1) {
                    f(gap_iv_[static_cast<std::size_t>(v.n)][static_cast<std::size_t>(v.i) - 1],
                      gap_vertex(v.n, v.i - 1));
                } else {
                    if (v.n + 1 <= N)
                        f(tail_iv_[static_cast<std::size_t>(v.n) + 1], tail_vertex(v.n + 1));
                    slab(v.n, N, v.n + 1);
                    f(gap_iv_[static_cast<std::size_t>(v.n)][static_cast<std::size_t>(v.n)],
                      gap_vertex(v.n, v.n));
                }
                return;
            case VertexKind::Tail: {
                int m = v.n - 1;
                if (m >= 2) {
                    auto sm = static_cast<std::size_t>(m);
                    f(gap_iv_[sm][sm], gap_vertex(m, m));
                    f(so_iv_[sm][sm], scaled_osc_vertex(m, m));
                    f(tail_iv_[sm], tail_vertex(m));
                } else {
                    f(gap_iv_[1][1], gap_vertex(1, 1));
                    f(so_iv_[1][1], scaled_osc_vertex(1, 1));
                    f(interval_of(left_hump_vertex()), left_hump_vertex());
                    f(interval_of(hump_vertex()), hump_vertex());
                }
                return;
            }
            case VertexKind::LeftHump:
                f(interval_of(right_vertex()), right_vertex());
                return;
            case VertexKind::Hump:
                // scaled slabs with their tails, deepest first; tail(k) tops
                // out exactly where slab k-1 territory begins
                for (int k = N; k >= 1; --k) {
                    slab(k, N, k);
                    if (k >= 2) f(tail_iv_[static_cast<std::size_t>(k)], tail_vertex(k));
                }
                [[fallthrough]];
            case VertexKind::Right:
                f(interval_of(left_hump_vertex()), left_hump_vertex());
                f(interval_of(hump_vertex()), hump_vertex());
                // depth-0 zones from the deepest level up, then the right piece
                for (int m = N; m >= 1; --m) {
                    auto sm = static_cast<std::size_t>(m);
                    f(gap_iv_[sm][0], gap_vertex(m, 0));
                    Rational t = xlev_[sm];
                    for (long i = 1; i <= M[sm]; ++i) {
                        Rational t_next = t + lapw_[sm];
                        f(VertexInterval{t, t_next}, osc_vertex(m, i));
                        t = t_next;
                    }
                }
                f(interval_of(right_vertex()), right_vertex());
                return;
        }
    }

    long index_of(const Vertex& v) const {
        switch (v.kind) {
            case VertexKind::Osc:
                if (v.n < 1 || v.n > N || v.i < 1 || v.i > M[static_cast<std::size_t>(v.n)])
                    return -1;
                return osc_base[static_cast<std::size_t>(v.n)] + (v.i - 1);
            case VertexKind::ScaledOsc:
                if (v.n < 1 || v.n > N || v.i < 1 || v.i > v.n) return -1;
                return so_base[static_cast<std::size_t>(v.n)] + (v.i - 1);
            case VertexKind::Gap:
                if (v.n < 1 || v.n > N || v.i < 0 || v.i > v.n) return -1;
                return gap_base[static_cast<std::size_t>(v.n)] + v.i;
            case VertexKind::Tail:
                if (v.n < 2 || v.n > N) return -1;
                return tail_base + (v.n - 2);
            case VertexKind::LeftHump: return special_base;
            case VertexKind::Hump: return special_base + 1;
            case VertexKind::Right: return special_base + 2;
        }
        return -1;
    }

    // emits successor indices in ascending (canonical) order
    template <class F>
    void for_each_successor(const Vertex& v, F&& f) const {
        switch (v.kind) {
            case VertexKind::Osc:
                f(index_of(scaled_osc_vertex(v.n, v.n)));
                if (v.i >= 2) f(index_of(gap_vertex(v.n, v.n)));
                return;
            case VertexKind::ScaledOsc:
                if (v.i >= 2) {
                    f(index_of(scaled_osc_vertex(v.n, v.i - 1)));
                } else {
                    long base = osc_base[static_cast<std::size_t>(v.n)];
                    for (long j = 0; j < M[static_cast<std::size_t>(v.n)]; ++j) f(base + j);
                }
                return;
            case VertexKind::Gap:
                if (v.i >= 1) {
                    f(index_of(gap_vertex(v.n, v.i - 1)));
                } else {
                    // the image tops out at lambda^{-nr} x_n, below so(n,n)
                    for (int m = v.n + 1; m <= N; ++m) f(index_of(scaled_osc_vertex(m, v.n)));
                    for (int m = v.n; m <= N; ++m) f(index_of(gap_vertex(m, v.n)));
                    if (v.n + 1 <= N) f(index_of(tail_vertex(v.n + 1)));
                }
                return;
            case VertexKind::Tail:
                if (v.n >= 3) {
                    f(index_of(scaled_osc_vertex(v.n - 1, v.n - 1)));
                    f(index_of(gap_vertex(v.n - 1, v.n - 1)));
                    f(index_of(tail_vertex(v.n - 1)));
                } else {
                    f(index_of(scaled_osc_vertex(1, 1)));
                    f(index_of(gap_vertex(1, 1)));
                    f(special_base);     // left_hump
                    f(special_base + 1); // hump
                }
                return;
            case VertexKind::LeftHump: f(special_base + 2); return;
            case VertexKind::Hump: {
                long V = static_cast<long>(verts.size());
                for (long j = 0; j < V; ++j) f(j);
                return;
            }
            case VertexKind::Right:
                for (int n = 1; n <= N; ++n) {
                    long base = osc_base[static_cast<std::size_t>(n)];
                    for (long j = 0; j < M[static_cast<std::size_t>(n)]; ++j) f(base + j);
                }
                for (int n = 1; n <= N; ++n) f(index_of(gap_vertex(n, 0)));
                f(special_base);
                f(special_base + 1);
                f(special_base + 2);
                return;
        }
    }

    long degree_of(const Vertex& v) const {
        switch (v.kind) {
            case VertexKind::Osc: return v.i >= 2 ? 2 : 1;
            case VertexKind::ScaledOsc:
                return v.i >= 2 ? 1 : M[static_cast<std::size_t>(v.n)];
            case VertexKind::Gap:
                if (v.i >= 1) return 1;
                return (N - v.n) + (N - v.n + 1) + (v.n + 1 <= N ? 1 : 0);
            case VertexKind::Tail: return v.n >= 3 ? 3 : 4;
            case VertexKind::LeftHump: return 1;
            case VertexKind::Hump: return static_cast<long>(verts.size());
            case VertexKind::Right: {
                long total = 3 + N;
                for (int n = 1; n <= N; ++n) total += M[static_cast<std::size_t>(n)];
                return total;
            }
        }
        return 0;
    }
};

MarkovGraph MarkovGraph::build(const MapParams& p, const GraphOptions& opt) {
    if (opt.N < 1) throw std::domain_error("graph truncation must be >= 1");
    if (opt.N > kExplicitCap)
        throw std::domain_error("explicit graph capped at N=6; use QuotientGraph beyond");
    auto d = std::make_shared<Data>();
    d->par = p;
    d->opt = opt;
    d->N = opt.N;
    d->M.assign(static_cast<std::size_t>(d->N) + 1, 0);
    for (int n = 1; n <= d->N; ++n) {
        long base = M_of(p.lambda, n).convert_to<long>();
        auto it = opt.extra_laps.find(n);
        long extra = it == opt.extra_laps.end() ? 0 : it->second;
        long m = base + extra;
        if (extra != 0) {
            // the widened level must stay a valid lap count: odd, within the
            // growth window floor bounds
            Rational g = pow_rat(p.lambda, n) / Rational(static_cast<long>(n) * n);
            if (m % 2 == 0 || !(g / 2 <= Rational(m) && Rational(m) <= g))
                throw std::domain_error("extra_laps breaks the lap-count window at level " +
                                        std::to_string(n));
        }
        d->M[static_cast<std::size_t>(n)] = m;
    }

    d->osc_base.assign(static_cast<std::size_t>(d->N) + 1, 0);
    d->so_base.assign(static_cast<std::size_t>(d->N) + 1, 0);
    d->gap_base.assign(static_cast<std::size_t>(d->N) + 1, 0);
    long cursor = 0;
    for (int n = 1; n <= d->N; ++n) {
        d->osc_base[static_cast<std::size_t>(n)] = cursor;
        cursor += d->M[static_cast<std::size_t>(n)];
    }
    for (int n = 1; n <= d->N; ++n) {
        d->so_base[static_cast<std::size_t>(n)] = cursor;
        cursor += n;
    }
    for (int n = 1; n <= d->N; ++n) {
        d->gap_base[static_cast<std::size_t>(n)] = cursor;
        cursor += n + 1;
    }
    d->tail_base = cursor;
    cursor += std::max(0, d->N - 1);
    d->special_base = cursor;
    cursor += 3;

    d->verts.reserve(static_cast<std::size_t>(cursor));
    for (int n = 1; n <= d->N; ++n)
        for (long i = 1; i <= d->M[static_cast<std::size_t>(n)]; ++i)
            d->verts.push_back(osc_vertex(n, i));
    for (int n = 1; n <= d->N; ++n)
        for (long k = 1; k <= n; ++k) d->verts.push_back(scaled_osc_vertex(n, k));
    for (int n = 1; n <= d->N; ++n)
        for (long k = 0; k <= n; ++k) d->verts.push_back(gap_vertex(n, k));
    for (int n = 2; n <= d->N; ++n) d->verts.push_back(tail_vertex(n));
    d->verts.push_back(left_hump_vertex());
    d->verts.push_back(hump_vertex());
    d->verts.push_back(right_vertex());
    if (static_cast<long>(d->verts.size()) != cursor)
        throw std::logic_error("vertex layout mismatch");
    d->build_geometry();

    long V = cursor;
    d->offs.assign(static_cast<std::size_t>(V) + 1, 0);
    for (long v = 0; v < V; ++v)
        d->offs[static_cast<std::size_t>(v) + 1] =
            d->offs[static_cast<std::size_t>(v)] +
            d->degree_of(d->verts[static_cast<std::size_t>(v)]);
    d->targets.assign(static_cast<std::size_t>(d->offs.back()), 0);
    for (long v = 0; v < V; ++v) {
        long at = d->offs[static_cast<std::size_t>(v)];
        d->for_each_successor(d->verts[static_cast<std::size_t>(v)], [&](long t) {
            if (t < 0) throw std::logic_error("successor rule produced a missing vertex");
            d->targets[static_cast<std::size_t>(at++)] = static_cast<std::int32_t>(t);
        });
        if (at != d->offs[static_cast<std::size_t>(v) + 1])
            throw std::logic_error("degree table disagrees with successor rule");
    }

    struct CsrSucc {
        const Data* d;
        long degree(long v) const {
            return d->offs[static_cast<std::size_t>(v) + 1] - d->offs[static_cast<std::size_t>(v)];
        }
        long target(long v, long pos) const {
            return d->targets[static_cast<std::size_t>(d->offs[static_cast<std::size_t>(v)] + pos)];
        }
    };
    d->sccs = tarjan_sccs(V, CsrSucc{d.get()}, d->comp);

    MarkovGraph g;
    g.d_ = std::move(d);
    return g;
}

const MapParams& MarkovGraph::params() const { return d_->par; }
int MarkovGraph::truncation() const { return d_->N; }

long MarkovGraph::lap_count(int n) const {
    if (n < 1 || n > d_->N) throw std::domain_error("level outside truncation");
    return d_->M[static_cast<std::size_t>(n)];
}

long MarkovGraph::vertex_count() const { return static_cast<long>(d_->verts.size()); }
long MarkovGraph::edge_count() const { return static_cast<long>(d_->targets.size()); }
const std::vector<Vertex>& MarkovGraph::vertices() const { return d_->verts; }
long MarkovGraph::index_of(const Vertex& v) const { return d_->index_of(v); }

std::span<const std::int32_t> MarkovGraph::successors(long index) const {
    if (index < 0 || index >= vertex_count()) throw std::domain_error("vertex index out of range");
    auto lo = static_cast<std::size_t>(d_->offs[static_cast<std::size_t>(index)]);
    auto hi = static_cast<std::size_t>(d_->offs[static_cast<std::size_t>(index) + 1]);
    return {d_->targets.data() + lo, hi - lo};
}

std::vector<Vertex> MarkovGraph::rule_successors(const Vertex& v) const {
    if (d_->index_of(v) < 0) throw std::domain_error("vertex not in graph");
    std::vector<Vertex> out;
    // for_each_successor emits indices in ascending order, which is canonical
    d_->for_each_successor(v, [&](long t) {
        out.push_back(d_->verts[static_cast<std::size_t>(t)]);
    });
    return out;
}

ImageDecomposition MarkovGraph::image_decomposition(const Vertex& v) const {
    if (d_->index_of(v) < 0) throw std::domain_error("vertex not in graph");
    int N = d_->N;

    ImageDecomposition out;
    out.image = d_->image_of(v);
    out.zero_endpoint = out.image.lo == 0;

    auto residual_ok = [&](const VertexInterval& h) {
        if (h.hi <= d_->tail_bottom_) return true;
        for (int k = 0; k <= N; ++k) {
            const Rational& s = d_->scale_[static_cast<std::size_t>(k)];
            if (h.lo >= s && h.hi <= s * d_->hole_top_) return true;
        }
        return false;
    };

    Rational cursor = out.image.lo;
    d_->emit_spans(v, [&](const VertexInterval& ival, const Vertex& w) {
        if (ival.lo < out.image.lo || ival.hi > out.image.hi)
            throw std::logic_error("successor interval escapes the image of " + vertex_name(v));
        if (ival.lo > cursor) {
            VertexInterval hole{cursor, ival.lo};
            if (!residual_ok(hole))
                throw std::logic_error("image hole outside truncation region for " +
                                       vertex_name(v));
            out.residuals.push_back(hole);
        } else if (ival.lo < cursor) {
            throw std::logic_error("successor intervals overlap under " + vertex_name(v));
        }
        cursor = ival.hi;
        out.successors.push_back(w);
    });
    if (cursor < out.image.hi) {
        VertexInterval hole{cursor, out.image.hi};
        if (!residual_ok(hole))
            throw std::logic_error("image hole outside truncation region for " + vertex_name(v));
        out.residuals.push_back(hole);
    }
    std::sort(out.successors.begin(), out.successors.end());
    return out;
}

const std::vector<std::vector<long>>& MarkovGraph::sccs() const { return d_->sccs; }

long MarkovGraph::scc_of(long index) const {
    if (index < 0 || index >= vertex_count()) throw std::domain_error("vertex index out of range");
    return d_->comp[static_cast<std::size_t>(index)];
}

RadiusEnclosure MarkovGraph::scc_radius(long scc) const {
    if (scc < 0 || scc >= static_cast<long>(d_->sccs.size()))
        throw std::domain_error("scc index out of range");
    const std::vector<long>& members = d_->sccs[static_cast<std::size_t>(scc)];
    // members are sorted; local ids by binary search
    auto local = [&](long g) {
        auto it = std::lower_bound(members.begin(), members.end(), g);
        return (it != members.end() && *it == g)
                   ? static_cast<long>(it - members.begin())
                   : -1L;
    };
    std::vector<std::vector<std::int32_t>> adj(members.size());
    for (std::size_t li = 0; li < members.size(); ++li) {
        for (std::int32_t t : successors(members[li])) {
            if (d_->comp[static_cast<std::size_t>(t)] != scc) continue;
            adj[li].push_back(static_cast<std::int32_t>(local(t)));
        }
    }
    return certify_radius(members.size(), [&](const std::vector<double>& v,
                                              std::vector<double>& w) {
        for (std::size_t i = 0; i < adj.size(); ++i) {
            double acc = 0.0;
            for (std::int32_t t : adj[i]) acc += v[static_cast<std::size_t>(t)];
            w[i] = acc;
        }
    });
}

double MarkovGraph::spectral_entropy() const {
    return entropy_from_sccs(static_cast<long>(d_->sccs.size()),
                             [this](long s) { return scc_radius(s); });
}

std::string MarkovGraph::canonical_content() const { return canonical_content_without({}); }

std::string MarkovGraph::canonical_content_without(const std::vector<Vertex>& removed) const {
    std::vector<long> gone;
    for (const Vertex& v : removed) {
        long idx = d_->index_of(v);
        if (idx < 0) throw std::domain_error("cannot remove a vertex that is absent");
        gone.push_back(idx);
    }
    std::sort(gone.begin(), gone.end());
    auto alive = [&](long idx) {
        return !std::binary_search(gone.begin(), gone.end(), idx);
    };
    std::string sout;
    for (long v = 0; v < vertex_count(); ++v) {
        if (!alive(v)) continue;
        sout += vertex_name(d_->verts[static_cast<std::size_t>(v)]);
        sout += " ->";
        for (std::int32_t t : successors(v)) {
            if (!alive(t)) continue;
            sout += ' ';
            sout += vertex_name(d_->verts[static_cast<std::size_t>(t)]);
        }
        sout += '\n';
    }
    return sout;
}

std::string MarkovGraph::export_dot() const {
    std::ostringstream os;
    os << "digraph markov {\n";
    os << "  rankdir=LR;\n";
    for (long v = 0; v < vertex_count(); ++v) {
        const Vertex& vx = d_->verts[static_cast<std::size_t>(v)];
        os << "  \"" << vertex_name(vx) << '"';
        // dashed: the image keeps reaching below the truncation depth
        bool truncated = vx.kind == VertexKind::Hump || vx.kind == VertexKind::Right ||
                         (vx.kind == VertexKind::Gap && vx.i == 0);
        if (truncated) os << " [style=dashed]";
        os << ";\n";
    }
    for (long v = 0; v < vertex_count(); ++v) {
        const std::string from = vertex_name(d_->verts[static_cast<std::size_t>(v)]);
        for (std::int32_t t : successors(v))
            os << "  \"" << from << "\" -> \""
               << vertex_name(d_->verts[static_cast<std::size_t>(t)]) << "\";\n";
    }
    os << "}\n";
    return os.str();
}

std::string MarkovGraph::to_json() const {
    ojson j;
    j["lambda"] = to_fraction_string(d_->par.lambda);
    j["r"] = d_->par.r;
    j["N"] = d_->N;
    ojson laps = ojson::array();
    for (int n = 1; n <= d_->N; ++n) laps.push_back(d_->M[static_cast<std::size_t>(n)]);
    j["laps"] = laps;
    j["vertex_count"] = vertex_count();
    j["edge_count"] = edge_count();
    ojson names = ojson::array();
    for (const Vertex& v : d_->verts) names.push_back(vertex_name(v));
    j["vertices"] = names;
    ojson adj = ojson::array();
    for (long v = 0; v < vertex_count(); ++v) {
        ojson row = ojson::array();
        for (std::int32_t t : successors(v)) row.push_back(t);
        adj.push_back(std::move(row));
    }
    j["adjacency"] = adj;
    return j.dump(1);
}

MarkovGraph MarkovGraph::from_json(const std::string& text) {
    ojson j = ojson::parse(text);
    MapParams p = MapParams::make(rational_from_fraction_string(j.at("lambda").get<std::string>()),
                                  j.at("r").get<int>());
    GraphOptions opt;
    opt.N = j.at("N").get<int>();
    if (opt.N < 1 || opt.N > kExplicitCap) throw std::runtime_error("graph json: bad truncation");
    auto laps = j.at("laps");
    if (static_cast<int>(laps.size()) != opt.N)
        throw std::runtime_error("graph json: lap table size mismatch");
    for (int n = 1; n <= opt.N; ++n) {
        long stored = laps.at(static_cast<std::size_t>(n - 1)).get<long>();
        long base = M_of(p.lambda, n).convert_to<long>();
        if (stored != base) opt.extra_laps[n] = stored - base;
    }
    MarkovGraph g = build(p, opt);
    if (j.at("vertex_count").get<long>() != g.vertex_count() ||
        j.at("edge_count").get<long>() != g.edge_count())
        throw std::runtime_error("graph json: counts disagree with rebuild");
    const auto& names = j.at("vertices");
    if (static_cast<long>(names.size()) != g.vertex_count())
        throw std::runtime_error("graph json: vertex list disagrees with rebuild");
    for (long v = 0; v < g.vertex_count(); ++v)
        if (names.at(static_cast<std::size_t>(v)).get<std::string>() !=
            vertex_name(g.d_->verts[static_cast<std::size_t>(v)]))
            throw std::runtime_error("graph json: vertex list disagrees with rebuild");
    const auto& adj = j.at("adjacency");
    if (static_cast<long>(adj.size()) != g.vertex_count())
        throw std::runtime_error("graph json: adjacency disagrees with rebuild");
    for (long v = 0; v < g.vertex_count(); ++v) {
        auto row = adj.at(static_cast<std::size_t>(v));
        auto succ = g.successors(v);
        if (row.size() != succ.size())
            throw std::runtime_error("graph json: adjacency disagrees with rebuild");
        for (std::size_t k = 0; k < succ.size(); ++k)
            if (row.at(k).get<std::int32_t>() != succ[k])
                throw std::runtime_error("graph json: adjacency disagrees with rebuild");
    }
    return g;
}

// ---------------------------------------------------------------------------

struct QuotientGraph::Data {
    MapParams par;
    GraphOptions opt;
    int N = 0;
    std::vector<long> M;
    std::vector<ClassInfo> classes;
    std::vector<std::vector<std::pair<long, double>>> mult;
    std::vector<long> comp;
    std::vector<std::vector<long>> sccs;
    long osc_first_base = 0; // pairs (first, rest) per level
    std::vector<long> so_base, gap_base;
    long tail_base = 0, special_base = 0;

    long class_index(const Vertex& v) const {
        switch (v.kind) {
            case VertexKind::Osc:
                if (v.n < 1 || v.n > N || v.i < 1 || v.i > M[static_cast<std::size_t>(v.n)])
                    return -1;
                return 2 * (v.n - 1) + (v.i == 1 ? 0 : 1);
            case VertexKind::ScaledOsc:
                if (v.n < 1 || v.n > N || v.i < 1 || v.i > v.n) return -1;
                return so_base[static_cast<std::size_t>(v.n)] + (v.i - 1);
            case VertexKind::Gap:
                if (v.n < 1 || v.n > N || v.i < 0 || v.i > v.n) return -1;
                return gap_base[static_cast<std::size_t>(v.n)] + v.i;
            case VertexKind::Tail:
                if (v.n < 2 || v.n > N) return -1;
                return tail_base + (v.n - 2);
            case VertexKind::LeftHump: return special_base;
            case VertexKind::Hump: return special_base + 1;
            case VertexKind::Right: return special_base + 2;
        }
        return -1;
    }
};

QuotientGraph QuotientGraph::build(const MapParams& p, const GraphOptions& opt) {
    if (opt.N < 1) throw std::domain_error("graph truncation must be >= 1");
    if (opt.N > kQuotientCap) throw std::domain_error("quotient graph capped at N=16");
    auto d = std::make_shared<Data>();
    d->par = p;
    d->opt = opt;
    d->N = opt.N;
    d->M.assign(static_cast<std::size_t>(d->N) + 1, 0);
    for (int n = 1; n <= d->N; ++n) {
        long base = M_of(p.lambda, n).convert_to<long>();
        auto it = opt.extra_laps.find(n);
        d->M[static_cast<std::size_t>(n)] = base + (it == opt.extra_laps.end() ? 0 : it->second);
        if (d->M[static_cast<std::size_t>(n)] < 2)
            throw std::domain_error("quotient needs at least two laps per level");
    }

    d->so_base.assign(static_cast<std::size_t>(d->N) + 1, 0);
    d->gap_base.assign(static_cast<std::size_t>(d->N) + 1, 0);
    long cursor = 2L * d->N;
    for (int n = 1; n <= d->N; ++n) {
        d->so_base[static_cast<std::size_t>(n)] = cursor;
        cursor += n;
    }
    for (int n = 1; n <= d->N; ++n) {
        d->gap_base[static_cast<std::size_t>(n)] = cursor;
        cursor += n + 1;
    }
    d->tail_base = cursor;
    cursor += std::max(0, d->N - 1);
    d->special_base = cursor;
    cursor += 3;

    d->classes.reserve(static_cast<std::size_t>(cursor));
    for (int n = 1; n <= d->N; ++n) {
        d->classes.push_back({osc_vertex(n, 1), 1.0});
        d->classes.push_back(
            {osc_vertex(n, 2), static_cast<double>(d->M[static_cast<std::size_t>(n)] - 1)});
    }
    for (int n = 1; n <= d->N; ++n)
        for (long k = 1; k <= n; ++k) d->classes.push_back({scaled_osc_vertex(n, k), 1.0});
    for (int n = 1; n <= d->N; ++n)
        for (long k = 0; k <= n; ++k) d->classes.push_back({gap_vertex(n, k), 1.0});
    for (int n = 2; n <= d->N; ++n) d->classes.push_back({tail_vertex(n), 1.0});
    d->classes.push_back({left_hump_vertex(), 1.0});
    d->classes.push_back({hump_vertex(), 1.0});
    d->classes.push_back({right_vertex(), 1.0});
    if (static_cast<long>(d->classes.size()) != cursor)
        throw std::logic_error("class layout mismatch");

    d->mult.assign(d->classes.size(), {});
    auto add = [&](long from, long to, double m) {
        d->mult[static_cast<std::size_t>(from)].emplace_back(to, m);
    };
    for (long c = 0; c < cursor; ++c) {
        const Vertex& v = d->classes[static_cast<std::size_t>(c)].rep;
        switch (v.kind) {
            case VertexKind::Osc:
                add(c, d->class_index(scaled_osc_vertex(v.n, v.n)), 1.0);
                if (v.i != 1) add(c, d->class_index(gap_vertex(v.n, v.n)), 1.0);
                break;
            case VertexKind::ScaledOsc:
                if (v.i >= 2) {
                    add(c, d->class_index(scaled_osc_vertex(v.n, v.i - 1)), 1.0);
                } else {
                    add(c, d->class_index(osc_vertex(v.n, 1)), 1.0);
                    add(c, d->class_index(osc_vertex(v.n, 2)),
                        static_cast<double>(d->M[static_cast<std::size_t>(v.n)] - 1));
                }
                break;
            case VertexKind::Gap:
                if (v.i >= 1) {
                    add(c, d->class_index(gap_vertex(v.n, v.i - 1)), 1.0);
                } else {
                    for (int m = v.n + 1; m <= d->N; ++m)
                        add(c, d->class_index(scaled_osc_vertex(m, v.n)), 1.0);
                    for (int m = v.n; m <= d->N; ++m)
                        add(c, d->class_index(gap_vertex(m, v.n)), 1.0);
                    if (v.n + 1 <= d->N) add(c, d->class_index(tail_vertex(v.n + 1)), 1.0);
                }
                break;
            case VertexKind::Tail:
                if (v.n >= 3) {
                    add(c, d->class_index(scaled_osc_vertex(v.n - 1, v.n - 1)), 1.0);
                    add(c, d->class_index(gap_vertex(v.n - 1, v.n - 1)), 1.0);
                    add(c, d->class_index(tail_vertex(v.n - 1)), 1.0);
                } else {
                    add(c, d->class_index(scaled_osc_vertex(1, 1)), 1.0);
                    add(c, d->class_index(gap_vertex(1, 1)), 1.0);
                    add(c, d->special_base, 1.0);
                    add(c, d->special_base + 1, 1.0);
                }
                break;
            case VertexKind::LeftHump: add(c, d->special_base + 2, 1.0); break;
            case VertexKind::Hump:
                for (long t = 0; t < cursor; ++t)
                    add(c, t, d->classes[static_cast<std::size_t>(t)].size);
                break;
            case VertexKind::Right:
                for (int n = 1; n <= d->N; ++n) {
                    add(c, d->class_index(osc_vertex(n, 1)), 1.0);
                    add(c, d->class_index(osc_vertex(n, 2)),
                        static_cast<double>(d->M[static_cast<std::size_t>(n)] - 1));
                }
                for (int n = 1; n <= d->N; ++n) add(c, d->class_index(gap_vertex(n, 0)), 1.0);
                add(c, d->special_base, 1.0);
                add(c, d->special_base + 1, 1.0);
                add(c, d->special_base + 2, 1.0);
                break;
        }
    }

    struct ListSucc {
        const Data* d;
        long degree(long v) const {
            return static_cast<long>(d->mult[static_cast<std::size_t>(v)].size());
        }
        long target(long v, long pos) const {
            return d->mult[static_cast<std::size_t>(v)][static_cast<std::size_t>(pos)].first;
        }
    };
    d->sccs = tarjan_sccs(cursor, ListSucc{d.get()}, d->comp);

    QuotientGraph q;
    q.d_ = std::move(d);
    return q;
}

int QuotientGraph::truncation() const { return d_->N; }
const std::vector<QuotientGraph::ClassInfo>& QuotientGraph::classes() const {
    return d_->classes;
}

long QuotientGraph::class_of(const Vertex& v) const {
    long c = d_->class_index(v);
    if (c < 0) throw std::domain_error("vertex not represented in quotient");
    return c;
}

const std::vector<std::vector<std::pair<long, double>>>& QuotientGraph::multiplicity() const {
    return d_->mult;
}

const std::vector<std::vector<long>>& QuotientGraph::sccs() const { return d_->sccs; }

RadiusEnclosure QuotientGraph::scc_radius(long scc) const {
    if (scc < 0 || scc >= static_cast<long>(d_->sccs.size()))
        throw std::domain_error("scc index out of range");
    const std::vector<long>& members = d_->sccs[static_cast<std::size_t>(scc)];
    auto local = [&](long g) {
        auto it = std::lower_bound(members.begin(), members.end(), g);
        return (it != members.end() && *it == g)
                   ? static_cast<long>(it - members.begin())
                   : -1L;
    };
    std::vector<std::vector<std::pair<long, double>>> adj(members.size());
    for (std::size_t li = 0; li < members.size(); ++li)
        for (const auto& [t, m] : d_->mult[static_cast<std::size_t>(members[li])])
            if (d_->comp[static_cast<std::size_t>(t)] == scc) adj[li].emplace_back(local(t), m);
    return certify_radius(members.size(), [&](const std::vector<double>& v,
                                              std::vector<double>& w) {
        for (std::size_t i = 0; i < adj.size(); ++i) {
            double acc = 0.0;
            for (const auto& [t, m] : adj[i]) acc += m * v[static_cast<std::size_t>(t)];
            w[i] = acc;
        }
    });
}

double QuotientGraph::spectral_entropy() const {
    return entropy_from_sccs(static_cast<long>(d_->sccs.size()),
                             [this](long s) { return scc_radius(s); });
}

long QuotientGraph::core_scc() const {
    return d_->comp[static_cast<std::size_t>(d_->special_base + 1)];
}

long QuotientGraph::top_scc() const {
    return d_->comp[static_cast<std::size_t>(d_->class_index(osc_vertex(d_->N, 1)))];
}

} // namespace mixmap
