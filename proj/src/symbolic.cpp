#include "mixmap/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace mixmap {

namespace {

// combined numerator+denominator size; the exact orbit switches to doubles
// once quadratic pieces have squared the representation past this
constexpr long kExactBitBudget = 4096;

long bit_size(const Rational& q) {
    BigInt num = boost::multiprecision::numerator(q);
    BigInt den = boost::multiprecision::denominator(q);
    long bits = static_cast<long>(boost::multiprecision::msb(den)) + 1;
    if (num < 0) num = -num;
    if (num != 0) bits += static_cast<long>(boost::multiprecision::msb(num)) + 1;
    return bits;
}

} // namespace

bool code_edge(const Vertex& v, const Vertex& w) {
    switch (v.kind) {
        case VertexKind::Osc:
            if (w == scaled_osc_vertex(v.n, v.n)) return true;
            return v.i >= 2 && w == gap_vertex(v.n, v.n);
        case VertexKind::ScaledOsc:
            if (v.i >= 2) return w == scaled_osc_vertex(v.n, v.i - 1);
            return w.kind == VertexKind::Osc && w.n == v.n;
        case VertexKind::Gap:
            if (v.i >= 1) return w == gap_vertex(v.n, v.i - 1);
            // gap(n,0) climbs into every deeper level at scale n plus the tail below
            if (w.kind == VertexKind::ScaledOsc) return w.i == v.n && w.n >= v.n + 1;
            if (w.kind == VertexKind::Gap) return w.i == v.n && w.n >= v.n;
            return w.kind == VertexKind::Tail && w.n == v.n + 1;
        case VertexKind::Tail:
            if (v.n >= 3)
                return w == scaled_osc_vertex(v.n - 1, v.n - 1) ||
                       w == gap_vertex(v.n - 1, v.n - 1) || w == tail_vertex(v.n - 1);
            return w == scaled_osc_vertex(1, 1) || w == gap_vertex(1, 1) ||
                   w == left_hump_vertex() || w == hump_vertex();
        case VertexKind::LeftHump: return w == right_vertex();
        case VertexKind::Hump: return true;
        case VertexKind::Right:
            if (w.kind == VertexKind::Osc) return true;
            if (w.kind == VertexKind::Gap) return w.i == 0;
            return w.kind == VertexKind::LeftHump || w.kind == VertexKind::Hump ||
                   w.kind == VertexKind::Right;
    }
    return false;
}

std::vector<Vertex> locate_any_level(const MapParams& p, const Rational& x) {
    if (x == 0) return {};
    try {
        return locate_vertex(p, x, PiecewiseMap::hard_cap());
    } catch (const std::overflow_error&) {
        return {}; // a vertex exists down there, but its lap index is unnameable
    }
}

Itinerary itinerary_of_point(const PiecewiseMap& m, double x, int length) {
    Itinerary res;
    const Rational margin(BigInt(1), BigInt(1000000000000LL));
    double cur = x;
    for (int j = 0; j < length; ++j) {
        if (!(cur >= 0 && cur <= 4)) {
            res.exceptional = true;
            break;
        }
        Rational xr = rational_from_double(cur);
        std::vector<Vertex> hits = locate_any_level(m.params(), xr);
        if (hits.size() != 1) {
            res.exceptional = true;
            break;
        }
        VertexInterval iv = vertex_interval(m.params(), hits[0]);
        if (xr - iv.lo < margin || iv.hi - xr < margin) {
            res.exceptional = true;
            break;
        }
        res.symbols.push_back(hits[0]);
        cur = m.eval(cur);
    }
    return res;
}

std::vector<std::vector<Vertex>> preimage_codes(const PiecewiseMap& m, const Rational& x,
                                                int depth) {
    if (depth < 1) throw std::invalid_argument("preimage_codes: depth must be positive");
    const MapParams& p = m.params();

    // orbit first: candidates per step, exact while the rationals stay small
    std::vector<std::vector<Vertex>> cand(depth);
    {
        Rational xr = x;
        double xd = 0;
        bool exact = true;
        for (int j = 0; j < depth; ++j) {
            if (exact && bit_size(xr) > kExactBitBudget) {
                xd = to_double(xr);
                exact = false;
            }
            cand[j] = locate_any_level(p, exact ? xr : rational_from_double(xd));
            if (cand[j].empty()) return {}; // orbit died: no code reaches full depth
            if (j + 1 == depth) break;
            if (exact) {
                try {
                    xr = m.eval_exact(xr);
                } catch (const std::exception&) {
                    return {}; // deeper than the cap: exact evaluation refuses
                }
            } else {
                xd = m.eval(xd);
            }
        }
    }

    std::vector<std::vector<Vertex>> out;
    std::vector<Vertex> path;
    std::function<void(int)> grow = [&](int j) {
        if (j == depth) {
            if (out.size() >= 64) throw std::runtime_error("preimage_codes: code explosion");
            out.push_back(path);
            return;
        }
        for (const Vertex& v : cand[j]) {
            if (j > 0 && !code_edge(path.back(), v)) continue;
            path.push_back(v);
            grow(j + 1);
            path.pop_back();
        }
    };
    grow(0);
    return out;
}

CylinderPoint point_of_itinerary(const PiecewiseMap& m, const std::vector<Vertex>& code) {
    if (code.empty()) throw std::invalid_argument("point_of_itinerary: empty code");
    const MapParams& p = m.params();
    for (std::size_t j = 0; j + 1 < code.size(); ++j)
        if (!code_edge(code[j], code[j + 1]))
            throw std::invalid_argument("point_of_itinerary: inadmissible step " +
                                        std::to_string(j) + ": " + vertex_name(code[j]) +
                                        " -> " + vertex_name(code[j + 1]));

    VertexInterval last = vertex_interval(p, code.back());
    double jlo = to_double(last.lo), jhi = to_double(last.hi);
    for (std::size_t j = code.size() - 1; j-- > 0;) {
        VertexInterval vi = vertex_interval(p, code[j]);
        double A = to_double(vi.lo), B = to_double(vi.hi);
        // branch endpoints exactly; every coded piece is monotone
        double fa = to_double(m.eval_exact(vi.lo));
        double fb = to_double(m.eval_exact(vi.hi));
        bool rising = fb >= fa;
        double lo_img = rising ? fa : fb, hi_img = rising ? fb : fa;
        double tlo = std::max(jlo, lo_img), thi = std::min(jhi, hi_img);
        if (!(tlo <= thi)) tlo = thi = std::clamp(jlo, lo_img, hi_img);
        auto pull = [&](double t) {
            double a = A, b = B;
            for (int it = 0; it < 60; ++it) {
                double c = 0.5 * (a + b);
                double fc = m.eval_fast(c);
                bool keep_left = rising ? (fc >= t) : (fc <= t);
                (keep_left ? b : a) = c;
            }
            return 0.5 * (a + b);
        };
        double xlo = pull(rising ? tlo : thi);
        double xhi = pull(rising ? thi : tlo);
        jlo = std::min(xlo, xhi);
        jhi = std::max(xlo, xhi);
    }
    return {0.5 * (jlo + jhi), (jhi - jlo) + 1e-15};
}

CylinderPoint point_of_periodic_itinerary(const PiecewiseMap& m, const std::vector<Vertex>& cycle,
                                          double tol) {
    if (cycle.empty()) throw std::invalid_argument("point_of_periodic_itinerary: empty cycle");
    if (!code_edge(cycle.back(), cycle.front()))
        throw std::invalid_argument("point_of_periodic_itinerary: cycle does not close");
    std::vector<Vertex> code = cycle;
    CylinderPoint best = point_of_itinerary(m, code);
    while (best.diameter >= tol && code.size() * 2 <= 10000) {
        std::vector<Vertex> doubled = code;
        doubled.insert(doubled.end(), code.begin(), code.end());
        code = std::move(doubled);
        best = point_of_itinerary(m, code);
    }
    return best;
}

} // namespace mixmap
