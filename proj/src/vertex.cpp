#include "mixmap/vertex.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace mixmap {

Vertex osc_vertex(int n, long i) { return Vertex{VertexKind::Osc, n, i}; }
Vertex scaled_osc_vertex(int n, long k) { return Vertex{VertexKind::ScaledOsc, n, k}; }
Vertex gap_vertex(int n, long k) { return Vertex{VertexKind::Gap, n, k}; }
Vertex tail_vertex(int n) { return Vertex{VertexKind::Tail, n, 0}; }
Vertex left_hump_vertex() { return Vertex{VertexKind::LeftHump, 0, 0}; }
Vertex hump_vertex() { return Vertex{VertexKind::Hump, 0, 0}; }
Vertex right_vertex() { return Vertex{VertexKind::Right, 0, 0}; }

std::string vertex_name(const Vertex& v) {
    switch (v.kind) {
        case VertexKind::Osc: return "osc(" + std::to_string(v.n) + "," + std::to_string(v.i) + ")";
        case VertexKind::ScaledOsc:
            return "so(" + std::to_string(v.n) + "," + std::to_string(v.i) + ")";
        case VertexKind::Gap: return "gap(" + std::to_string(v.n) + "," + std::to_string(v.i) + ")";
        case VertexKind::Tail: return "tail(" + std::to_string(v.n) + ")";
        case VertexKind::LeftHump: return "left_hump";
        case VertexKind::Hump: return "hump";
        case VertexKind::Right: return "right";
    }
    throw std::logic_error("vertex_name: bad kind");
}

Vertex vertex_from_name(const std::string& name) {
    if (name == "left_hump") return left_hump_vertex();
    if (name == "hump") return hump_vertex();
    if (name == "right") return right_vertex();
    auto open = name.find('(');
    auto close = name.find(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw std::invalid_argument("vertex_from_name: cannot parse '" + name + "'");
    std::string head = name.substr(0, open);
    std::string args = name.substr(open + 1, close - open - 1);
    auto comma = args.find(',');
    if (head == "tail") {
        if (comma != std::string::npos) throw std::invalid_argument("tail takes one index");
        return tail_vertex(std::stoi(args));
    }
    if (comma == std::string::npos)
        throw std::invalid_argument("vertex_from_name: cannot parse '" + name + "'");
    int n = std::stoi(args.substr(0, comma));
    long i = std::stol(args.substr(comma + 1));
    if (head == "osc") return osc_vertex(n, i);
    if (head == "so") return scaled_osc_vertex(n, i);
    if (head == "gap") return gap_vertex(n, i);
    throw std::invalid_argument("vertex_from_name: unknown kind '" + head + "'");
}

VertexInterval vertex_interval(const MapParams& p, const Vertex& v) {
    BigInt M = (v.kind == VertexKind::Osc) ? M_of(p.lambda, v.n) : BigInt(0);
    return vertex_interval(p, v, M);
}

VertexInterval vertex_interval(const MapParams& p, const Vertex& v, const BigInt& M) {
    switch (v.kind) {
        case VertexKind::Osc: {
            if (v.n < 1 || v.i < 1 || Rational(v.i) > Rational(M))
                throw std::domain_error("osc vertex out of range");
            Rational x = level_x(v.n);
            Rational w = Rational(1, 2L * v.n * v.n) / Rational(M);
            return {x + Rational(v.i - 1) * w, x + Rational(v.i) * w};
        }
        case VertexKind::ScaledOsc: {
            if (v.n < 1 || v.i < 1 || v.i > v.n) throw std::domain_error("so vertex out of range");
            Rational s = p.scale(static_cast<int>(v.i));
            return {s * level_x(v.n), s * level_y(v.n)};
        }
        case VertexKind::Gap: {
            if (v.n < 1 || v.i < 0 || v.i > v.n) throw std::domain_error("gap vertex out of range");
            Rational s = p.scale(static_cast<int>(v.i));
            return {s * level_y(v.n + 1), s * level_x(v.n)};
        }
        case VertexKind::Tail: {
            if (v.n < 2) throw std::domain_error("tail vertex out of range");
            return {p.scale(v.n) * level_y(v.n), p.scale(v.n - 1)};
        }
        case VertexKind::LeftHump: return {Rational(5, 2) * p.delta(), Rational(1, 2)};
        case VertexKind::Hump: return {Rational(1, 2), Rational(1)};
        case VertexKind::Right: return {level_y(1), Rational(4)};
    }
    throw std::logic_error("vertex_interval: bad kind");
}

namespace {

constexpr long kLapMax = std::numeric_limits<long>::max();

// M_n as a long, for naming the top lap of a level; deep levels overflow
long top_lap_as_long(const MapParams& p, long n) {
    BigInt M = M_of(p.lambda, static_cast<int>(n));
    if (M > kLapMax)
        throw std::overflow_error("locate_vertex: lap index beyond representable range");
    return M.convert_to<long>();
}

// vertices meeting x within the scale-k slab lambda^{-kr}(1, y_1); u = lambda^{kr} x
void locate_in_slab(std::vector<Vertex>& out, const Rational& u, int k, int N) {
    Rational y_top = level_y(N + 1);
    if (u < y_top) return; // truncation hole
    if (u == y_top) {
        out.push_back(gap_vertex(N, k));
        return;
    }
    long m = zone_index(u); // u in [y_{m+1}, y_m), so m <= N here
    Rational ym = level_y(m), xm = level_x(m), ym1 = level_y(m + 1);
    if (u == ym1) {
        // shared corner: top of zone m+1's oscillator block, bottom of gap m
        if (m + 1 <= N) out.push_back(scaled_osc_vertex(static_cast<int>(m) + 1, k));
        out.push_back(gap_vertex(static_cast<int>(m), k));
        return;
    }
    if (u < xm) {
        out.push_back(gap_vertex(static_cast<int>(m), k));
    } else if (u == xm) {
        out.push_back(scaled_osc_vertex(static_cast<int>(m), k));
        out.push_back(gap_vertex(static_cast<int>(m), k));
    } else {
        out.push_back(scaled_osc_vertex(static_cast<int>(m), k));
    }
}

} // namespace

std::vector<Vertex> locate_vertex(const MapParams& p, const Rational& x, int N) {
    if (N < 1) throw std::domain_error("locate_vertex: N >= 1 required");
    if (x < 0 || x > 4) throw std::domain_error("locate_vertex: x outside [0,4]");
    std::vector<Vertex> out;
    Rational y1 = level_y(1);
    if (x == 0) return out; // 0 is below every vertex interval
    if (x > y1) {
        out.push_back(right_vertex());
        return out;
    }
    if (x == y1) {
        out.push_back(osc_vertex(1, top_lap_as_long(p, 1)));
        out.push_back(right_vertex());
        return out;
    }
    if (x > 1) {
        // depth-0 level zones; a zone splits into gap + oscillator laps
        Rational y_top = level_y(N + 1);
        if (x < y_top) return out; // truncation hole
        if (x == y_top) {
            out.push_back(gap_vertex(N, 0));
            return out;
        }
        long m = zone_index(x);
        Rational xm = level_x(m), ym1 = level_y(m + 1);
        if (x == ym1) {
            if (m + 1 <= N)
                out.push_back(osc_vertex(static_cast<int>(m) + 1, top_lap_as_long(p, m + 1)));
            out.push_back(gap_vertex(static_cast<int>(m), 0));
            return out;
        }
        if (x < xm) {
            out.push_back(gap_vertex(static_cast<int>(m), 0));
            return out;
        }
        // inside the oscillator block of zone m: pick the lap(s) around x
        LevelConstants lc = level_constants(p, static_cast<int>(m));
        if (lc.M > kLapMax)
            throw std::overflow_error("locate_vertex: lap index beyond representable range");
        // zone_index gives y_{m+1} <= x < y_m, so 0 <= j <= M-1 here
        Rational off = (x - xm) / lc.lap_width;
        BigInt j = floor_rat(off);
        if (Rational(j) == off) {
            // junction t_j: lap j on the left, lap j+1 on the right; t_0 == x_m
            if (j > 0) out.push_back(osc_vertex(static_cast<int>(m), j.convert_to<long>()));
            out.push_back(osc_vertex(static_cast<int>(m), j.convert_to<long>() + 1));
            if (j == 0) out.push_back(gap_vertex(static_cast<int>(m), 0));
        } else {
            out.push_back(osc_vertex(static_cast<int>(m), j.convert_to<long>() + 1));
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    if (x == 1) {
        out.push_back(hump_vertex());
        return out;
    }
    if (x > Rational(1, 2)) {
        out.push_back(hump_vertex());
        return out;
    }
    if (x == Rational(1, 2)) {
        out.push_back(left_hump_vertex());
        out.push_back(hump_vertex());
        return out;
    }
    Rational lh_lo = Rational(5, 2) * p.delta(); // == lambda^{-r} y_1
    if (x > lh_lo) {
        out.push_back(left_hump_vertex());
        return out;
    }
    if (x == lh_lo) {
        out.push_back(scaled_osc_vertex(1, 1));
        out.push_back(left_hump_vertex());
        return out;
    }
    // scaled region: slabs lambda^{-kr}(1, y_1) and the tails between them
    Rational u = x;
    for (int k = 1; k <= N; ++k) {
        u = u * p.lambda_r(); // u = lambda^{kr} x; entering the loop body means u <= lambda^r
        if (k >= 2) {
            // tail(k) covers [lambda^{-kr} y_k, lambda^{-(k-1)r}], i.e. u in [y_k, lambda^r]
            Rational yk = level_y(k);
            if (u > yk) {
                out.push_back(tail_vertex(k));
                return out;
            }
            if (u == yk) {
                out.push_back(scaled_osc_vertex(k, k));
                out.push_back(tail_vertex(k));
                return out;
            }
        }
        if (u > 1) {
            locate_in_slab(out, u, k, N);
            std::sort(out.begin(), out.end());
            return out;
        }
        // u <= 1: deeper than slab k; tail(k+1) tops out at lambda^{-kr}, i.e. u == 1
        if (u == 1) {
            if (k + 1 <= N) out.push_back(tail_vertex(k + 1));
            return out;
        }
    }
    return out; // below tail(N)
}

} // namespace mixmap
