#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mixmap/graph.hpp"
#include "mixmap/map_checks.hpp"
#include "mixmap/piecewise_map.hpp"
#include "mixmap/vertex.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

using namespace mixmap;

namespace {

const MapParams& par14() {
    static MapParams p = MapParams::make(14, 1);
    return p;
}

MarkovGraph graph14(int N) {
    GraphOptions opt;
    opt.N = N;
    return MarkovGraph::build(par14(), opt);
}

QuotientGraph quotient14(int N, std::map<int, long> extra = {}) {
    GraphOptions opt;
    opt.N = N;
    opt.extra_laps = std::move(extra);
    return QuotientGraph::build(par14(), opt);
}

// log(M_n)/(n+1) at lambda = 14; M_n = 13, 47, 303, 2399, 21511, 209151, 2151295, 23059203
constexpr double kExact[9] = {0.0,
                              1.2824746787307684,
                              1.2833825339033529,
                              1.4284332013773423,
                              1.5565614525679389,
                              1.6627199518642997,
                              1.7501159654451979,
                              1.8226975680449994,
                              1.8837306122439739};
constexpr double kLog14 = 2.6390573296152586;
constexpr double kOnePlusSqrt2 = 2.4142135623730950;
constexpr double kLogOnePlusSqrt2 = 0.8813735870195430;
constexpr double kSqrt13 = 3.6055512754639893;

bool contains(const RadiusEnclosure& e, double v) { return e.lo <= v && v <= e.hi; }

} // namespace

TEST_CASE("vertex names round-trip and intervals are exact") {
    const MapParams& p = par14();

    std::vector<Vertex> sample = {osc_vertex(1, 1),  osc_vertex(2, 47), scaled_osc_vertex(3, 2),
                                  gap_vertex(2, 0),  gap_vertex(4, 4),  tail_vertex(3),
                                  left_hump_vertex(), hump_vertex(),    right_vertex()};
    for (const Vertex& v : sample) CHECK(vertex_from_name(vertex_name(v)) == v);
    CHECK(vertex_name(scaled_osc_vertex(3, 1)) == "so(3,1)");
    CHECK_THROWS(vertex_from_name("blob(1,2)"));
    CHECK_THROWS(vertex_from_name("osc"));

    // lap 1 of level 1 starts at x_1 = 2 and is one lap wide
    VertexInterval o11 = vertex_interval(p, osc_vertex(1, 1));
    CHECK(o11.lo == Rational(2));
    CHECK(o11.hi == Rational(2) + Rational(1, 2) / Rational(13));
    VertexInterval oTop = vertex_interval(p, osc_vertex(1, 13));
    CHECK(oTop.hi == level_y(1));

    VertexInterval so21 = vertex_interval(p, scaled_osc_vertex(2, 1));
    CHECK(so21.lo == level_x(2) / Rational(14));
    CHECK(so21.hi == level_y(2) / Rational(14));

    VertexInterval g20 = vertex_interval(p, gap_vertex(2, 0));
    CHECK(g20.lo == level_y(3));
    CHECK(g20.hi == level_x(2));

    VertexInterval t3 = vertex_interval(p, tail_vertex(3));
    CHECK(t3.lo == level_y(3) / Rational(14 * 14 * 14));
    CHECK(t3.hi == Rational(1, 14 * 14));

    CHECK(vertex_interval(p, left_hump_vertex()).lo == Rational(5, 28));
    CHECK(vertex_interval(p, left_hump_vertex()).hi == Rational(1, 2));
    CHECK(vertex_interval(p, right_vertex()).lo == Rational(5, 2));
    CHECK(vertex_interval(p, right_vertex()).hi == Rational(4));

    CHECK_THROWS(vertex_interval(p, osc_vertex(1, 0)));
    CHECK_THROWS(vertex_interval(p, osc_vertex(1, 14)));
    CHECK_THROWS(vertex_interval(p, scaled_osc_vertex(1, 2)));
    CHECK_THROWS(vertex_interval(p, gap_vertex(2, 3)));
    CHECK_THROWS(vertex_interval(p, tail_vertex(1)));

    // lap-count override: the widened level keeps its endpoints and reslices
    VertexInterval oExt = vertex_interval(p, osc_vertex(2, 49), BigInt(49));
    CHECK(oExt.hi == level_y(2));
    CHECK_THROWS(vertex_interval(p, osc_vertex(2, 48)));
}

TEST_CASE("point location resolves every boundary corner") {
    const MapParams& p = par14();
    const int N = 4;
    auto at = [&](const Rational& x) { return locate_vertex(p, x, N); };
    using VV = std::vector<Vertex>;

    // interior points: exactly one vertex
    CHECK(at(Rational(3)) == VV{right_vertex()});
    CHECK(at(Rational(4)) == VV{right_vertex()});
    CHECK(at(Rational(3, 4)) == VV{hump_vertex()});
    CHECK(at(Rational(1)) == VV{hump_vertex()});
    CHECK(at(Rational(3, 10)) == VV{left_hump_vertex()});
    {
        VertexInterval iv = vertex_interval(p, osc_vertex(2, 5));
        CHECK(at((iv.lo + iv.hi) / 2) == VV{osc_vertex(2, 5)});
        VertexInterval gv = vertex_interval(p, gap_vertex(2, 0));
        CHECK(at((gv.lo + gv.hi) / 2) == VV{gap_vertex(2, 0)});
        Rational mid = (level_x(3) + level_y(3)) / 2;
        CHECK(at(mid / Rational(196)) == VV{scaled_osc_vertex(3, 2)});
        CHECK(at(Rational(2) / Rational(14 * 14 * 14)) == VV{tail_vertex(3)});
    }

    // two-sided corners
    CHECK(at(level_x(2)) == VV{osc_vertex(2, 1), gap_vertex(2, 0)});
    {
        LevelConstants lc2 = level_constants(p, 2);
        CHECK(at(lc2.t(BigInt(3))) == VV{osc_vertex(2, 3), osc_vertex(2, 4)});
    }
    CHECK(at(level_y(3)) == VV{osc_vertex(3, 303), gap_vertex(2, 0)});
    CHECK(at(level_y(1)) == VV{osc_vertex(1, 13), right_vertex()});
    CHECK(at(Rational(1, 2)) == VV{left_hump_vertex(), hump_vertex()});
    CHECK(at(Rational(5, 28)) == VV{scaled_osc_vertex(1, 1), left_hump_vertex()});

    // scaled copies of the corners
    CHECK(at(level_x(3) / Rational(196)) == VV{scaled_osc_vertex(3, 2), gap_vertex(3, 2)});
    CHECK(at(level_y(3) / Rational(14)) == VV{scaled_osc_vertex(3, 1), gap_vertex(2, 1)});
    CHECK(at(level_y(2) / Rational(196)) == VV{scaled_osc_vertex(2, 2), tail_vertex(2)});

    // powers of the contraction sit at tail tops
    CHECK(at(Rational(1, 14)) == VV{tail_vertex(2)});
    CHECK(at(Rational(1, 196)) == VV{tail_vertex(3)});
    CHECK(at(Rational(1, 2744)) == VV{tail_vertex(4)});
    CHECK(at(Rational(1, 38416)) == VV{});

    // truncation holes carry no vertex
    CHECK(at((Rational(1) + level_y(N + 1)) / 2) == VV{});
    CHECK(at((Rational(1) + level_y(N + 1)) / 2 / Rational(2744)) == VV{});
    CHECK(at(level_y(N + 1)) == VV{gap_vertex(N, 0)});
    CHECK(at(Rational(0)) == VV{});
    CHECK(at(Rational(1, 1000000)) == VV{});

    CHECK_THROWS(locate_vertex(p, Rational(-1), N));
    CHECK_THROWS(locate_vertex(p, Rational(5), N));
    CHECK_THROWS(locate_vertex(p, Rational(1), 0));

    // located vertices really contain the query point
    std::vector<Rational> probes = {Rational(1, 14),    Rational(5, 28),  Rational(1, 2),
                                    level_x(2),         level_y(3),       level_y(1),
                                    Rational(157, 100), Rational(21, 10), Rational(3)};
    for (const Rational& x : probes) {
        VV hits = at(x);
        CHECK(!hits.empty());
        for (const Vertex& v : hits) {
            VertexInterval iv = vertex_interval(p, v);
            CHECK(iv.lo <= x);
            CHECK(x <= iv.hi);
        }
    }
}

TEST_CASE("vertex counts and lookups at small depths") {
    struct Row {
        int N;
        long V, E;
    };
    const Row rows[] = {{1, 19, 77}, {2, 72, 329}, {3, 383, 1866}};
    for (const Row& row : rows) {
        MarkovGraph g = graph14(row.N);
        CHECK(g.truncation() == row.N);
        CHECK(g.vertex_count() == row.V);
        CHECK(g.edge_count() == row.E);
        const std::vector<Vertex>& verts = g.vertices();
        CHECK(std::is_sorted(verts.begin(), verts.end()));
        for (long i = 0; i < row.V; ++i) CHECK(g.index_of(verts[i]) == i);
        long edges = 0;
        for (long i = 0; i < row.V; ++i) edges += static_cast<long>(g.successors(i).size());
        CHECK(edges == row.E);
    }

    MarkovGraph g3 = graph14(3);
    CHECK(g3.lap_count(1) == 13);
    CHECK(g3.lap_count(2) == 47);
    CHECK(g3.lap_count(3) == 303);
    CHECK(g3.index_of(osc_vertex(4, 1)) == -1);
    CHECK(g3.index_of(tail_vertex(7)) == -1);
    CHECK(g3.index_of(osc_vertex(3, 304)) == -1);
    MarkovGraph g1 = graph14(1);
    CHECK(g1.index_of(tail_vertex(2)) == -1); // tails need depth >= 2
}

TEST_CASE("edges equal exact interval containment at depth 3") {
    MarkovGraph g = graph14(3);
    PiecewiseMap m = build_map(par14(), 8);
    const std::vector<Vertex>& verts = g.vertices();
    const long V = g.vertex_count();

    std::vector<VertexInterval> iv(V);
    for (long i = 0; i < V; ++i) iv[i] = vertex_interval(par14(), verts[i]);

    long straddles = 0, image_mismatch = 0, edge_mismatch = 0, rule_mismatch = 0;
    for (long i = 0; i < V; ++i) {
        ImageDecomposition dec = g.image_decomposition(verts[i]);
        RInterval img = map_image(m, RInterval{iv[i].lo, iv[i].hi});
        if (!(dec.image.lo == img.lo && dec.image.hi == img.hi)) ++image_mismatch;

        std::vector<long> oracle;
        for (long j = 0; j < V; ++j) {
            if (iv[j].lo >= img.lo && iv[j].hi <= img.hi) {
                oracle.push_back(j);
            } else if (std::max(iv[j].lo, img.lo) < std::min(iv[j].hi, img.hi)) {
                ++straddles; // a vertex interval must never cross the image boundary
            }
        }
        std::span<const std::int32_t> succ = g.successors(i);
        if (succ.size() != oracle.size()) {
            ++edge_mismatch;
        } else {
            for (std::size_t t = 0; t < oracle.size(); ++t)
                if (succ[t] != oracle[t]) ++edge_mismatch;
        }

        std::vector<Vertex> rs = g.rule_successors(verts[i]);
        if (rs != dec.successors) ++rule_mismatch;
        if (rs.size() == succ.size()) {
            for (std::size_t t = 0; t < rs.size(); ++t)
                if (verts[succ[t]] != rs[t]) ++rule_mismatch;
        } else {
            ++rule_mismatch;
        }
    }
    CHECK(image_mismatch == 0);
    CHECK(straddles == 0);
    CHECK(edge_mismatch == 0);
    CHECK(rule_mismatch == 0);
}

TEST_CASE("image decomposition tiles the image with hole residuals only") {
    const MapParams& p = par14();
    const int N = 3;
    MarkovGraph g = graph14(N);
    Rational below_tails = p.scale(N) * level_y(N);
    Rational hole_top = level_y(N + 1);

    long with_residuals = 0, zero_endpoints = 0;
    for (const Vertex& v : g.vertices()) {
        ImageDecomposition dec = g.image_decomposition(v);
        if (!dec.residuals.empty()) ++with_residuals;
        if (dec.zero_endpoint) {
            ++zero_endpoints;
            CHECK(v == hump_vertex());
        }
        for (const VertexInterval& h : dec.residuals) {
            CHECK(h.lo < h.hi);
            bool in_bottom = h.hi <= below_tails;
            bool in_slab = false;
            for (int k = 0; k <= N && !in_slab; ++k)
                in_slab = h.lo >= p.scale(k) && h.hi <= p.scale(k) * hole_top;
            CHECK((in_bottom || in_slab));
        }
    }
    CHECK(with_residuals == 5); // hump, right, gap(n,0) for n = 1..3
    CHECK(zero_endpoints == 1);

    // hump: bottom hole plus one slab hole per scale above the deepest
    ImageDecomposition hd = g.image_decomposition(hump_vertex());
    REQUIRE(hd.residuals.size() == 4);
    CHECK(hd.zero_endpoint);
    CHECK(hd.residuals[0].lo == Rational(0));
    CHECK(hd.residuals[0].hi == p.scale(3) * level_y(4));
    for (int k = 2; k >= 0; --k) {
        const VertexInterval& h = hd.residuals[3 - k];
        CHECK(h.lo == p.scale(k));
        CHECK(h.hi == p.scale(k) * level_y(4));
    }

    ImageDecomposition rd = g.image_decomposition(right_vertex());
    REQUIRE(rd.residuals.size() == 1);
    CHECK(rd.residuals[0].lo == Rational(1));
    CHECK(rd.residuals[0].hi == level_y(4));
    CHECK(!rd.zero_endpoint);

    // gap(n,0): for n < N one scaled slab hole, for n = N the missing tail stretch
    ImageDecomposition g1d = g.image_decomposition(gap_vertex(1, 0));
    REQUIRE(g1d.residuals.size() == 1);
    CHECK(g1d.residuals[0].lo == p.scale(1));
    CHECK(g1d.residuals[0].hi == p.scale(1) * level_y(4));
    ImageDecomposition g3d = g.image_decomposition(gap_vertex(3, 0));
    REQUIRE(g3d.residuals.size() == 1);
    CHECK(g3d.residuals[0].lo == p.scale(4) * level_y(4));
    CHECK(g3d.residuals[0].hi == p.scale(3) * level_y(4));

    // tail(2) maps onto the top of the scaled ladder with nothing left over
    ImageDecomposition td = g.image_decomposition(tail_vertex(2));
    CHECK(td.residuals.empty());
    CHECK(td.successors == std::vector<Vertex>{scaled_osc_vertex(1, 1), gap_vertex(1, 1),
                                               left_hump_vertex(), hump_vertex()});
}

TEST_CASE("three strongly connected blocks at every depth") {
    struct Row {
        int N;
        long core, top, cycle;
    };
    const Row rows[] = {{1, 3, 14, 2}, {2, 20, 49, 3}, {3, 73, 306, 4}};
    for (const Row& row : rows) {
        MarkovGraph g = graph14(row.N);
        REQUIRE(g.sccs().size() == 3);
        long core = g.scc_of(g.index_of(hump_vertex()));
        long top = g.scc_of(g.index_of(osc_vertex(row.N, 1)));
        long cyc = g.scc_of(g.index_of(gap_vertex(row.N, 0)));
        CHECK(core != top);
        CHECK(core != cyc);
        CHECK(top != cyc);
        CHECK(static_cast<long>(g.sccs()[core].size()) == row.core);
        CHECK(static_cast<long>(g.sccs()[top].size()) == row.top);
        CHECK(static_cast<long>(g.sccs()[cyc].size()) == row.cycle);
        long total = 0;
        for (const auto& scc : g.sccs()) {
            CHECK(std::is_sorted(scc.begin(), scc.end()));
            total += static_cast<long>(scc.size());
        }
        CHECK(total == g.vertex_count());
        // the deepest gap ladder is a bare cycle
        RadiusEnclosure cycR = g.scc_radius(cyc);
        CHECK(contains(cycR, 1.0));
        CHECK(cycR.hi - cycR.lo <= 1e-9);
    }

    // the core keeps the specials and every fully interior level
    MarkovGraph g2 = graph14(2);
    long core2 = g2.scc_of(g2.index_of(hump_vertex()));
    for (const Vertex& v : {left_hump_vertex(), right_vertex(), tail_vertex(2), osc_vertex(1, 5),
                            scaled_osc_vertex(1, 1), gap_vertex(1, 0), gap_vertex(1, 1)})
        CHECK(g2.scc_of(g2.index_of(v)) == core2);

    // deepest-level block: oscillator laps plus their scaled copies, 26 edges at depth 1
    MarkovGraph g1 = graph14(1);
    long top1 = g1.scc_of(g1.index_of(osc_vertex(1, 1)));
    long inner = 0;
    for (long idx : g1.sccs()[top1])
        for (std::int32_t s : g1.successors(idx))
            if (g1.scc_of(s) == top1) ++inner;
    CHECK(inner == 26);
}

TEST_CASE("certified radii hit the known algebraic values") {
    MarkovGraph g1 = graph14(1);
    RadiusEnclosure core = g1.scc_radius(g1.scc_of(g1.index_of(hump_vertex())));
    CHECK(core.hi - core.lo <= 1e-9);
    CHECK(contains(core, kOnePlusSqrt2)); // hump/left_hump/right block solves x^2 = 2x + 1
    CHECK(std::abs(std::log((core.lo + core.hi) / 2) - kLogOnePlusSqrt2) <= 1e-9);

    RadiusEnclosure top = g1.scc_radius(g1.scc_of(g1.index_of(osc_vertex(1, 1))));
    CHECK(contains(top, kSqrt13)); // 13 laps, return time 2

    CHECK(std::abs(g1.spectral_entropy() - kExact[1]) <= 1e-9);
    CHECK(std::abs(graph14(3).spectral_entropy() - kExact[3]) <= 1e-9);

    // at depth 2 the core still outweighs the deepest level block
    MarkovGraph g2 = graph14(2);
    CHECK(g2.spectral_entropy() > kExact[2]);
    CHECK(std::abs(g2.spectral_entropy() - 1.333367262194538) <= 1e-9);
}

TEST_CASE("quotient graph reproduces the explicit spectrum") {
    for (int N = 1; N <= 5; ++N) {
        MarkovGraph g = graph14(N);
        QuotientGraph q = quotient14(N);
        CHECK(q.truncation() == N);
        CHECK(static_cast<long>(q.classes().size()) == static_cast<long>(N) * N + 5 * N + 2);
        double total = 0;
        for (const QuotientGraph::ClassInfo& c : q.classes()) total += c.size;
        CHECK(total == doctest::Approx(static_cast<double>(g.vertex_count())).epsilon(1e-12));
        CHECK(q.sccs().size() == 3);
        CHECK(std::abs(q.spectral_entropy() - g.spectral_entropy()) <= 1e-9);
    }

    QuotientGraph q2 = quotient14(2);
    long first = q2.class_of(osc_vertex(2, 1));
    long rest = q2.class_of(osc_vertex(2, 7));
    CHECK(first != rest);
    CHECK(rest == q2.class_of(osc_vertex(2, 47)));
    CHECK(q2.classes()[first].size == 1.0);
    CHECK(q2.classes()[rest].size == 46.0);
    CHECK(q2.classes()[rest].rep == osc_vertex(2, 2));
    CHECK(q2.classes()[q2.class_of(hump_vertex())].size == 1.0);

    // depth 8 runs through the quotient; the deepest block carries the spectrum
    QuotientGraph q8 = quotient14(8);
    CHECK(static_cast<long>(q8.classes().size()) == 106);
    CHECK(q8.spectral_entropy() > kExact[8] - 1e-9);
    CHECK(q8.spectral_entropy() < kLog14);
    CHECK(std::abs(q8.spectral_entropy() - kExact[8]) <= 1e-9);
    RadiusEnclosure top8 = q8.scc_radius(q8.top_scc());
    double rho8 = std::exp(kExact[8]); // 23059203^{1/9}
    CHECK(top8.lo - 1e-9 <= rho8);
    CHECK(rho8 <= top8.hi + 1e-9);
    RadiusEnclosure core8 = q8.scc_radius(q8.core_scc());
    CHECK(std::abs(std::log((core8.lo + core8.hi) / 2) - 1.822697599177) <= 1e-8);
    CHECK(core8.hi < top8.lo); // certified: the core stays strictly below the deepest block
}

TEST_CASE("spectral entropy climbs toward log lambda") {
    double prev = 0;
    double spec8 = 0;
    for (int N = 1; N <= 8; ++N) {
        QuotientGraph q = quotient14(N);
        double s = q.spectral_entropy();
        CHECK(s > prev);
        CHECK(s < kLog14);
        if (N >= 3) CHECK(std::abs(s - kExact[N]) <= 1e-9); // deepest level block dominates
        prev = s;
        spec8 = s;
    }
    double gap = kLog14 - spec8;
    CHECK(gap >= 0.75531);
    CHECK(gap <= 0.75533);
}

TEST_CASE("extension graphs add laps and delete back cleanly") {
    GraphOptions base_opt;
    base_opt.N = 2;
    GraphOptions ext_opt;
    ext_opt.N = 2;
    ext_opt.extra_laps = {{2, 2}};
    MarkovGraph gb = MarkovGraph::build(par14(), base_opt);
    MarkovGraph gx = MarkovGraph::build(par14(), ext_opt);

    CHECK(gb.lap_count(2) == 47);
    CHECK(gx.lap_count(2) == 49);
    CHECK(gx.vertex_count() == gb.vertex_count() + 2);
    CHECK(gx.edge_count() == gb.edge_count() + 10);
    CHECK(gx.index_of(osc_vertex(2, 48)) >= 0);
    CHECK(gx.index_of(osc_vertex(2, 49)) >= 0);

    // strict containment: every base vertex and edge appears in the extension
    for (long i = 0; i < gb.vertex_count(); ++i) {
        const Vertex& v = gb.vertices()[i];
        long xi = gx.index_of(v);
        REQUIRE(xi >= 0);
        std::span<const std::int32_t> xs = gx.successors(xi);
        for (std::int32_t s : gb.successors(i)) {
            long xt = gx.index_of(gb.vertices()[s]);
            REQUIRE(xt >= 0);
            CHECK(std::binary_search(xs.begin(), xs.end(), static_cast<std::int32_t>(xt)));
        }
    }

    // the widened level still behaves like a level: decomposition stays clean
    for (const Vertex& v : gx.vertices()) {
        ImageDecomposition dec = gx.image_decomposition(v);
        std::span<const std::int32_t> s = gx.successors(gx.index_of(v));
        REQUIRE(dec.successors.size() == s.size());
        for (std::size_t t = 0; t < s.size(); ++t) CHECK(gx.vertices()[s[t]] == dec.successors[t]);
    }
    CHECK(gx.rule_successors(osc_vertex(2, 49)) ==
          std::vector<Vertex>{scaled_osc_vertex(2, 2), gap_vertex(2, 2)});

    // removing the two extra laps recovers the base graph verbatim
    CHECK(gx.canonical_content_without({osc_vertex(2, 48), osc_vertex(2, 49)}) ==
          gb.canonical_content());
    CHECK(gb.canonical_content_without({}) == gb.canonical_content());

    // lap counts must stay odd and inside the admissible window
    GraphOptions bad;
    bad.N = 2;
    bad.extra_laps = {{2, 1}};
    CHECK_THROWS(MarkovGraph::build(par14(), bad));
    bad.extra_laps = {{2, 4}};
    CHECK_THROWS(MarkovGraph::build(par14(), bad));
    bad.extra_laps = {{1, 2}};
    CHECK_THROWS(MarkovGraph::build(par14(), bad));

    // shrinking is admissible while the window holds
    GraphOptions shrunk;
    shrunk.N = 3;
    shrunk.extra_laps = {{3, -2}};
    MarkovGraph gs = MarkovGraph::build(par14(), shrunk);
    CHECK(gs.lap_count(3) == 301);
    CHECK(gs.vertex_count() == 381);
    CHECK(gs.sccs().size() == 3);

    // widening level 2 nudges the core block up but leaves the spectrum alone
    QuotientGraph qb = quotient14(4);
    QuotientGraph qx = quotient14(4, {{2, 2}});
    RadiusEnclosure cb = qb.scc_radius(qb.core_scc());
    RadiusEnclosure cx = qx.scc_radius(qx.core_scc());
    CHECK(cb.hi < cx.lo);
    CHECK(std::abs(qb.spectral_entropy() - qx.spectral_entropy()) <= 1e-12);
}

TEST_CASE("serialization round-trips and rejects tampering") {
    MarkovGraph g = graph14(3);

    std::string dot = g.export_dot();
    CHECK(dot.rfind("digraph markov", 0) == 0);
    CHECK(dot == graph14(3).export_dot());
    CHECK(dot.find("\"left_hump\" -> \"right\"") != std::string::npos);
    long dashed = 0;
    for (std::size_t pos = dot.find("style=dashed"); pos != std::string::npos;
         pos = dot.find("style=dashed", pos + 1))
        ++dashed;
    CHECK(dashed == 5); // hump, right, and the three gap(n,0): the vertices with residuals

    std::string text = g.to_json();
    MarkovGraph back = MarkovGraph::from_json(text);
    CHECK(back.to_json() == text);
    CHECK(back.canonical_content() == g.canonical_content());
    CHECK(g.canonical_content().rfind("osc(1,1) -> so(1,1)\n", 0) == 0);

    nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j["r"] == 1);
    CHECK(j["N"] == 3);
    CHECK(j["laps"] == nlohmann::json({13, 47, 303}));
    CHECK(j["vertex_count"] == 383);
    CHECK(j["edge_count"] == 1866);

    {
        nlohmann::json t = j;
        t["edge_count"] = 1867;
        CHECK_THROWS(MarkovGraph::from_json(t.dump()));
    }
    {
        nlohmann::json t = j;
        t["laps"][0] = 15;
        CHECK_THROWS(MarkovGraph::from_json(t.dump()));
    }
    {
        nlohmann::json t = j;
        t["adjacency"][0].push_back(0);
        CHECK_THROWS(MarkovGraph::from_json(t.dump()));
    }
    {
        nlohmann::json t = j;
        t["vertices"][0] = "osc(1,2)";
        CHECK_THROWS(MarkovGraph::from_json(t.dump()));
    }

    // extensions ride through serialization, lap table included
    GraphOptions ext_opt;
    ext_opt.N = 2;
    ext_opt.extra_laps = {{2, 2}};
    MarkovGraph gx = MarkovGraph::build(par14(), ext_opt);
    MarkovGraph gx2 = MarkovGraph::from_json(gx.to_json());
    CHECK(gx2.lap_count(2) == 49);
    CHECK(gx2.to_json() == gx.to_json());
}

TEST_CASE("depth six full decomposition stays in budget") {
    auto t0 = std::chrono::steady_clock::now();
    MarkovGraph g = graph14(6);
    CHECK(g.vertex_count() == 233480);
    CHECK(g.edge_count() == 1167273);
    CHECK(g.lap_count(6) == 209151);

    REQUIRE(g.sccs().size() == 3);
    long core = g.scc_of(g.index_of(hump_vertex()));
    long top = g.scc_of(g.index_of(osc_vertex(6, 1)));
    long cyc = g.scc_of(g.index_of(gap_vertex(6, 0)));
    CHECK(static_cast<long>(g.sccs()[core].size()) == 24316);
    CHECK(static_cast<long>(g.sccs()[top].size()) == 209157);
    CHECK(static_cast<long>(g.sccs()[cyc].size()) == 7);

    const std::vector<Vertex>& verts = g.vertices();
    long mismatched = 0, with_residuals = 0, stray_zero = 0;
    for (long i = 0; i < g.vertex_count(); ++i) {
        ImageDecomposition dec = g.image_decomposition(verts[i]);
        std::span<const std::int32_t> s = g.successors(i);
        if (dec.successors.size() != s.size()) {
            ++mismatched;
        } else {
            for (std::size_t t = 0; t < s.size(); ++t)
                if (verts[s[t]] != dec.successors[t]) ++mismatched;
        }
        if (!dec.residuals.empty()) ++with_residuals;
        if (dec.zero_endpoint && verts[i] != hump_vertex()) ++stray_zero;
    }
    CHECK(mismatched == 0);
    CHECK(with_residuals == 8); // hump, right, gap(n,0) for n = 1..6
    CHECK(stray_zero == 0);

    CHECK(std::abs(g.spectral_entropy() - kExact[6]) <= 1e-9);

    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(elapsed < 30.0);
}
