// Vertex alphabet of the countable Markov partition.
//
// The partition refines [0,4] into the oscillator laps of each level (Osc),
// copies of level blocks scaled k steps down the linear left end (ScaledOsc,
// Gap), tail pieces bundling everything below a scaled block (Tail), and three
// coarse pieces around the hump (LeftHump, Hump, Right). Interiors are
// pairwise disjoint; adjacent pieces share endpoints.
#pragma once

#include "mixmap/params.hpp"

#include <string>
#include <vector>

namespace mixmap {

enum class VertexKind : int { Osc, ScaledOsc, Gap, Tail, LeftHump, Hump, Right };

struct Vertex {
    VertexKind kind = VertexKind::Hump;
    int n = 0;  // level for Osc/ScaledOsc/Gap, index >= 2 for Tail, 0 otherwise
    long i = 0; // lap 1..M_n (Osc), scale 1..n (ScaledOsc), 0..n (Gap), 0 otherwise

    auto operator<=>(const Vertex&) const = default;
    bool operator==(const Vertex&) const = default;
};

Vertex osc_vertex(int n, long i);
Vertex scaled_osc_vertex(int n, long k);
Vertex gap_vertex(int n, long k);
Vertex tail_vertex(int n);
Vertex left_hump_vertex();
Vertex hump_vertex();
Vertex right_vertex();

// "osc(2,7)", "so(3,1)", "gap(2,0)", "tail(4)", "left_hump", "hump", "right"
std::string vertex_name(const Vertex& v);
Vertex vertex_from_name(const std::string& name);

struct VertexInterval {
    Rational lo, hi;
};

// Exact endpoints. The overload taking M substitutes a different lap count for
// the vertex's own level (used by extension graphs that widen one level).
VertexInterval vertex_interval(const MapParams& p, const Vertex& v);
VertexInterval vertex_interval(const MapParams& p, const Vertex& v, const BigInt& M);

// All vertices of the depth-N truncation whose closed interval contains x:
// one in the interior, two at a shared endpoint, none inside a truncation
// hole. Canonically sorted. Throws std::overflow_error when x falls in an
// oscillator block so deep that lap indices no longer fit in a long.
std::vector<Vertex> locate_vertex(const MapParams& p, const Rational& x, int N);

} // namespace mixmap
