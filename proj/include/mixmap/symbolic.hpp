// Itinerary coding against the countable partition. Codes are vertex strings
// compatible with the transition rule; a point maps to the code its orbit
// spells out, and a code maps back to the nested-preimage cylinder of its
// coded intervals. Exact rationals drive the orbit while they stay small,
// doubles take over afterwards.
#pragma once

#include "mixmap/piecewise_map.hpp"
#include "mixmap/vertex.hpp"

#include <vector>

namespace mixmap {

// transition rule with no truncation: every level is allowed
bool code_edge(const Vertex& v, const Vertex& w);

// vertices whose interval contains x, searching every level up to the map's
// hard cap; empty when x is 0 or sits deeper than the cap can name
std::vector<Vertex> locate_any_level(const MapParams& p, const Rational& x);

struct Itinerary {
    std::vector<Vertex> symbols;
    bool exceptional = false; // boundary hit, vanished orbit, or past the cap
};

// one symbol per step while the double orbit stays cleanly inside one vertex;
// stops early (exceptional) within 1e-12 of a boundary, where the double
// orbit can no longer be trusted to pick the true side
Itinerary itinerary_of_point(const PiecewiseMap& m, double x, int length);

// every admissible code of the given depth whose cylinder contains x; points
// on piece boundaries carry several, interior points exactly one, and orbits
// that reach 0 or outrun the level cap have none
std::vector<std::vector<Vertex>> preimage_codes(const PiecewiseMap& m, const Rational& x,
                                                int depth);

struct CylinderPoint {
    double x = 0;        // cylinder midpoint
    double diameter = 0; // cylinder width bound
};

// backward refinement: pulls the last coded interval through the monotone
// branches named by the code; throws on inadmissible codes
CylinderPoint point_of_itinerary(const PiecewiseMap& m, const std::vector<Vertex>& code);

// repeats a closed cycle until the cylinder is thinner than tol; the code
// length is capped at 10^4 symbols, so the result may stay wider than tol
// for barely expanding cycles
CylinderPoint point_of_periodic_itinerary(const PiecewiseMap& m, const std::vector<Vertex>& cycle,
                                          double tol);

} // namespace mixmap
