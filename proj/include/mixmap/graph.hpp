// Truncated transition graphs over the partition vertices.
//
// MarkovGraph materializes every vertex of levels 1..N plus the three hump
// pieces and tails, with edges given by closed-form successor rules; the rules
// agree with the map's action on intervals (image decomposition, checked in
// tests against exact evaluation). QuotientGraph collapses the lap index of
// each level into two classes (first lap, remaining laps), which is equitable:
// it keeps every spectral radius while staying ~100 nodes at any usable depth.
#pragma once

#include "mixmap/params.hpp"
#include "mixmap/vertex.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mixmap {

struct GraphOptions {
    int N = 4;                      // truncation depth, levels 1..N
    std::map<int, long> extra_laps; // level -> added laps (extension variants)
};

// f(interval(v)) split along successor intervals. Residuals are the parts of
// the image that fall into truncation holes (regions whose vertices live
// deeper than N); they are empty for most vertex kinds.
struct ImageDecomposition {
    VertexInterval image;
    std::vector<Vertex> successors;
    std::vector<VertexInterval> residuals;
    bool zero_endpoint = false; // image reaches 0, which carries no vertex
};

// certified enclosure of a spectral radius (Collatz-Wielandt bounds)
struct RadiusEnclosure {
    double lo = 0, hi = 0;
};

class MarkovGraph {
  public:
    static MarkovGraph build(const MapParams& p, const GraphOptions& opt);

    const MapParams& params() const;
    int truncation() const;
    long lap_count(int n) const; // M_n plus any extra_laps override

    long vertex_count() const;
    long edge_count() const;
    const std::vector<Vertex>& vertices() const; // canonical order
    long index_of(const Vertex& v) const;        // -1 if absent
    std::span<const std::int32_t> successors(long index) const;

    // closed-form successor rule, canonically sorted; agrees with successors()
    std::vector<Vertex> rule_successors(const Vertex& v) const;

    // exact image split; throws if a residual falls outside the truncation
    // holes (that would mean the rules and the geometry disagree)
    ImageDecomposition image_decomposition(const Vertex& v) const;

    // strongly connected components, each sorted, in a deterministic order
    const std::vector<std::vector<long>>& sccs() const;
    long scc_of(long index) const;
    RadiusEnclosure scc_radius(long scc) const;
    double spectral_entropy() const; // log of the largest SCC radius

    // "name -> succ succ ..." lines, one per vertex, canonical order
    std::string canonical_content() const;
    std::string canonical_content_without(const std::vector<Vertex>& removed) const;

    std::string export_dot() const;
    std::string to_json() const;
    static MarkovGraph from_json(const std::string& text);

  private:
    MarkovGraph() = default;
    struct Data;
    std::shared_ptr<const Data> d_;
};

class QuotientGraph {
  public:
    // one class per (kind, level, scale) with Osc split into first/rest
    struct ClassInfo {
        Vertex rep;  // rep.i == 1 first lap, rep.i == 2 the remaining laps
        double size; // number of vertices collapsed into the class
    };

    static QuotientGraph build(const MapParams& p, const GraphOptions& opt);

    int truncation() const;
    const std::vector<ClassInfo>& classes() const;
    long class_of(const Vertex& v) const;
    const std::vector<std::vector<std::pair<long, double>>>& multiplicity() const;

    const std::vector<std::vector<long>>& sccs() const;
    RadiusEnclosure scc_radius(long scc) const;
    double spectral_entropy() const;

    long core_scc() const; // SCC containing the hump piece
    long top_scc() const;  // SCC containing the deepest level's first lap

  private:
    QuotientGraph() = default;
    struct Data;
    std::shared_ptr<const Data> d_;
};

} // namespace mixmap
