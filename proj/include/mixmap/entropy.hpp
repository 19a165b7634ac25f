#pragma once
// Entropy estimates along three independent routes: exact subgraph rates from
// the lap counts, spectral rates of the truncated transition graphs, and a
// local lower bound realized by explicitly separated periodic orbits. Also
// the level-n Markov measures with exact stationarity, and the base-versus-
// extension growth comparison at matched truncation depths.

#include "mixmap/graph.hpp"
#include "mixmap/piecewise_map.hpp"

#include <map>

namespace mixmap {

// log M_n / (n+1): the rate carried by the level-n oscillator block alone.
double entropy_subgraph_exact(const MapParams& p, int n);

// log((M_n+1)/2) / (n+1): the rate surviving when only odd laps are kept.
double local_entropy_formula(const MapParams& p, int n);

// Dominant log-growth of the depth-N truncation, via the equitable quotient.
double spectral_entropy_at(const MapParams& p, int N);

// sup |f'| over [0,4]; its log caps every growth rate measured here.
double spectral_radius_of_derivative(const MapParams& p);

// Certificate for the local lower bound at level n with words of `blocks`
// odd laps: every word is realized by a periodic point, all realized orbits
// stay inside the level-n tube, and distinct words separate by a full lap
// width at the first block where they disagree.
struct LocalEntropyReport {
    int n = 0;
    int blocks = 0;
    long expected = 0;  // ((M_n + 1) / 2)^blocks
    long realized = 0;
    double value = 0;      // log(realized) / (blocks * (n + 1))
    double lap_width = 0;  // 1 / (2 n^2 M_n)
    double delta = 0;      // separation scale, half a lap
    double min_separation = 0;
    double max_spread = 0;  // tube thickness the orbits actually used
    bool bowen_ok = false;
    bool separation_ok = false;
};
LocalEntropyReport local_entropy_lower(const PiecewiseMap& m, int n, int blocks);

// Greedy (steps, epsilon)-separated subset of a uniform grid, against the
// derivative-counting bound no separated set can beat.
struct SeparatedCount {
    int steps = 0;
    double epsilon = 0;
    long grid = 0;
    long selected = 0;
    double lower = 0;  // log(selected) / steps
    double upper = 0;
};
SeparatedCount separated_count_greedy(const PiecewiseMap& m, int steps, double epsilon,
                                      long grid);
double separated_upper_bound(const MapParams& p, double epsilon, int steps);

// The level-n Markov measure: mass 1/(n+1) on each scaled pass of the slab,
// split uniformly over the M_n laps. Held symbolically; the lap count at
// level 8 already runs to millions, so nothing is enumerated per lap.
class MarkovMeasure {
  public:
    MarkovMeasure(const MapParams& p, int n);

    int level() const { return n_; }
    const BigInt& laps() const { return M_; }
    Rational osc_weight() const;   // weight of one lap
    Rational pass_weight() const;  // weight of one scaled pass
    Rational total() const;

    // Mass of [0, c], counting whole laps at every scale exactly.
    Rational mass_below(const Rational& c) const;

    // Kolmogorov-Sinai entropy; the only branching sits above the lap choice.
    double entropy() const;

    // Exact balance equations of the cyclic kernel, and its edges exist.
    bool is_stationary() const;

  private:
    MapParams p_;
    int n_;
    BigInt M_;
};

inline MarkovMeasure measure_mu_n(const MapParams& p, int n) { return MarkovMeasure(p, n); }

// Core-block growth before and after widening one level by extra laps, with
// certified bounds on the difference of the two log-radii.
struct TransienceEvidence {
    int N = 0;
    RadiusEnclosure base_core;
    RadiusEnclosure ext_core;
    double base_core_log = 0;
    double ext_core_log = 0;
    double diff = 0;     // ext minus base, midpoint logs
    double diff_lo = 0;  // certified lower bound on the difference
    double diff_hi = 0;  // certified upper bound
    double spectral_base = 0;
    double spectral_ext = 0;
};
TransienceEvidence transience_at(const MapParams& p, int N, const std::map<int, long>& extra);

}  // namespace mixmap
