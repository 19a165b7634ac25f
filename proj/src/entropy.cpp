#include "mixmap/entropy.hpp"

#include "mixmap/symbolic.hpp"
#include "mixmap/vertex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mixmap {

namespace {

double log_enclosure_mid(const RadiusEnclosure& e) { return std::log(0.5 * (e.lo + e.hi)); }

}  // namespace

double entropy_subgraph_exact(const MapParams& p, int n) {
    if (n < 1) throw std::invalid_argument("entropy_subgraph_exact: level must be positive");
    return log_big(M_of(p.lambda, n)) / (n + 1);
}

double local_entropy_formula(const MapParams& p, int n) {
    if (n < 1) throw std::invalid_argument("local_entropy_formula: level must be positive");
    BigInt odd = (M_of(p.lambda, n) + 1) / 2;
    return log_big(odd) / (n + 1);
}

double spectral_entropy_at(const MapParams& p, int N) {
    GraphOptions opt;
    opt.N = N;
    return QuotientGraph::build(p, opt).spectral_entropy();
}

double spectral_radius_of_derivative(const MapParams& p) { return to_double(p.lambda_r()); }

LocalEntropyReport local_entropy_lower(const PiecewiseMap& m, int n, int blocks) {
    if (n < 1 || blocks < 1)
        throw std::invalid_argument("local_entropy_lower: level and block count must be positive");
    const MapParams& p = m.params();
    LevelConstants lc = level_constants(p, n);
    if (lc.M > BigInt(1000000))
        throw std::invalid_argument("local_entropy_lower: lap count too large to enumerate");
    const long M = lc.M.convert_to<long>();
    const long odd = (M + 1) / 2;

    LocalEntropyReport rep;
    rep.n = n;
    rep.blocks = blocks;
    rep.expected = 1;
    for (int j = 0; j < blocks; ++j) {
        if (rep.expected > 10000000 / odd)
            throw std::invalid_argument("local_entropy_lower: word count too large to enumerate");
        rep.expected *= odd;
    }
    rep.lap_width = to_double(lc.lap_width);
    rep.delta = rep.lap_width / 2;

    const int period = n + 1;
    const int span = blocks * period;

    // Tube intervals per orbit slot, as plain doubles with a drift allowance:
    // the realized points carry diameter 1e-12 and the return stretches it by
    // 2 lambda^r per block, comfortably under 1e-9 at desk scale.
    const double slack = 1e-9;
    std::vector<Vertex> tube_shape(span);
    for (int b = 0; b < blocks; ++b) {
        tube_shape[b * period] = osc_vertex(n, 1);  // lap patched per word
        for (int k = 1; k <= n; ++k)
            tube_shape[b * period + k] = scaled_osc_vertex(n, n - k + 1);
    }

    std::vector<std::vector<long>> words(rep.expected);
    std::vector<std::vector<double>> osc_pos(rep.expected);
    std::vector<double> slot_min(span, 1e300);
    std::vector<double> slot_max(span, -1e300);

    rep.bowen_ok = true;
    for (long w = 0; w < rep.expected; ++w) {
        // Digits in base `odd`, most significant block first; laps stay odd.
        std::vector<long> laps(blocks);
        long rem = w;
        for (int b = blocks - 1; b >= 0; --b) {
            laps[b] = 2 * (rem % odd) + 1;
            rem /= odd;
        }

        std::vector<Vertex> cycle(tube_shape);
        for (int b = 0; b < blocks; ++b) cycle[b * period] = osc_vertex(n, laps[b]);

        CylinderPoint cp = point_of_periodic_itinerary(m, cycle, 1e-12);
        ++rep.realized;

        double cur = cp.x;
        std::vector<double> at_osc(blocks);
        for (int t = 0; t < span; ++t) {
            VertexInterval iv = vertex_interval(p, cycle[t]);
            double lo = to_double(iv.lo);
            double hi = to_double(iv.hi);
            if (cur < lo - slack || cur > hi + slack) rep.bowen_ok = false;
            if (t % period == 0) at_osc[t / period] = cur;
            slot_min[t] = std::min(slot_min[t], cur);
            slot_max[t] = std::max(slot_max[t], cur);
            cur = m.eval(cur);
        }
        words[w] = std::move(laps);
        osc_pos[w] = std::move(at_osc);
    }

    for (int t = 0; t < span; ++t) rep.max_spread = std::max(rep.max_spread, slot_max[t] - slot_min[t]);

    // Distinct words disagree at some block; both laps are odd, so a whole
    // even lap lies between the two orbit points there.
    rep.min_separation = 1e300;
    for (long a = 0; a < rep.expected; ++a) {
        for (long b = a + 1; b < rep.expected; ++b) {
            for (int j = 0; j < blocks; ++j) {
                if (words[a][j] == words[b][j]) continue;
                double sep = std::abs(osc_pos[a][j] - osc_pos[b][j]);
                rep.min_separation = std::min(rep.min_separation, sep);
                break;
            }
        }
    }
    rep.separation_ok = rep.min_separation >= rep.lap_width * (1 - 1e-9);
    rep.value = std::log(static_cast<double>(rep.realized)) / (blocks * period);
    return rep;
}

SeparatedCount separated_count_greedy(const PiecewiseMap& m, int steps, double epsilon,
                                      long grid) {
    if (steps < 1 || grid < 1 || !(epsilon > 0))
        throw std::invalid_argument("separated_count_greedy: bad arguments");
    SeparatedCount sc;
    sc.steps = steps;
    sc.epsilon = epsilon;
    sc.grid = grid;

    std::vector<double> orbits(static_cast<std::size_t>(grid) * steps);
    for (long i = 0; i < grid; ++i) {
        double x = 4.0 * (i + 0.5) / grid;
        for (int t = 0; t < steps; ++t) {
            orbits[static_cast<std::size_t>(i) * steps + t] = x;
            x = m.eval(x);
        }
    }

    std::vector<long> kept;
    for (long i = 0; i < grid; ++i) {
        const double* oi = &orbits[static_cast<std::size_t>(i) * steps];
        bool separated = true;
        for (long k : kept) {
            const double* ok = &orbits[static_cast<std::size_t>(k) * steps];
            double d = 0;
            for (int t = 0; t < steps; ++t) d = std::max(d, std::abs(oi[t] - ok[t]));
            if (d < epsilon) {
                separated = false;
                break;
            }
        }
        if (separated) kept.push_back(i);
    }
    sc.selected = static_cast<long>(kept.size());
    sc.lower = std::log(static_cast<double>(sc.selected)) / steps;
    sc.upper = separated_upper_bound(m.params(), epsilon, steps);
    return sc;
}

double separated_upper_bound(const MapParams& p, double epsilon, int steps) {
    if (steps < 1 || !(epsilon > 0))
        throw std::invalid_argument("separated_upper_bound: bad arguments");
    double lam_r = to_double(p.lambda_r());
    return std::log(std::pow(lam_r, steps) * 4.0 / epsilon + 1.0) / steps;
}

MarkovMeasure::MarkovMeasure(const MapParams& p, int n) : p_(p), n_(n), M_(M_of(p.lambda, n)) {
    if (n < 1) throw std::invalid_argument("MarkovMeasure: level must be positive");
}

Rational MarkovMeasure::osc_weight() const {
    return Rational(1) / (Rational(n_ + 1) * Rational(M_));
}

Rational MarkovMeasure::pass_weight() const { return Rational(1, n_ + 1); }

Rational MarkovMeasure::total() const {
    return Rational(M_) * osc_weight() + Rational(n_) * pass_weight();
}

Rational MarkovMeasure::mass_below(const Rational& c) const {
    // At scale k the slab becomes lambda^{-kr} [x_n, y_n] with M_n laps of
    // width lap_width each; lap i is contained in [0, c] exactly when its
    // upper end x_n + i w clears c after unscaling.
    LevelConstants lc = level_constants(p_, n_);
    BigInt contained(0);
    for (int k = 0; k <= n_; ++k) {
        Rational unscaled = Rational(c / p_.scale(k));
        if (unscaled < lc.x) continue;
        if (unscaled >= lc.y) {
            contained += M_;
            continue;
        }
        BigInt full = floor_rat(Rational((unscaled - lc.x) / lc.lap_width));
        contained += full;
    }
    return Rational(contained) * osc_weight();
}

double MarkovMeasure::entropy() const { return log_big(M_) / (n_ + 1); }

bool MarkovMeasure::is_stationary() const {
    // The kernel is deterministic except above the lap choice: each lap feeds
    // the first scaled pass, the passes chain down, and the last pass spreads
    // uniformly over the laps. All of its edges must exist, and the weights
    // must balance exactly. The top lap is only nameable while it fits a
    // long; beyond that the structural checks fall back to the first lap.
    if (!code_edge(osc_vertex(n_, 1), scaled_osc_vertex(n_, n_))) return false;
    for (int k = n_; k >= 2; --k) {
        if (!code_edge(scaled_osc_vertex(n_, k), scaled_osc_vertex(n_, k - 1))) return false;
    }
    if (!code_edge(scaled_osc_vertex(n_, 1), osc_vertex(n_, 1))) return false;
    if (M_ <= BigInt(std::numeric_limits<long>::max())) {
        const long top = M_.convert_to<long>();
        if (!code_edge(osc_vertex(n_, top), scaled_osc_vertex(n_, n_))) return false;
        if (!code_edge(scaled_osc_vertex(n_, 1), osc_vertex(n_, top))) return false;
    }

    // Flow into the first pass: all laps arrive with probability one.
    if (Rational(M_) * osc_weight() != pass_weight()) return false;
    // Flow into each lap: the last pass splits evenly.
    if (Rational(pass_weight() / Rational(M_)) != osc_weight()) return false;
    return total() == Rational(1);
}

TransienceEvidence transience_at(const MapParams& p, int N, const std::map<int, long>& extra) {
    GraphOptions base;
    base.N = N;
    GraphOptions ext;
    ext.N = N;
    ext.extra_laps = extra;

    QuotientGraph qb = QuotientGraph::build(p, base);
    QuotientGraph qx = QuotientGraph::build(p, ext);

    TransienceEvidence ev;
    ev.N = N;
    ev.base_core = qb.scc_radius(qb.core_scc());
    ev.ext_core = qx.scc_radius(qx.core_scc());
    ev.base_core_log = log_enclosure_mid(ev.base_core);
    ev.ext_core_log = log_enclosure_mid(ev.ext_core);
    ev.diff = ev.ext_core_log - ev.base_core_log;
    ev.diff_lo = std::log(ev.ext_core.lo) - std::log(ev.base_core.hi);
    ev.diff_hi = std::log(ev.ext_core.hi) - std::log(ev.base_core.lo);
    ev.spectral_base = qb.spectral_entropy();
    ev.spectral_ext = qx.spectral_entropy();
    return ev;
}

}  // namespace mixmap
