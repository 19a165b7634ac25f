// Command line front end: build map descriptions, run the invariant battery,
// and export graphs, growth rates and level measures in json/csv/dot form.
// Exit codes: 0 success, 1 runtime or verification failure, 2 bad arguments.
#include "CLI11.hpp"
#include "json.hpp"

#include "mixmap/entropy.hpp"
#include "mixmap/graph.hpp"
#include "mixmap/map_checks.hpp"
#include "mixmap/symbolic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace mixmap;
using nlohmann::json;

struct Common {
    std::string lambda_text = "14";
    int r = 1;
    std::string format = "json";
    std::string out;
};

Rational parse_lambda(const std::string& text) {
    if (text.find('/') != std::string::npos) return rational_from_fraction_string(text);
    if (text.find('.') != std::string::npos) return rational_from_decimal(text);
    return Rational(BigInt(text));
}

// Returns 2 on contract violations so the caller can exit directly.
int check_common(const Common& c, Rational& lambda_out) {
    try {
        lambda_out = parse_lambda(c.lambda_text);
    } catch (const std::exception&) {
        std::cerr << "error: --lambda is not a number: " << c.lambda_text << "\n";
        return 2;
    }
    if (lambda_out < Rational(14)) {
        std::cerr << "error: the family needs --lambda >= 14\n";
        return 2;
    }
    if (c.r != 1 && c.r != 2) {
        std::cerr << "error: --r must be 1 or 2\n";
        return 2;
    }
    return 0;
}

int write_output(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open " << out << " for writing\n";
        return 1;
    }
    f << text;
    if (!f) {
        std::cerr << "error: short write to " << out << "\n";
        return 1;
    }
    return 0;
}

int run_build(const Common& c, int n_max, int bins) {
    Rational lambda;
    if (int rc = check_common(c, lambda)) return rc;
    MapParams p = MapParams::make(lambda, c.r);
    PiecewiseMap m = build_map(p, n_max);
    std::string text;
    if (c.format == "json") {
        text = m.to_json();
    } else if (c.format == "csv") {
        text = m.sample_csv(bins);
    } else {
        std::cerr << "error: build supports --format json or csv\n";
        return 2;
    }
    return write_output(text, c.out);
}

struct CheckRow {
    std::string name;
    bool pass = false;
};

int run_verify(const Common& c, int n_max, unsigned long long seed) {
    Rational lambda;
    if (int rc = check_common(c, lambda)) return rc;
    if (n_max < 1 || n_max > 10) {
        std::cerr << "error: verify supports --n-max in [1,10]\n";
        return 2;
    }
    MapParams p = MapParams::make(lambda, c.r);
    PiecewiseMap m = build_map(p, n_max + 1);
    Rational lam_r = p.lambda_r();
    std::vector<CheckRow> rows;
    auto check = [&rows](const std::string& name, bool ok) {
        rows.push_back({name, ok});
    };

    // Pinned values and the exact linear piece through the origin.
    check("fixed_values", m.eval_exact(Rational(0)) == Rational(0) &&
                              m.eval_exact(Rational(1)) == Rational(0) &&
                              m.eval_exact(Rational(1, 2)) == Rational(4) &&
                              m.eval_exact(Rational(4)) == Rational(4));
    {
        Rational top = Rational(5, 2) * p.delta();
        bool ok = true;
        for (int i = 1; i <= 7; ++i) {
            Rational x = Rational(top * Rational(i, 7));
            ok = ok && m.eval_exact(x) == Rational(lam_r * x);
        }
        check("leading_linear", ok);
    }
    {
        double sup = 0;
        for (int i = 0; i <= 8192; ++i) {
            double x = 4.0 * i / 8192;
            sup = std::max(sup, std::abs(m.eval_derivative(x, 1)));
        }
        sup = std::max(sup, std::abs(m.eval_derivative(to_double(p.delta()), 1)));
        double cap = to_double(lam_r);
        check("slope_bound", sup <= cap && sup >= cap * (1 - 1e-9));
    }
    {
        bool ok = true;
        for (int n = 1; n <= n_max; ++n) {
            BigInt M = M_of(lambda, n);
            Rational Mr = Rational(M);
            Rational den(2 * n * n);
            ok = ok && (M % 2 == 1);
            ok = ok && Rational(Mr * den) >= pow_rat(lambda, n);
            ok = ok && Rational(Mr * Rational(n * n)) <= pow_rat(lambda, n);
            ok = ok && Mr >= Rational(lambda - 3);
        }
        check("lap_counts", ok);
    }
    {
        bool ok = true;
        for (int n = 1; n < n_max; ++n) {
            LevelConstants lc = level_constants(p, n);
            ok = ok && m.eval_exact(lc.w) == Rational(pow_rat(lam_r, -(n + 1)) * lc.x);
            double x = to_double(lc.w);
            for (int k = 0; k < n + 2; ++k) x = m.eval(x);
            ok = ok && std::abs(x - to_double(lc.x)) <= 1e-9;
        }
        check("w_landing", ok);
    }
    {
        bool ok = true;
        for (int n = 1; n <= n_max; ++n) {
            LevelConstants lc = level_constants(p, n);
            for (const Rational& pt : {lc.x, lc.y}) {
                double x = to_double(pt);
                for (int k = 0; k < n + 1; ++k) x = m.eval(x);
                ok = ok && std::abs(x - to_double(pt)) <= 1e-9;
            }
        }
        check("slab_edges", ok);
    }
    {
        GraphOptions opt;
        opt.N = std::min(n_max, 3);
        MarkovGraph g = MarkovGraph::build(p, opt);
        bool ok = true;
        for (std::int32_t i = 0; i < static_cast<std::int32_t>(g.vertex_count()); ++i) {
            auto dec = g.image_decomposition(g.vertices()[i]);
            auto span = g.successors(i);
            ok = ok && dec.successors.size() == span.size();
            for (std::size_t k = 0; ok && k < span.size(); ++k)
                ok = vertex_name(dec.successors[k]) == vertex_name(g.vertices()[span[k]]);
        }
        check("image_tiling", ok);
    }
    {
        RInterval base{Rational(0), Rational(Rational(1) / lam_r)};
        CoverReport rep = mixing_probe(m, base, 10);
        check("cover_base", rep.covered && rep.steps == 2);
    }
    {
        bool ok = true;
        for (int n = 1; n <= std::min(4, n_max); ++n) {
            LevelConstants lc = level_constants(p, n);
            CoverReport rep = mixing_probe(m, RInterval{lc.x, lc.y}, 4 * (n + 1));
            ok = ok && rep.covered && rep.steps == 2 * (n + 1) + 1;
        }
        check("cover_slabs", ok);
    }
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> lo_d(0.0, 3.9);
        bool ok = true;
        for (int t = 0; t < 20; ++t) {
            double lo = lo_d(rng);
            double hi = lo + 1e-3 + (4.0 - lo - 1e-3) * 0.02;
            CoverReport rep =
                mixing_probe(m, RInterval{rational_from_double(lo), rational_from_double(hi)}, 40);
            ok = ok && rep.covered;
        }
        check("cover_random", ok);
    }

    int passed = 0;
    std::ostringstream os;
    for (const CheckRow& row : rows) {
        passed += row.pass ? 1 : 0;
        os << (row.pass ? "ok   " : "FAIL ") << row.name << "\n";
    }
    bool all = passed == static_cast<int>(rows.size());
    os << "verify: " << (all ? "all checks passed" : "checks FAILED") << " (" << passed << " of "
       << rows.size() << ")\n";

    if (c.format == "json") {
        json j;
        j["lambda"] = to_fraction_string(lambda);
        j["r"] = c.r;
        j["passed"] = passed;
        j["total"] = rows.size();
        j["checks"] = json::array();
        for (const CheckRow& row : rows) j["checks"].push_back({{"name", row.name}, {"pass", row.pass}});
        if (int rc = write_output(j.dump(2) + "\n", c.out)) return rc;
        if (!c.out.empty())
            std::cout << "verify: " << passed << " of " << rows.size() << " checks passed\n";
    } else {
        if (int rc = write_output(os.str(), c.out)) return rc;
    }
    return all ? 0 : 1;
}

int run_graph(const Common& c, int N) {
    Rational lambda;
    if (int rc = check_common(c, lambda)) return rc;
    if (N < 1 || N > 8) {
        std::cerr << "error: graph supports --N in [1,8]\n";
        return 2;
    }
    MapParams p = MapParams::make(lambda, c.r);
    GraphOptions opt;
    opt.N = N;
    MarkovGraph g = MarkovGraph::build(p, opt);
    std::string text;
    if (c.format == "json") {
        text = g.to_json();
    } else if (c.format == "dot") {
        text = g.export_dot();
    } else if (c.format == "csv") {
        std::ostringstream os;
        os << "source,target\n";
        const auto& verts = g.vertices();
        for (std::int32_t i = 0; i < static_cast<std::int32_t>(verts.size()); ++i) {
            for (std::int32_t j : g.successors(i))
                os << vertex_name(verts[i]) << "," << vertex_name(verts[j]) << "\n";
        }
        text = os.str();
    } else {
        std::cerr << "error: graph supports --format json, dot or csv\n";
        return 2;
    }
    return write_output(text, c.out);
}

int run_entropy(const Common& c, int n_max, int N, int blocks, double epsilon, long grid) {
    Rational lambda;
    if (int rc = check_common(c, lambda)) return rc;
    if (n_max < 1 || n_max > 18 || N < 1 || N > 8) {
        std::cerr << "error: entropy supports --n-max in [1,18] and --N in [1,8]\n";
        return 2;
    }
    MapParams p = MapParams::make(lambda, c.r);

    json j;
    j["lambda"] = to_fraction_string(lambda);
    j["r"] = c.r;
    j["log_lambda_r"] = std::log(to_double(p.lambda_r()));
    j["levels"] = json::array();
    std::ostringstream csv;
    csv << "n,laps,subgraph,odd_formula\n";
    char buf[128];
    for (int n = 1; n <= n_max; ++n) {
        BigInt M = M_of(lambda, n);
        double sub = entropy_subgraph_exact(p, n);
        double odd = local_entropy_formula(p, n);
        j["levels"].push_back(
            {{"n", n}, {"laps", M.str()}, {"subgraph", sub}, {"odd_formula", odd}});
        std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g\n", n, M.str().c_str(), sub, odd);
        csv << buf;
    }
    j["spectral"] = {{"N", N}, {"value", spectral_entropy_at(p, N)}};

    if (blocks > 0) {
        PiecewiseMap m = build_map(p, 4);
        j["local"] = json::array();
        for (int n = 1; n <= 2; ++n) {
            LocalEntropyReport rep = local_entropy_lower(m, n, blocks);
            j["local"].push_back({{"n", rep.n},
                                  {"blocks", rep.blocks},
                                  {"realized", rep.realized},
                                  {"value", rep.value},
                                  {"bowen_ok", rep.bowen_ok},
                                  {"separation_ok", rep.separation_ok}});
        }
    }
    if (epsilon > 0) {
        PiecewiseMap m = build_map(p, 4);
        SeparatedCount sc = separated_count_greedy(m, 2, epsilon, grid);
        j["separated"] = {{"steps", sc.steps}, {"epsilon", sc.epsilon},  {"grid", sc.grid},
                          {"selected", sc.selected}, {"lower", sc.lower}, {"upper", sc.upper}};
    }

    if (c.format == "json") return write_output(j.dump(2) + "\n", c.out);
    if (c.format == "csv") return write_output(csv.str(), c.out);
    std::cerr << "error: entropy supports --format json or csv\n";
    return 2;
}

int run_measure(const Common& c, int n_max, int bins) {
    Rational lambda;
    if (int rc = check_common(c, lambda)) return rc;
    if (n_max < 1 || n_max > 18) {
        std::cerr << "error: measure supports --n-max in [1,18]\n";
        return 2;
    }
    MapParams p = MapParams::make(lambda, c.r);

    json j;
    j["lambda"] = to_fraction_string(lambda);
    j["r"] = c.r;
    j["levels"] = json::array();
    std::ostringstream csv;
    if (bins > 0) {
        csv << "n,cut,mass\n";
    } else {
        csv << "n,laps,entropy,mass_below_fifth\n";
    }
    char buf[160];
    for (int n = 1; n <= n_max; ++n) {
        MarkovMeasure mu = measure_mu_n(p, n);
        json row = {{"n", n},
                    {"laps", mu.laps().str()},
                    {"entropy", mu.entropy()},
                    {"stationary", mu.is_stationary()},
                    {"mass_below_fifth", to_fraction_string(mu.mass_below(Rational(1, 5)))}};
        if (bins > 0) {
            json cdf = json::array();
            for (int i = 0; i <= bins; ++i) {
                Rational cut(4 * i, bins);
                double mass = to_double(mu.mass_below(cut));
                cdf.push_back(mass);
                std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", n, 4.0 * i / bins, mass);
                csv << buf;
            }
            row["cdf"] = cdf;
        } else {
            std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%s\n", n, mu.laps().str().c_str(),
                          mu.entropy(), to_fraction_string(mu.mass_below(Rational(1, 5))).c_str());
            csv << buf;
        }
        j["levels"].push_back(row);
    }

    if (c.format == "json") return write_output(j.dump(2) + "\n", c.out);
    if (c.format == "csv") return write_output(csv.str(), c.out);
    std::cerr << "error: measure supports --format json or csv\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interval map family with countable transition structure"};
    app.require_subcommand(1);

    Common c;
    int n_max = 4;
    int N = 3;
    int blocks = 0;
    double epsilon = 0;
    double delta = 0;
    int bins = 0;
    unsigned long long seed = 20260819ULL;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--lambda", c.lambda_text, "expansion parameter, integer or fraction")
            ->capture_default_str();
        sub->add_option("--r", c.r, "smoothness order (1 or 2)")->capture_default_str();
        sub->add_option("--format", c.format, "output format")->capture_default_str();
        sub->add_option("--out", c.out, "output path (default stdout)");
    };

    CLI::App* b = app.add_subcommand("build", "emit the map description or samples");
    add_common(b);
    b->add_option("--n-max", n_max, "deepest oscillator level to realize")->capture_default_str();
    b->add_option("--bins", bins, "csv sample count");

    CLI::App* v = app.add_subcommand("verify", "run the invariant battery");
    add_common(v);
    v->add_option("--n-max", n_max, "deepest level to check")->capture_default_str();
    v->add_option("--seed", seed, "seed for the random cover probes")->capture_default_str();

    CLI::App* g = app.add_subcommand("graph", "emit the depth-N transition graph");
    add_common(g);
    g->add_option("--N", N, "truncation depth")->capture_default_str();

    CLI::App* e = app.add_subcommand("entropy", "emit growth rates");
    add_common(e);
    e->add_option("--n-max", n_max, "deepest level in the table")->capture_default_str();
    e->add_option("--N", N, "truncation depth for the spectral rate")->capture_default_str();
    e->add_option("--p", blocks, "blocks for the local lower bound (0 = skip)");
    e->add_option("--epsilon", epsilon, "scale for the separated count (0 = skip)");
    e->add_option("--bins", bins, "grid size for the separated count");

    CLI::App* u = app.add_subcommand("measure", "emit the level measures");
    add_common(u);
    u->add_option("--n-max", n_max, "deepest level")->capture_default_str();
    u->add_option("--bins", bins, "cumulative mass cuts (0 = summary only)");
    u->add_option("--delta", delta, "unused reserve for finer binning");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        int code = app.exit(ex);
        return code == 0 ? 0 : 2;
    }

    try {
        if (b->parsed()) return run_build(c, n_max, bins > 0 ? bins : 512);
        if (v->parsed()) return run_verify(c, std::min(n_max, 8), seed);
        if (g->parsed()) return run_graph(c, N);
        if (e->parsed()) return run_entropy(c, n_max, N, blocks, epsilon, bins > 0 ? bins : 4000);
        if (u->parsed()) return run_measure(c, n_max, bins);
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
