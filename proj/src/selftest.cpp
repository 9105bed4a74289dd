#include "bcrt/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "bcrt/excursion.hpp"
#include "bcrt/parallel.hpp"
#include "bcrt/random.hpp"
#include "bcrt/transport.hpp"
#include "bcrt/tree.hpp"

namespace bcrt {

namespace {

// A suite runs its body once per tree, each tree on its own stream, and
// merges the per-tree tallies in tree order.
struct Tally {
    std::size_t checks = 0;
    std::size_t failures = 0;
    double worst = 0.0;

    void record(double error, double tolerance) {
        ++checks;
        worst = std::max(worst, error);
        if (!(error <= tolerance)) ++failures;
    }
};

SuiteResult run_suite(const std::string& name, const SelftestOptions& opt, std::uint64_t salt, std::size_t trees,
                      const std::function<void(Engine&, Tally&)>& body) {
    std::vector<Tally> tallies(trees);
    parallel_for(0, trees, opt.threads, [&](std::size_t k) {
        Engine rng = make_engine(opt.seed, k, salt);
        body(rng, tallies[k]);
    });
    SuiteResult r;
    r.name = name;
    for (const auto& t : tallies) {
        r.checks += t.checks;
        r.failures += t.failures;
        r.worst = std::max(r.worst, t.worst);
    }
    return r;
}

MetricTree random_tree(std::size_t n, Engine& rng) { return MetricTree(sample_excursion(n, SamplerKind::kBesselBridge, rng)); }

std::size_t any_index(const MetricTree& t, Engine& rng) { return uniform_index(rng, t.steps() + 1); }

DiscreteMeasure random_measure(const MetricTree& t, std::size_t max_atoms, Engine& rng) {
    const std::size_t k = 1 + uniform_index(rng, max_atoms);
    std::vector<Atom> atoms(k);
    double total = 0.0;
    for (auto& a : atoms) {
        a.index = any_index(t, rng);
        a.mass = 0.05 + uniform01(rng);
        total += a.mass;
    }
    for (auto& a : atoms) a.mass /= total;
    // Push the rounding residue onto the first atom so the masses add to 1.
    double sum = 0.0;
    for (std::size_t i = 1; i < atoms.size(); ++i) sum += atoms[i].mass;
    atoms[0].mass = 1.0 - sum;
    return DiscreteMeasure(std::move(atoms), t.steps());
}

}  // namespace

SuiteResult oracle_equivalence_suite(const SelftestOptions& opt) {
    // 100 trees x 10 instances; each instance also checks the duality sandwich
    // gap <= W1 <= cost of the product plan and the oracle plan's marginals.
    const std::size_t n = std::min<std::size_t>(opt.n, 512);
    return run_suite("oracle_equivalence", opt, 11, 100, [&](Engine& rng, Tally& tally) {
        const MetricTree t = random_tree(n, rng);
        for (int k = 0; k < 10; ++k) {
            const auto mu = random_measure(t, 10, rng);
            const auto nu = random_measure(t, 10, rng);
            const double cut = w1_edge_cut(t, mu, nu, opt.w1_fault).cost;
            const auto oracle = w1_oracle(t, mu, nu);
            tally.record(std::abs(cut - oracle.cost), 1e-9);

            std::vector<double> out(mu.size(), 0.0), in(nu.size(), 0.0);
            for (const auto& p : oracle.plan) {
                out[p.from] += p.mass;
                in[p.to] += p.mass;
            }
            double marginal = 0.0;
            for (std::size_t i = 0; i < mu.size(); ++i) marginal = std::max(marginal, std::abs(out[i] - mu.atoms()[i].mass));
            for (std::size_t j = 0; j < nu.size(); ++j) marginal = std::max(marginal, std::abs(in[j] - nu.atoms()[j].mass));
            tally.record(marginal, 1e-12);

            std::size_t x = any_index(t, rng), y = any_index(t, rng);
            if (t.distance(x, y) > 0.0) {
                const double gap = kantorovich_gap(t, mu, nu, GridIndex{x}, GridIndex{y});
                tally.record(std::max(0.0, gap - cut), 1e-9);
            }
            tally.record(std::max(0.0, cut - independent_plan_cost(t, mu, nu)), 1e-9);
        }
    });
}

SuiteResult metric_axioms_suite(const SelftestOptions& opt) {
    // 100 trees x 1000 triples: symmetry (exact), triangle inequality (1e-9).
    return run_suite("metric_axioms", opt, 12, 100, [&](Engine& rng, Tally& tally) {
        const MetricTree t = random_tree(opt.n, rng);
        for (int k = 0; k < 1000; ++k) {
            const std::size_t a = any_index(t, rng), b = any_index(t, rng), c = any_index(t, rng);
            tally.record(t.distance(a, b) == t.distance(b, a) ? 0.0 : 1.0, 0.0);
            tally.record(t.distance(a, a), 0.0);
            tally.record(std::max(0.0, t.distance(a, c) - t.distance(a, b) - t.distance(b, c)), 1e-9);
        }
    });
}

SuiteResult four_point_suite(const SelftestOptions& opt) {
    return run_suite("four_point", opt, 13, 100, [&](Engine& rng, Tally& tally) {
        const MetricTree t = random_tree(opt.n, rng);
        for (int k = 0; k < 1000; ++k) {
            const std::size_t a = any_index(t, rng), b = any_index(t, rng), c = any_index(t, rng), d = any_index(t, rng);
            const double lhs = t.distance(a, b) + t.distance(c, d);
            const double rhs = std::max(t.distance(a, c) + t.distance(b, d), t.distance(a, d) + t.distance(b, c));
            tally.record(std::max(0.0, lhs - rhs), 1e-9);
        }
    });
}

SuiteResult edge_list_suite(const SelftestOptions& opt) {
    // Tree distances from the sparse table agree with paths in the explicit
    // edge list, and the edge list has the length of half the path variation.
    return run_suite("edge_list", opt, 14, 20, [&](Engine& rng, Tally& tally) {
        const MetricTree t = random_tree(opt.n, rng);
        const auto& g = t.edges();
        for (int k = 0; k < 200; ++k) {
            const std::size_t a = any_index(t, rng), b = any_index(t, rng);
            const double path = g.path_distance(g.node_of_index[a], g.node_of_index[b]);
            tally.record(std::abs(path - t.distance(a, b)), 1e-9);
        }
        const auto v = t.excursion().values();
        const auto w = t.excursion().valleys();
        double variation = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) variation += (v[i] - w[i]) + (v[i + 1] - w[i]);
        tally.record(std::abs(g.total_length() - 0.5 * variation) / (0.5 * variation), 1e-9);
        tally.record(g.node_count() <= 2 * t.steps() ? 0.0 : 1.0, 0.0);
    });
}

SuiteResult meet_suite(const SelftestOptions& opt) {
    // The meet lies on all three sides of the triangle.
    return run_suite("meet", opt, 15, 100, [&](Engine& rng, Tally& tally) {
        const MetricTree t = random_tree(opt.n, rng);
        for (int k = 0; k < 100; ++k) {
            const TreePoint x = GridIndex{any_index(t, rng)}, y = GridIndex{any_index(t, rng)},
                            z = GridIndex{any_index(t, rng)};
            const TreePoint m = t.meet(x, y, z);
            auto off = [&](const TreePoint& a, const TreePoint& b) {
                return std::abs(t.distance(a, m) + t.distance(m, b) - t.distance(a, b));
            };
            tally.record(std::max({off(x, y), off(x, z), off(y, z)}), 1e-9);
        }
    });
}

SuiteResult ball_intersection_suite(const SelftestOptions& opt) {
    // Exhaustive membership over all atoms: B(x, delta) n B(y, eps) == B(v, r).
    return run_suite("ball_intersection", opt, 16, 100, [&](Engine& rng, Tally& tally) {
        const MetricTree t = random_tree(opt.n, rng);
        std::size_t x = 0, y = 0;
        double ell = 0.0;
        while (!(ell > 0.0)) {
            x = any_index(t, rng);
            y = any_index(t, rng);
            ell = t.distance(x, y);
        }
        const double delta = ell * (0.3 + 0.7 * uniform01(rng));
        const double eps = ell - delta + delta * (0.05 + 0.95 * uniform01(rng));
        const auto [v, r] = t.ball_intersection_center(GridIndex{x}, GridIndex{y}, delta, eps);
        const auto dx = t.distances_from(GridIndex{x});
        const auto dy = t.distances_from(GridIndex{y});
        const auto dv = t.distances_from(v);
        std::size_t mismatches = 0;
        for (std::size_t i = 0; i < dx.size(); ++i)
            if ((dx[i] < delta && dy[i] < eps) != (dv[i] < r)) ++mismatches;
        tally.record(static_cast<double>(mismatches), 0.0);
    });
}

SuiteResult lipschitz_suite(const SelftestOptions& opt) {
    return run_suite("lipschitz", opt, 17, 100, [&](Engine& rng, Tally& tally) {
        const MetricTree t = random_tree(opt.n, rng);
        std::size_t x = 0, y = 0;
        while (!(t.distance(x, y) > 0.0)) {
            x = any_index(t, rng);
            y = any_index(t, rng);
        }
        for (int k = 0; k < 100; ++k) {
            const TreePoint s = GridIndex{any_index(t, rng)}, u = GridIndex{any_index(t, rng)};
            const double fs = t.lipschitz_witness(GridIndex{x}, GridIndex{y}, s);
            const double fu = t.lipschitz_witness(GridIndex{x}, GridIndex{y}, u);
            tally.record(std::max(0.0, std::abs(fs - fu) - t.distance(s, u)), 1e-9);
        }
    });
}

SuiteResult rerooting_suite(const SelftestOptions& opt) {
    return run_suite("rerooting_isometry", opt, 18, 100, [&](Engine& rng, Tally& tally) {
        const Excursion e = sample_excursion(opt.n, SamplerKind::kBesselBridge, rng);
        const std::size_t n = e.steps();
        const std::size_t k = 1 + uniform_index(rng, n - 1);
        const MetricTree before(e);
        const MetricTree after(reroot_at_index(e, k));
        for (int p = 0; p < 1000; ++p) {
            const std::size_t i = any_index(before, rng), j = any_index(before, rng);
            const double d0 = before.distance(i, j);
            const double d1 = after.distance(rerooted_index(i, k, n), rerooted_index(j, k, n));
            tally.record(std::abs(d0 - d1), 1e-12);
        }
    });
}

SuiteResult distortion_suite(const SelftestOptions& opt) {
    // sup|e - e~| < delta implies |rho_e - rho_e~| < 4 delta on every pair.
    return run_suite("distortion", opt, 19, 100, [&](Engine& rng, Tally& tally) {
        const Excursion e = sample_excursion(opt.n, SamplerKind::kBesselBridge, rng);
        const double delta = 0.005 + 0.045 * uniform01(rng);
        const Excursion p = perturb(e, 0.5 * delta, delta, rng);
        const double sup = sup_distance(e, p);
        tally.record(sup < delta ? 0.0 : 1.0, 0.0);
        const MetricTree a(e), b(p);
        for (int k = 0; k < 1000; ++k) {
            const std::size_t i = any_index(a, rng), j = any_index(a, rng);
            // |d rho| <= 4 sup, and sup < delta.
            tally.record(std::abs(a.distance(i, j) - b.distance(i, j)), 4.0 * sup + 1e-12);
        }
    });
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& opt) {
    return {
        oracle_equivalence_suite(opt), metric_axioms_suite(opt), four_point_suite(opt),
        edge_list_suite(opt),          meet_suite(opt),          ball_intersection_suite(opt),
        lipschitz_suite(opt),          rerooting_suite(opt),     distortion_suite(opt),
    };
}

}  // namespace bcrt
