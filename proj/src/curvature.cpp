#include "bcrt/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "bcrt/parallel.hpp"
#include "bcrt/transport.hpp"

namespace bcrt {

namespace {

constexpr std::uint64_t kCurvatureSalt = 0xc0ffee01;
constexpr std::uint64_t kUpperSalt = 0xc0ffee02;
constexpr std::uint64_t kRecursiveSalt = 0xc0ffee03;
constexpr std::size_t kBatch = 512;

double grid_distance(const Excursion& e, std::size_t i, std::size_t j) {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    const auto w = e.valleys();
    const double m = *std::min_element(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(j));
    return (e[i] - m) + (e[j] - m);
}

void validate(const CurvatureConfig& c) {
    if (c.n < 2) throw std::invalid_argument("curvature: grid resolution must be at least 2");
    if (c.replicas < 1) throw std::invalid_argument("curvature: need at least one replica");
    if (!(c.delta > 0.0)) throw std::invalid_argument("curvature: delta must be positive");
    if (!(c.ell_lo < c.ell_hi)) throw std::invalid_argument("curvature: empty ell bin");
    if (!(c.delta < c.ell_lo)) throw std::invalid_argument("curvature: delta must be below the ell bin");
}

std::optional<CurvatureSample> curvature_draw(const CurvatureConfig& c, std::uint64_t replica) {
    Engine rng = make_engine(c.seed, replica, kCurvatureSalt);
    Excursion e = sample_excursion(c.n, c.sampler, rng);
    const std::size_t x = uniform_index(rng, c.n);
    const std::size_t y = uniform_index(rng, c.n);
    const double ell = grid_distance(e, x, y);
    if (!(ell >= c.ell_lo && ell < c.ell_hi)) return std::nullopt;

    const MetricTree t(std::move(e));
    const GridIndex px{x}, py{y};
    const auto mu = uniform_ball_measure(t, px, c.delta);
    const auto nu = uniform_ball_measure(t, py, c.delta);
    CurvatureSample s;
    s.replica = replica;
    s.x = x;
    s.y = y;
    s.ell = ell;
    s.w1 = w1_edge_cut(t, mu, nu).cost;
    s.gap = kantorovich_gap(t, mu, nu, px, py);
    s.kappa = 1.0 - s.w1 / ell;
    return s;
}

}  // namespace

double ollivier_kappa(const MetricTree& t, const TreePoint& x, const TreePoint& y, double delta) {
    const double ell = t.distance(x, y);
    if (!(ell > 0.0)) throw std::invalid_argument("ollivier_kappa: coincident centers");
    if (!(delta > 0.0) || !(delta < ell)) throw std::invalid_argument("ollivier_kappa: need 0 < delta < rho(x, y)");
    const auto mu = uniform_ball_measure(t, x, delta);
    const auto nu = uniform_ball_measure(t, y, delta);
    return 1.0 - w1_edge_cut(t, mu, nu).cost / ell;
}

CurvatureRun run_curvature_experiment(const CurvatureConfig& config) {
    validate(config);
    const std::uint64_t limit = config.max_attempts ? config.max_attempts : 1000 * static_cast<std::uint64_t>(config.replicas);
    CurvatureRun run;
    run.config = config;
    std::vector<std::optional<CurvatureSample>> slots;
    std::uint64_t next = 0;
    while (run.samples.size() < config.replicas && next < limit) {
        const std::uint64_t batch = std::min<std::uint64_t>(kBatch, limit - next);
        slots.assign(batch, std::nullopt);
        parallel_for(0, batch, config.threads, [&](std::size_t k) { slots[k] = curvature_draw(config, next + k); });
        for (std::uint64_t k = 0; k < batch; ++k) {
            if (run.samples.size() == config.replicas) break;
            run.attempts = next + k + 1;
            if (slots[k]) run.samples.push_back(*slots[k]);
        }
        next += batch;
    }
    if (run.samples.empty()) throw std::runtime_error("curvature: no pair fell into the ell bin");
    return run;
}

CurvatureEstimate summarize_curvature(const CurvatureRun& run) {
    std::vector<double> kappa, w1, ell;
    for (const auto& s : run.samples) {
        kappa.push_back(s.kappa);
        w1.push_back(s.w1);
        ell.push_back(s.ell);
    }
    const auto k = summarize(kappa);
    const auto w = summarize(w1);
    CurvatureEstimate est;
    est.scale = {run.config.delta, 0.5 * (run.config.ell_lo + run.config.ell_hi)};
    est.mean_ell = summarize(ell).mean;
    est.mean_kappa = k.mean;
    est.std_error = k.std_error;
    est.replicas = k.count;
    est.mean_w1 = w.mean;
    est.w1_std_error = w.std_error;
    const double ratio = run.config.delta / est.mean_ell;
    est.band_lo = -2.0 * ratio - 4.0 * k.std_error;
    est.band_hi = -kLowerConstant * ratio + 4.0 * k.std_error;
    est.in_band = est.mean_kappa >= est.band_lo && est.mean_kappa <= est.band_hi;
    return est;
}

CurvatureEstimate mc_expected_curvature(const CurvatureConfig& config) {
    return summarize_curvature(run_curvature_experiment(config));
}

KantorovichStat summarize_kantorovich(const CurvatureRun& run) {
    std::vector<double> excess, w1_excess;
    for (const auto& s : run.samples) {
        excess.push_back(s.gap - s.ell);
        w1_excess.push_back(s.w1 - s.ell);
    }
    const auto g = summarize(excess);
    KantorovichStat st;
    st.mean_excess = g.mean;
    st.std_error = g.std_error;
    st.replicas = g.count;
    st.threshold = kLowerConstant * run.config.delta;
    st.mean_w1_excess = summarize(w1_excess).mean;
    st.pass = st.mean_excess > st.threshold - 4.0 * st.std_error;
    return st;
}

KantorovichStat kantorovich_lower_stat(const CurvatureConfig& config) {
    return summarize_kantorovich(run_curvature_experiment(config));
}

double recursive_bound_check(const MetricTree& t, const TreePoint& x, const TreePoint& y, double delta) {
    const double ell = t.distance(x, y);
    if (!(delta > 0.0) || !(delta < ell)) throw std::invalid_argument("recursive_bound_check: need 0 < delta < rho(x, y)");
    const TreePoint z = t.point_on_geodesic_at(x, y, 0.5 * delta);
    const auto dx = t.distances_from(x);
    const auto dy = t.distances_from(y);
    const auto dz = t.distances_from(z);
    const double atom = 1.0 / static_cast<double>(t.steps());

    CompensatedSum lhs, near_y;
    std::size_t outside_z = 0, outer_offspring = 0;
    for (std::size_t i = 0; i < dx.size(); ++i) {
        if (!(dx[i] < delta)) continue;
        lhs.add(dy[i]);
        if (dz[i] < 0.5 * delta) near_y.add(dy[i]);
        else ++outside_z;
        const bool offspring = std::abs(dx[i] + ell - dy[i]) <= kGeodesicTolerance;
        if (offspring && !(dx[i] < 0.5 * delta)) ++outer_offspring;
    }
    const double rhs = static_cast<double>(outside_z) * atom * ell +
                       0.5 * delta * static_cast<double>(outer_offspring) * atom + near_y.value() * atom;
    return lhs.value() * atom - rhs;
}

namespace {

struct TreeOutcome {
    std::size_t instances = 0;
    std::size_t violations = 0;
    double worst = std::numeric_limits<double>::infinity();
};

template <class PerTree>
PathwiseReport sweep(const PathwiseConfig& c, double tolerance, PerTree&& per_tree) {
    if (c.n < 2 || c.pairs_per_tree < 1) throw std::invalid_argument("pathwise sweep: bad config");
    const std::size_t trees = (c.instances + c.pairs_per_tree - 1) / c.pairs_per_tree;
    std::vector<TreeOutcome> out(trees);
    parallel_for(0, trees, c.threads, [&](std::size_t k) {
        const std::size_t pairs = std::min(c.pairs_per_tree, c.instances - k * c.pairs_per_tree);
        out[k] = per_tree(k, pairs);
    });
    PathwiseReport r;
    r.tolerance = tolerance;
    r.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& o : out) {
        r.instances += o.instances;
        r.violations += o.violations;
        r.worst_margin = std::min(r.worst_margin, o.worst);
    }
    return r;
}

std::pair<std::size_t, std::size_t> distinct_pair(const MetricTree& t, Engine& rng) {
    for (;;) {
        const std::size_t x = uniform_index(rng, t.steps());
        const std::size_t y = uniform_index(rng, t.steps());
        if (t.distance(x, y) > 0.0) return {x, y};
    }
}

}  // namespace

PathwiseReport w1_upper_bound_sweep(const PathwiseConfig& c, double fault) {
    constexpr double kTol = 1e-9;
    return sweep(c, kTol, [&](std::size_t k, std::size_t pairs) {
        Engine rng = make_engine(c.seed, k, kUpperSalt);
        const MetricTree t(sample_excursion(c.n, SamplerKind::kBesselBridge, rng));
        TreeOutcome o;
        for (std::size_t p = 0; p < pairs; ++p) {
            const auto [x, y] = distinct_pair(t, rng);
            const double delta = c.delta_min + (c.delta_max - c.delta_min) * uniform01(rng);
            const double ell = t.distance(x, y);
            const auto mu = uniform_ball_measure(t, GridIndex{x}, delta);
            const auto nu = uniform_ball_measure(t, GridIndex{y}, delta);
            const double w1 = w1_edge_cut(t, mu, nu, fault).cost;
            const double margin = ell + 2.0 * delta - w1;
            const double kappa_margin = (1.0 - w1 / ell) + 2.0 * delta / ell;
            ++o.instances;
            if (margin < -kTol || kappa_margin < -kTol) ++o.violations;
            o.worst = std::min(o.worst, margin);
        }
        return o;
    });
}

PathwiseReport recursive_bound_sweep(const PathwiseConfig& c) {
    const double tol = 10.0 / static_cast<double>(c.n);
    return sweep(c, tol, [&](std::size_t k, std::size_t pairs) {
        Engine rng = make_engine(c.seed, k, kRecursiveSalt);
        const MetricTree t(sample_excursion(c.n, SamplerKind::kBesselBridge, rng));
        TreeOutcome o;
        for (std::size_t p = 0; p < pairs; ++p) {
            const auto [x, y] = distinct_pair(t, rng);
            const double ell = t.distance(x, y);
            double u = 0.0;
            while (u == 0.0) u = uniform01(rng);
            const double slack = recursive_bound_check(t, GridIndex{x}, GridIndex{y}, u * ell);
            ++o.instances;
            if (slack < -tol) ++o.violations;
            o.worst = std::min(o.worst, slack);
        }
        return o;
    });
}

}  // namespace bcrt
