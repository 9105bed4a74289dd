#include "bcrt/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "bcrt/parallel.hpp"
#include "bcrt/stats.hpp"
#include "bcrt/tree.hpp"

namespace bcrt {

std::string Rational::decimal() const {
    if (den <= 0) throw std::invalid_argument("Rational: denominator must be positive");
    std::int64_t d = den;
    while (d % 2 == 0) d /= 2;
    while (d % 5 == 0) d /= 5;
    if (d != 1) throw std::invalid_argument("Rational: expansion does not terminate");
    std::string out = num < 0 ? "-" : "";
    std::int64_t a = num < 0 ? -num : num;
    out += std::to_string(a / den);
    std::int64_t rem = a % den;
    if (rem == 0) return out;
    out += '.';
    while (rem != 0) {
        rem *= 10;
        out += static_cast<char>('0' + rem / den);
        rem %= den;
    }
    return out;
}

double alpha(double delta) { return -std::expm1(-2.0 * delta * delta); }

Rational f_limit_at_zero() { return {19, 128}; }

double f(double delta) {
    if (delta == 0.0) return f_limit_at_zero().value();
    return 0.25 - (alpha(delta / 2) + 9.0 * alpha(delta / 4)) / (8.0 * alpha(delta));
}

double f_central_derivative(double h) { return (f(h) - f(-h)) / (2.0 * h); }

double slope_ratio(double delta) {
    if (delta == 0.0) throw std::invalid_argument("slope_ratio: undefined at 0");
    const double a1 = alpha(delta), a2 = alpha(delta / 2), a4 = alpha(delta / 4);
    const double A = (1.0 - a1) * (a2 + 9.0 * a4) / (2.0 * a1 * a1);
    const double B = (4.0 * (1.0 - a2) + 9.0 * (1.0 - a4)) / (32.0 * a1);
    return A / B;
}

double slope_ratio_remainder(double coefficient, double lo, double hi, std::size_t points) {
    if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("slope_ratio_remainder: bad range");
    double worst = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
        const double d = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
        const double r = std::abs(slope_ratio(d) - (1.0 - coefficient * d * d)) / (d * d * d * d);
        worst = std::max(worst, r);
    }
    return worst;
}

AppendixReport appendix_report() {
    AppendixReport rep;
    rep.f_at_zero = f_limit_at_zero();
    const double limit = rep.f_at_zero.value();
    rep.max_value = -1.0;
    rep.dominated = true;
    for (int k = -50; k <= 50; ++k) {
        const double d = k / 100.0;
        const double v = f(d);
        rep.numeric_f.emplace_back(d, v);
        if (v > rep.max_value) {
            rep.max_value = v;
            rep.max_location = d;
        }
        if (v > limit + 1e-12) rep.dominated = false;
    }
    rep.derivative_at_zero_numeric = f_central_derivative(1e-4);
    rep.ratio_remainder = slope_ratio_remainder(183.0 / 208.0);
    return rep;
}

double expected_ball_volume(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("expected_ball_volume: eps must be positive");
    return alpha(eps);
}

double expected_half_volume(double eps) { return 0.5 * expected_ball_volume(eps); }

namespace {

constexpr std::uint64_t kVolumeSalt = 0x701fe1;

// Integrals of r^p over one region, p = 0, 1, 2.
using Moments = std::array<double, 3>;

struct RegionMoments {
    Moments ball_x{}, ball_x2{}, off{}, off2{}, anc{}, anc2{};
    double root_volume = 0.0;
};

using ReplicaMoments = std::vector<RegionMoments>;  // one per eps

std::size_t uniform_partner(const MetricTree& t, std::size_t x, Engine& rng) {
    for (;;) {
        const std::size_t y = uniform_index(rng, t.steps());
        if (t.distance(x, y) > 0.0) return y;
    }
}

void accumulate(Moments& m, double r, double atom) {
    m[0] += atom;
    m[1] += r * atom;
    m[2] += r * r * atom;
}

// Splits ball(x, eps) into offspring / ancestry with respect to y.
void split_moments(const std::vector<double>& dx, const std::vector<double>& dy, double ell, double eps,
                   double atom, Moments& ball, Moments& off, Moments& anc) {
    for (std::size_t i = 0; i < dx.size(); ++i) {
        if (!(dx[i] < eps)) continue;
        accumulate(ball, dx[i], atom);
        if (std::abs(dx[i] + ell - dy[i]) <= kGeodesicTolerance) accumulate(off, dx[i], atom);
        else accumulate(anc, dx[i], atom);
    }
}

ReplicaMoments replica_moments(const VolumeConfig& c, std::uint64_t replica) {
    Engine rng = make_engine(c.seed, replica, kVolumeSalt);
    const MetricTree t(sample_excursion(c.n, c.sampler, rng));
    const std::size_t x = uniform_index(rng, c.n);
    const std::size_t y = uniform_partner(t, x, rng);
    const std::size_t x2 = uniform_index(rng, c.n);
    const std::size_t y2 = uniform_partner(t, x2, rng);

    const auto dx = t.distances_from(GridIndex{x});
    const auto dy = t.distances_from(GridIndex{y});
    const auto dx2 = t.distances_from(GridIndex{x2});
    const auto dy2 = t.distances_from(GridIndex{y2});
    const auto d0 = t.distances_from(GridIndex{0});
    const double atom = 1.0 / static_cast<double>(c.n);
    const double ell = t.distance(x, y), ell2 = t.distance(x2, y2);

    ReplicaMoments out(c.eps.size());
    for (std::size_t k = 0; k < c.eps.size(); ++k) {
        auto& r = out[k];
        const double eps = c.eps[k];
        split_moments(dx, dy, ell, eps, atom, r.ball_x, r.off, r.anc);
        split_moments(dx2, dy2, ell2, eps, atom, r.ball_x2, r.off2, r.anc2);
        std::size_t count = 0;
        for (double d : d0) count += d < eps;
        r.root_volume = static_cast<double>(count) * atom;
    }
    return out;
}

std::vector<ReplicaMoments> run_volume_replicas(const VolumeConfig& c) {
    if (c.n < 2) throw std::invalid_argument("volume: grid resolution must be at least 2");
    if (c.replicas < 2) throw std::invalid_argument("volume: need at least two replicas");
    if (c.eps.empty()) throw std::invalid_argument("volume: no eps values");
    for (double e : c.eps)
        if (!(e > 0.0)) throw std::invalid_argument("volume: eps must be positive");
    std::vector<ReplicaMoments> reps(c.replicas);
    parallel_for(0, c.replicas, c.threads, [&](std::size_t r) { reps[r] = replica_moments(c, r); });
    return reps;
}

template <class Get>
SampleSummary column(const std::vector<ReplicaMoments>& reps, std::size_t k, Get&& get) {
    std::vector<double> xs;
    xs.reserve(reps.size());
    for (const auto& r : reps) xs.push_back(get(r[k]));
    return summarize(xs);
}

bool within(double value, double target, double allowance) { return std::abs(value - target) <= allowance; }

}  // namespace

std::vector<VolumeRow> volume_law_experiment(const VolumeConfig& config) {
    const auto reps = run_volume_replicas(config);
    std::vector<VolumeRow> rows;
    for (std::size_t k = 0; k < config.eps.size(); ++k) {
        VolumeRow row;
        row.eps = config.eps[k];
        row.closed_form = expected_ball_volume(row.eps);
        const auto ball = column(reps, k, [](const RegionMoments& m) { return m.ball_x[0]; });
        const auto root = column(reps, k, [](const RegionMoments& m) { return m.root_volume; });
        const auto diff = column(reps, k, [](const RegionMoments& m) { return m.root_volume - m.ball_x[0]; });
        const auto anc = column(reps, k, [](const RegionMoments& m) { return m.anc[0]; });
        const auto off = column(reps, k, [](const RegionMoments& m) { return m.off[0]; });
        row.mc_mean = ball.mean;
        row.se = ball.std_error;
        row.root_mean = root.mean;
        row.root_se = root.std_error;
        row.reroot_diff_se = diff.std_error;
        row.ancestry_mean = anc.mean;
        row.ancestry_se = anc.std_error;
        row.offspring_mean = off.mean;
        row.offspring_se = off.std_error;
        const double half = 0.5 * row.closed_form;
        row.volume_pass = within(ball.mean, row.closed_form, 4.0 * ball.std_error + 2.0 / static_cast<double>(config.n));
        row.reroot_pass = within(diff.mean, 0.0, 4.0 * diff.std_error);
        row.ancestry_pass = within(anc.mean, half, 4.0 * anc.std_error);
        row.offspring_pass = within(off.mean, half, 4.0 * off.std_error);
        rows.push_back(row);
    }
    return rows;
}

std::vector<LemmaRow> fundamental_lemma_tests(const VolumeConfig& config) {
    const auto reps = run_volume_replicas(config);
    static const std::array<const char*, 3> names{"1", "r", "r2"};
    using Pick = const Moments& (*)(const RegionMoments&);
    struct Part {
        const char* name;
        Pick a;
        Pick b;
    };
    static const std::array<Part, 4> parts{{
        {"i", [](const RegionMoments& m) -> const Moments& { return m.ball_x; },
         [](const RegionMoments& m) -> const Moments& { return m.ball_x2; }},
        {"ii", [](const RegionMoments& m) -> const Moments& { return m.off; },
         [](const RegionMoments& m) -> const Moments& { return m.off2; }},
        {"iii", [](const RegionMoments& m) -> const Moments& { return m.anc; },
         [](const RegionMoments& m) -> const Moments& { return m.anc2; }},
        {"iv", [](const RegionMoments& m) -> const Moments& { return m.off; },
         [](const RegionMoments& m) -> const Moments& { return m.anc; }},
    }};
    std::vector<LemmaRow> rows;
    for (std::size_t k = 0; k < config.eps.size(); ++k) {
        for (const auto& part : parts) {
            for (std::size_t p = 0; p < names.size(); ++p) {
                const auto a = column(reps, k, [&](const RegionMoments& m) { return part.a(m)[p]; });
                const auto b = column(reps, k, [&](const RegionMoments& m) { return part.b(m)[p]; });
                const auto d = column(reps, k, [&](const RegionMoments& m) { return part.a(m)[p] - part.b(m)[p]; });
                LemmaRow row;
                row.part = part.name;
                row.function = names[p];
                row.eps = config.eps[k];
                row.mean_a = a.mean;
                row.mean_b = b.mean;
                row.se = d.std_error;
                row.pass = within(d.mean, 0.0, 4.0 * d.std_error);
                rows.push_back(row);
            }
        }
    }
    return rows;
}

}  // namespace bcrt
