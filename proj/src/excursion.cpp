#include "bcrt/excursion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bcrt {

namespace {

std::vector<double> linear_valleys(const std::vector<double>& values) {
    std::vector<double> out(values.size() - 1);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) out[i] = std::min(values[i], values[i + 1]);
    return out;
}

// Minimum of a Bessel-3 bridge of duration dt between heights a, b > 0.
// Conditionally on its endpoints, such a bridge is a Brownian bridge
// conditioned to avoid zero, so
//   P(min > m) = (1 - exp(-2(a-m)(b-m)/dt)) / (1 - exp(-2ab/dt)),
// which inverts in closed form.
double bridge_minimum(double a, double b, double dt, double u) {
    if (a <= 0.0 || b <= 0.0) return 0.0;
    const double p = -std::expm1(-2.0 * a * b / dt);
    const double c = -std::log1p(-u * p);
    const double s = std::sqrt((a - b) * (a - b) + 2.0 * c * dt);
    const double m = (2.0 * a * b - c * dt) / ((a + b) + s);
    return std::clamp(m, 0.0, std::min(a, b));
}

bool interior_positive(const std::vector<double>& values, const std::vector<double>& valleys) {
    const std::size_t n = values.size() - 1;
    for (std::size_t i = 1; i < n; ++i)
        if (!(values[i] > 0.0)) return false;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (!(valleys[i] > 0.0)) return false;
    return true;
}

Excursion sample_bessel_bridge(std::size_t n, Engine& rng) {
    const double dt = 1.0 / static_cast<double>(n);
    const double sd = std::sqrt(dt);
    NormalSource normal;
    std::vector<double> values(n + 1);
    std::vector<double> valleys(n);
    std::array<std::vector<double>, 3> walk;
    for (;;) {
        for (auto& w : walk) {
            w.assign(n + 1, 0.0);
            for (std::size_t i = 1; i <= n; ++i) w[i] = w[i - 1] + sd * normal(rng);
        }
        for (std::size_t i = 0; i <= n; ++i) {
            const double frac = static_cast<double>(i) * dt;
            double r2 = 0.0;
            for (const auto& w : walk) {
                const double b = w[i] - frac * w[n];
                r2 += b * b;
            }
            values[i] = std::sqrt(r2);
        }
        values[0] = 0.0;
        values[n] = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            valleys[i] = bridge_minimum(values[i], values[i + 1], dt, uniform01(rng));
        if (interior_positive(values, valleys)) break;
    }
    return Excursion(std::move(values), std::move(valleys), 1.0);
}

Excursion sample_vervaat(std::size_t n, Engine& rng) {
    const double dt = 1.0 / static_cast<double>(n);
    const double sd = std::sqrt(dt);
    NormalSource normal;
    std::vector<double> walk(n + 1);
    std::vector<double> values(n + 1);
    for (;;) {
        walk[0] = 0.0;
        for (std::size_t i = 1; i <= n; ++i) walk[i] = walk[i - 1] + sd * normal(rng);
        const double drift = walk[n];
        for (std::size_t i = 0; i <= n; ++i) walk[i] -= static_cast<double>(i) * dt * drift;
        // std::min_element returns the first minimum, i.e. ties go to the smallest index.
        const auto k = static_cast<std::size_t>(std::min_element(walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(n)) - walk.begin());
        for (std::size_t j = 0; j < n; ++j) values[j] = walk[(k + j) % n] - walk[k];
        values[0] = 0.0;
        values[n] = 0.0;
        const bool degenerate = std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
        auto valleys = linear_valleys(values);
        if (!degenerate && interior_positive(values, valleys))
            return Excursion(std::move(values), std::move(valleys), 1.0);
    }
}

}  // namespace

Excursion::Excursion(std::vector<double> values, double lifetime)
    : values_(std::move(values)), lifetime_(lifetime) {
    if (values_.size() < 2) throw std::invalid_argument("excursion needs at least one grid step");
    valleys_ = linear_valleys(values_);
    validate();
}

Excursion::Excursion(std::vector<double> values, std::vector<double> valleys, double lifetime)
    : values_(std::move(values)), valleys_(std::move(valleys)), lifetime_(lifetime) {
    validate();
}

void Excursion::validate() const {
    if (values_.size() < 2) throw std::invalid_argument("excursion needs at least one grid step");
    if (valleys_.size() + 1 != values_.size())
        throw std::invalid_argument("excursion: valleys must have one entry per grid cell");
    if (!(lifetime_ > 0.0) || !std::isfinite(lifetime_))
        throw std::invalid_argument("excursion: lifetime must be positive");
    if (values_.front() != 0.0 || values_.back() != 0.0)
        throw std::invalid_argument("excursion: path must vanish at both ends");
    for (double v : values_)
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("excursion: negative or non-finite height");
    for (std::size_t i = 0; i < valleys_.size(); ++i) {
        const double m = valleys_[i];
        if (!(m >= 0.0) || m > std::min(values_[i], values_[i + 1]))
            throw std::invalid_argument("excursion: cell minimum out of range at cell " + std::to_string(i));
    }
}

Excursion sample_excursion(std::size_t n, SamplerKind kind, Engine& rng) {
    if (n < 2) throw std::invalid_argument("sampler: grid resolution must be at least 2");
    switch (kind) {
        case SamplerKind::kBesselBridge: return sample_bessel_bridge(n, rng);
        case SamplerKind::kVervaat: return sample_vervaat(n, rng);
    }
    throw std::invalid_argument("sampler: unknown kind");
}

Excursion sample_excursion(const SamplerConfig& config) {
    Engine rng = make_engine(config.seed, config.replica_index);
    return sample_excursion(config.n, config.kind, rng);
}

Excursion scale(const Excursion& e, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("scale: alpha must be positive");
    const double root = std::sqrt(alpha);
    std::vector<double> values(e.values().begin(), e.values().end());
    std::vector<double> valleys(e.valleys().begin(), e.valleys().end());
    for (double& v : values) v *= root;
    for (double& v : valleys) v *= root;
    return Excursion(std::move(values), std::move(valleys), e.lifetime() * alpha);
}

std::size_t reroot_index(const Excursion& e, double s) {
    if (std::abs(e.lifetime() - 1.0) > 1e-12) throw std::invalid_argument("reroot: excursion must have lifetime 1");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("reroot: s must lie strictly inside (0, 1)");
    const std::size_t n = e.steps();
    const auto k = static_cast<std::size_t>(std::llround(s * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, 1, n - 1);
}

std::size_t rerooted_index(std::size_t i, std::size_t k, std::size_t n) noexcept {
    return i < k ? i + n - k : i - k;
}

Excursion reroot_at_index(const Excursion& e, std::size_t k) {
    const std::size_t n = e.steps();
    if (k == 0 || k >= n) throw std::invalid_argument("reroot: new root must be an interior grid index");
    const auto vals = e.values();
    const auto vall = e.valleys();
    const double hk = vals[k];

    // floor[i] = min of the path between t_k and t_i.
    std::vector<double> floor(n + 1);
    floor[k] = hk;
    for (std::size_t i = k + 1; i <= n; ++i) floor[i] = std::min(floor[i - 1], vall[i - 1]);
    for (std::size_t i = k; i-- > 0;) floor[i] = std::min(floor[i + 1], vall[i]);

    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i < n; ++i) values[rerooted_index(i, k, n)] = hk + vals[i] - 2.0 * floor[i];
    values[0] = 0.0;
    values[n] = 0.0;

    // Closest approach to t_k within original cell a: if the cell dips below the
    // floor reached so far, the distance bottoms out at hk - floor where the path
    // crosses that floor; otherwise at the cell minimum.
    std::vector<double> valleys(n);
    for (std::size_t a = 0; a < n; ++a) {
        const double m = a >= k ? floor[a] : floor[a + 1];
        const std::size_t j = rerooted_index(a, k, n);
        const double v = hk + std::max(vall[a], m) - 2.0 * m;
        valleys[j] = std::clamp(v, 0.0, std::min(values[j], values[j + 1]));
    }
    return Excursion(std::move(values), std::move(valleys), e.lifetime());
}

Excursion reroot(const Excursion& e, double s) { return reroot_at_index(e, reroot_index(e, s)); }

double height(const Excursion& e) {
    const auto v = e.values();
    return *std::max_element(v.begin(), v.end());
}

double sup_distance(const Excursion& a, const Excursion& b) {
    if (a.steps() != b.steps() || a.lifetime() != b.lifetime())
        throw std::invalid_argument("sup_distance: excursions live on different grids");
    double d = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
    for (std::size_t i = 0; i < a.valleys().size(); ++i) d = std::max(d, std::abs(a.valleys()[i] - b.valleys()[i]));
    return d;
}

Excursion perturb(const Excursion& e, double sigma, double bound, Engine& rng) {
    if (!(sigma > 0.0) || !(bound > 0.0)) throw std::invalid_argument("perturb: sigma and bound must be positive");
    NormalSource normal;
    auto draw = [&] {
        for (;;) {
            const double g = sigma * normal(rng);
            if (std::abs(g) < bound) return g;
        }
    };
    // Moving a positive sample x by g with x + g <= 0 is replaced by x/2, a
    // smaller move in the same direction.
    auto shift = [](double x, double g) { return x + g > 0.0 ? x + g : 0.5 * x; };

    const std::size_t n = e.steps();
    std::vector<double> values(e.values().begin(), e.values().end());
    std::vector<double> valleys(e.valleys().begin(), e.valleys().end());
    for (std::size_t i = 1; i < n; ++i) values[i] = shift(values[i], draw());
    for (std::size_t i = 0; i < n; ++i) {
        if (valleys[i] > 0.0) valleys[i] = shift(valleys[i], draw());
        valleys[i] = std::min({valleys[i], values[i], values[i + 1]});
    }
    return Excursion(std::move(values), std::move(valleys), e.lifetime());
}

Excursion tent_excursion(std::size_t n) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("tent: n must be even and at least 2");
    std::vector<double> values(n + 1);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) values[i] = static_cast<double>(std::min(i, n - i)) / dn;
    return Excursion(std::move(values), 1.0);
}

Excursion piecewise_linear_excursion(std::span<const double> knot_times,
                                     std::span<const double> knot_heights, std::size_t n) {
    if (knot_times.size() != knot_heights.size() || knot_times.size() < 2)
        throw std::invalid_argument("piecewise_linear_excursion: need matching knot arrays");
    if (knot_times.front() != 0.0 || knot_times.back() != 1.0)
        throw std::invalid_argument("piecewise_linear_excursion: knots must span [0, 1]");
    std::vector<double> values(n + 1);
    std::size_t seg = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n);
        while (seg + 2 < knot_times.size() && t > knot_times[seg + 1]) ++seg;
        const double t0 = knot_times[seg], t1 = knot_times[seg + 1];
        const double w = (t - t0) / (t1 - t0);
        values[i] = knot_heights[seg] + w * (knot_heights[seg + 1] - knot_heights[seg]);
        if (t == t1) values[i] = knot_heights[seg + 1];
    }
    values.front() = 0.0;
    values.back() = 0.0;
    return Excursion(std::move(values), 1.0);
}

}  // namespace bcrt
