#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bcrt/random.hpp"

namespace bcrt {

/// A non-negative path sampled on a uniform grid of n steps, zero at both ends.
///
/// Besides the grid heights the excursion stores, for every grid cell
/// [t_i, t_{i+1}], the minimum of the path over that cell ("valley"). Tree
/// distances between grid times only depend on path minima, so carrying the
/// cell minima makes those distances exact for the underlying continuous path
/// rather than for its piecewise-linear interpolation. A piecewise-linear
/// excursion simply has valley_i = min(values_i, values_{i+1}).
class Excursion {
public:
    /// Piecewise-linear excursion through `values` on [0, lifetime].
    Excursion(std::vector<double> values, double lifetime);
    /// Excursion with explicit cell minima; valleys.size() == values.size() - 1.
    Excursion(std::vector<double> values, std::vector<double> valleys, double lifetime);

    std::size_t steps() const noexcept { return values_.size() - 1; }
    double lifetime() const noexcept { return lifetime_; }
    double grid_step() const noexcept { return lifetime_ / static_cast<double>(steps()); }
    double time_of(std::size_t i) const noexcept { return grid_step() * static_cast<double>(i); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> valleys() const noexcept { return valleys_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

private:
    void validate() const;

    std::vector<double> values_;
    std::vector<double> valleys_;
    double lifetime_;
};

enum class SamplerKind {
    /// Norm of a three-dimensional Brownian bridge (a Bessel-3 bridge, i.e. a
    /// normalized Brownian excursion) at the grid times, with each cell minimum
    /// drawn from its exact conditional law. Exact in law at grid resolution.
    kBesselBridge,
    /// Gaussian random-walk bridge cyclically shifted at its grid minimum,
    /// linearly interpolated. Converges to the excursion law but carries an
    /// O(sqrt(grid_step)) downward bias on tree distances.
    kVervaat,
};

struct SamplerConfig {
    std::size_t n = 16384;
    std::uint64_t seed = 0;
    std::uint64_t replica_index = 0;
    SamplerKind kind = SamplerKind::kBesselBridge;
};

/// Lifetime-1 excursion drawn from the stream derived from (seed, replica_index).
Excursion sample_excursion(const SamplerConfig& config);

/// Same as sample_excursion but draws from a caller-owned engine.
Excursion sample_excursion(std::size_t n, SamplerKind kind, Engine& rng);

/// Brownian scaling: lifetime multiplied by alpha, heights by sqrt(alpha),
/// keeping the grid count.
Excursion scale(const Excursion& e, double alpha);

/// Grid index nearest to time s for a lifetime-1 excursion.
std::size_t reroot_index(const Excursion& e, double s);

/// Index of the rerooted excursion that corresponds to original index i when
/// the new root is original index k.
std::size_t rerooted_index(std::size_t i, std::size_t k, std::size_t n) noexcept;

/// Re-bases a lifetime-1 excursion at time s (snapped to the grid): the new
/// path at time t is the tree distance from s to s + t (mod 1).
Excursion reroot(const Excursion& e, double s);
Excursion reroot_at_index(const Excursion& e, std::size_t k);

/// Maximum height.
double height(const Excursion& e);

/// Largest absolute difference between two excursions over all sampled path
/// points (grid heights and cell minima). Throws on grid mismatch.
double sup_distance(const Excursion& a, const Excursion& b);

/// Adds independent centered Gaussian noise of scale `sigma` to every interior
/// sample, truncated to |noise| < bound and clipped so the path stays positive.
Excursion perturb(const Excursion& e, double sigma, double bound, Engine& rng);

/// Tent path min(t, 1 - t) on n steps (n even).
Excursion tent_excursion(std::size_t n);

/// Piecewise-linear excursion through the knots (t_k, h_k), t in [0, 1],
/// evaluated on n steps.
Excursion piecewise_linear_excursion(std::span<const double> knot_times,
                                     std::span<const double> knot_heights, std::size_t n);

}  // namespace bcrt
