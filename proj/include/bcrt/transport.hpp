#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bcrt/tree.hpp"

namespace bcrt {

struct Atom {
    std::size_t index = 0;
    double mass = 0.0;
};

/// Probability measure on grid indices. Index n is folded onto the root
/// (index 0), duplicate indices are merged and atoms are kept sorted.
class DiscreteMeasure {
public:
    DiscreteMeasure(std::vector<Atom> atoms, std::size_t n);

    std::span<const Atom> atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    std::size_t grid_steps() const noexcept { return n_; }

private:
    std::vector<Atom> atoms_;
    std::size_t n_;
};

DiscreteMeasure uniform_ball_measure(const MetricTree& t, const TreePoint& x, double delta);

enum class TransportMethod { kEdgeCut, kOracle };

struct PlanEntry {
    std::size_t from = 0;  // index into the source atoms
    std::size_t to = 0;    // index into the target atoms
    double mass = 0.0;
};

struct TransportResult {
    double cost = 0.0;
    TransportMethod method = TransportMethod::kEdgeCut;
    std::vector<PlanEntry> plan;  // filled by the oracle only
};

/// Largest |mu| * |nu| the oracle accepts.
inline constexpr std::size_t kOracleMaxPairs = 10000;

/// Exact W1 via sum over edges of length times |net mass below the edge|.
/// `fault` is added to the result; it exists so the self-test can prove it
/// notices a wrong solver.
TransportResult w1_edge_cut(const MetricTree& t, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            double fault = 0.0);

/// Exact W1 by successive shortest paths on the complete bipartite cost matrix.
TransportResult w1_oracle(const MetricTree& t, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// mu(f) - nu(f) for the 1-Lipschitz witness f built from (x, y).
double kantorovich_gap(const MetricTree& t, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const TreePoint& x, const TreePoint& y);

/// Cost of the product coupling mu x nu.
double independent_plan_cost(const MetricTree& t, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

}  // namespace bcrt
