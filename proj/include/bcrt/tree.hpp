#pragma once

#include <cstddef>
#include <iosfwd>
#include <variant>
#include <vector>

#include "bcrt/excursion.hpp"
#include "bcrt/sparse_table.hpp"

namespace bcrt {

/// Tolerance used by colinearity and component tests.
inline constexpr double kGeodesicTolerance = 1e-9;

/// Grid time index; index n is the same tree point as index 0 (the root).
struct GridIndex {
    std::size_t i = 0;
    friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

/// The point of the geodesic [[from, to]] at distance `offset` from `from`.
struct GeodesicPoint {
    std::size_t from = 0;
    std::size_t to = 0;
    double offset = 0.0;
    friend bool operator==(const GeodesicPoint&, const GeodesicPoint&) = default;
};

using TreePoint = std::variant<GridIndex, GeodesicPoint>;

/// Explicit discrete tree behind an encoded excursion.
///
/// Nodes are grid points plus the branch points created at cell minima.
/// Node 0 is the root. `post_order` lists every node after all of its
/// descendants, root last.
struct EdgeList {
    std::vector<std::size_t> parent;  // parent[0] is unused
    std::vector<double> length;       // length of the edge to the parent
    std::vector<double> height;       // distance to the root
    std::vector<std::size_t> post_order;
    std::vector<std::size_t> node_of_index;  // grid index 0..n -> node

    std::size_t node_count() const noexcept { return parent.size(); }
    double total_length() const;
    /// Distance between two nodes by walking parent links.
    double path_distance(std::size_t a, std::size_t b) const;
    /// One line per node, `node_id parent_id edge_length`, root parent -1.
    void dump(std::ostream& out) const;
};

struct BallSplit {
    std::vector<std::size_t> ancestry;
    std::vector<std::size_t> offspring;
};

struct Ball {
    std::vector<std::size_t> indices;
    double volume = 0.0;
};

struct BallIntersection {
    TreePoint center;
    double radius = 0.0;
};

/// Real tree encoded by an excursion, with O(1) distances between grid points.
///
/// The measure on the tree gives mass 1/n to each of the grid indices 0..n-1.
class MetricTree {
public:
    explicit MetricTree(Excursion e);

    const Excursion& excursion() const noexcept { return excursion_; }
    std::size_t steps() const noexcept { return excursion_.steps(); }
    const EdgeList& edges() const noexcept { return edges_; }

    double distance(std::size_t i, std::size_t j) const noexcept;
    double distance(const TreePoint& a, const TreePoint& b) const;

    /// Distances from p to every measure atom 0..n-1.
    std::vector<double> distances_from(const TreePoint& p) const;

    TreePoint meet(const TreePoint& x, const TreePoint& y, const TreePoint& z) const;
    /// True iff z lies on [[x, y]].
    bool on_geodesic(const TreePoint& x, const TreePoint& y, const TreePoint& z) const;
    TreePoint point_on_geodesic_at(const TreePoint& x, const TreePoint& y, double d) const;

    /// Atoms at distance strictly less than delta from x.
    Ball ball(const TreePoint& x, double delta) const;
    BallSplit split_ball(const TreePoint& x, const TreePoint& y, double delta) const;
    BallIntersection ball_intersection_center(const TreePoint& x, const TreePoint& y, double delta,
                                              double eps) const;

    /// +rho(sigma, y) when sigma is on the x side of y, -rho(sigma, y) otherwise.
    double lipschitz_witness(const TreePoint& x, const TreePoint& y, const TreePoint& sigma) const;

private:
    void check(const TreePoint& p) const;
    double point_to_grid(const GeodesicPoint& p, std::size_t q) const noexcept;
    double point_to_geodesic(const TreePoint& p, const GeodesicPoint& q) const;

    Excursion excursion_;
    SparseTable rmq_;
    EdgeList edges_;
};

MetricTree encode(Excursion e);

/// Built by one stack pass over the alternating sequence of grid heights and
/// cell minima.
EdgeList build_edge_list(const Excursion& e);

}  // namespace bcrt
