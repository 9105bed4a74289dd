#include "bcrt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace bcrt {

double EdgeList::total_length() const {
    double total = 0.0;
    for (std::size_t u = 1; u < length.size(); ++u) total += length[u];
    return total;
}

double EdgeList::path_distance(std::size_t a, std::size_t b) const {
    const double ha = height[a], hb = height[b];
    // Parents sit strictly lower than their children, so climbing from the
    // higher node never overshoots the common ancestor.
    while (a != b) {
        if (height[a] >= height[b] && a != 0) a = parent[a];
        else b = parent[b];
    }
    return ha + hb - 2.0 * height[a];
}

void EdgeList::dump(std::ostream& out) const {
    out.precision(17);
    for (std::size_t u = 0; u < parent.size(); ++u) {
        if (u == 0) out << "0 -1 0\n";
        else out << u << ' ' << parent[u] << ' ' << length[u] << '\n';
    }
}

EdgeList build_edge_list(const Excursion& e) {
    const std::size_t n = e.steps();
    const auto values = e.values();
    const auto valleys = e.valleys();

    EdgeList t;
    t.parent.reserve(2 * n);
    t.length.reserve(2 * n);
    t.height.reserve(2 * n);
    t.post_order.reserve(2 * n);
    t.node_of_index.assign(n + 1, 0);

    auto add_node = [&](double h) {
        t.parent.push_back(0);
        t.length.push_back(0.0);
        t.height.push_back(h);
        return t.parent.size() - 1;
    };
    auto close = [&](std::size_t u, std::size_t p) {
        t.parent[u] = p;
        t.length[u] = t.height[u] - t.height[p];
        t.post_order.push_back(u);
    };

    std::vector<std::size_t> stack;
    stack.push_back(add_node(0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double m = valleys[i];
        while (t.height[stack.back()] > m) {
            const std::size_t u = stack.back();
            stack.pop_back();
            if (t.height[stack.back()] >= m) {
                close(u, stack.back());
            } else {
                const std::size_t branch = add_node(m);
                close(u, branch);
                stack.push_back(branch);
            }
        }
        const double v = values[i + 1];
        if (v > t.height[stack.back()]) stack.push_back(add_node(v));
        t.node_of_index[i + 1] = stack.back();
    }
    // values[n] == 0, so only the root is left.
    t.post_order.push_back(0);
    t.node_of_index[n] = 0;
    return t;
}

MetricTree::MetricTree(Excursion e)
    : excursion_(std::move(e)), rmq_(excursion_.valleys()), edges_(build_edge_list(excursion_)) {}

MetricTree encode(Excursion e) { return MetricTree(std::move(e)); }

double MetricTree::distance(std::size_t i, std::size_t j) const noexcept {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    const auto v = excursion_.values();
    const double m = rmq_.min(i, j - 1);
    return (v[i] - m) + (v[j] - m);
}

void MetricTree::check(const TreePoint& p) const {
    const std::size_t n = steps();
    if (const auto* g = std::get_if<GridIndex>(&p)) {
        if (g->i > n) throw std::out_of_range("tree point: grid index out of range");
        return;
    }
    const auto& q = std::get<GeodesicPoint>(p);
    if (q.from > n || q.to > n) throw std::out_of_range("tree point: geodesic anchor out of range");
    const double len = distance(q.from, q.to);
    if (!(q.offset >= 0.0) || q.offset > len + 1e-12)
        throw std::out_of_range("tree point: geodesic offset out of range");
}

double MetricTree::point_to_grid(const GeodesicPoint& p, std::size_t q) const noexcept {
    const double len = distance(p.from, p.to);
    const double da = distance(p.from, q);
    const double db = distance(p.to, q);
    const double foot = std::clamp(0.5 * (len + da - db), 0.0, len);
    return std::abs(p.offset - foot) + (da - foot);
}

double MetricTree::point_to_geodesic(const TreePoint& p, const GeodesicPoint& q) const {
    const double len = distance(q.from, q.to);
    const double dc = distance(p, GridIndex{q.from});
    const double de = distance(p, GridIndex{q.to});
    const double foot = std::clamp(0.5 * (len + dc - de), 0.0, len);
    return std::abs(q.offset - foot) + std::max(0.0, dc - foot);
}

double MetricTree::distance(const TreePoint& a, const TreePoint& b) const {
    check(a);
    check(b);
    const auto* ga = std::get_if<GridIndex>(&a);
    const auto* gb = std::get_if<GridIndex>(&b);
    if (ga && gb) return distance(ga->i, gb->i);
    if (gb) return point_to_grid(std::get<GeodesicPoint>(a), gb->i);
    if (ga) return point_to_grid(std::get<GeodesicPoint>(b), ga->i);
    return point_to_geodesic(a, std::get<GeodesicPoint>(b));
}

std::vector<double> MetricTree::distances_from(const TreePoint& p) const {
    check(p);
    const std::size_t n = steps();
    std::vector<double> out(n);
    if (const auto* g = std::get_if<GridIndex>(&p)) {
        const std::size_t x = g->i == n ? 0 : g->i;
        const auto v = excursion_.values();
        const auto w = excursion_.valleys();
        const double hx = v[x];
        out[x] = 0.0;
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = x + 1; i < n; ++i) {
            m = std::min(m, w[i - 1]);
            out[i] = (hx - m) + (v[i] - m);
        }
        m = std::numeric_limits<double>::infinity();
        for (std::size_t i = x; i-- > 0;) {
            m = std::min(m, w[i]);
            out[i] = (v[i] - m) + (hx - m);
        }
        return out;
    }
    const auto& q = std::get<GeodesicPoint>(p);
    const auto da = distances_from(GridIndex{q.from});
    const auto db = distances_from(GridIndex{q.to});
    const double len = distance(q.from, q.to);
    for (std::size_t i = 0; i < n; ++i) {
        const double foot = std::clamp(0.5 * (len + da[i] - db[i]), 0.0, len);
        out[i] = std::abs(q.offset - foot) + (da[i] - foot);
    }
    return out;
}

bool MetricTree::on_geodesic(const TreePoint& x, const TreePoint& y, const TreePoint& z) const {
    return std::abs(distance(x, z) + distance(z, y) - distance(x, y)) <= kGeodesicTolerance;
}

TreePoint MetricTree::point_on_geodesic_at(const TreePoint& x, const TreePoint& y, double d) const {
    check(x);
    check(y);
    const double len = distance(x, y);
    if (!(d >= 0.0) || d > len + 1e-12) throw std::out_of_range("point_on_geodesic_at: offset outside [0, rho(x, y)]");
    if (d == 0.0) return x;
    if (d >= len) return y;

    // Grid anchors u, w with x and y both on [[u, w]].
    std::size_t u = 0;
    double offset = 0.0;
    if (const auto* g = std::get_if<GridIndex>(&x)) {
        u = g->i;
    } else {
        const auto& p = std::get<GeodesicPoint>(x);
        const double lab = distance(p.from, p.to);
        const double foot =
            std::clamp(0.5 * (lab + distance(GridIndex{p.from}, y) - distance(GridIndex{p.to}, y)), 0.0, lab);
        if (foot >= p.offset) {
            u = p.from;
            offset = p.offset;
        } else {
            u = p.to;
            offset = lab - p.offset;
        }
    }
    std::size_t w = 0;
    if (const auto* g = std::get_if<GridIndex>(&y)) {
        w = g->i;
    } else {
        const auto& q = std::get<GeodesicPoint>(y);
        const double lce = distance(q.from, q.to);
        const double foot = std::clamp(0.5 * (lce + distance(q.from, u) - distance(q.to, u)), 0.0, lce);
        w = foot <= q.offset ? q.to : q.from;
    }
    const double span = distance(u, w);
    const double at = std::clamp(offset + d, 0.0, span);
    if (u == w || at == 0.0) return GridIndex{u};
    if (at == span) return GridIndex{w};
    return GeodesicPoint{u, w, at};
}

TreePoint MetricTree::meet(const TreePoint& x, const TreePoint& y, const TreePoint& z) const {
    const double len = distance(x, y);
    if (len == 0.0) return x;
    const double d = std::clamp(0.5 * (len + distance(x, z) - distance(y, z)), 0.0, len);
    return point_on_geodesic_at(x, y, d);
}

Ball MetricTree::ball(const TreePoint& x, double delta) const {
    if (!(delta > 0.0)) throw std::invalid_argument("ball: radius must be positive");
    const auto d = distances_from(x);
    Ball b;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] < delta) b.indices.push_back(i);
    b.volume = static_cast<double>(b.indices.size()) / static_cast<double>(steps());
    return b;
}

BallSplit MetricTree::split_ball(const TreePoint& x, const TreePoint& y, double delta) const {
    if (!(delta > 0.0)) throw std::invalid_argument("split_ball: radius must be positive");
    const double len = distance(x, y);
    if (!(len > 0.0)) throw std::invalid_argument("split_ball: x and y coincide");
    const auto dx = distances_from(x);
    const auto dy = distances_from(y);
    BallSplit s;
    for (std::size_t i = 0; i < dx.size(); ++i) {
        if (!(dx[i] < delta)) continue;
        // x separates i from y exactly when x lies on [[i, y]].
        if (std::abs(dx[i] + len - dy[i]) <= kGeodesicTolerance) s.offspring.push_back(i);
        else s.ancestry.push_back(i);
    }
    return s;
}

BallIntersection MetricTree::ball_intersection_center(const TreePoint& x, const TreePoint& y, double delta,
                                                      double eps) const {
    if (!(delta > 0.0) || !(eps > 0.0)) throw std::invalid_argument("ball_intersection_center: radii must be positive");
    const double len = distance(x, y);
    if (!(delta + eps > len)) throw std::invalid_argument("ball_intersection_center: balls do not overlap");
    if (std::abs(delta - eps) > len + 1e-12)
        throw std::invalid_argument("ball_intersection_center: one ball contains the other's center");
    const double at = std::clamp(0.5 * (len - eps + delta), 0.0, len);
    return {point_on_geodesic_at(x, y, at), 0.5 * (delta + eps - len)};
}

double MetricTree::lipschitz_witness(const TreePoint& x, const TreePoint& y, const TreePoint& sigma) const {
    if (!(distance(x, y) > 0.0)) throw std::invalid_argument("lipschitz_witness: x and y coincide");
    const double r = distance(sigma, y);
    return on_geodesic(sigma, x, y) ? -r : r;
}

}  // namespace bcrt
