#include "bcrt/transport.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "bcrt/stats.hpp"

namespace bcrt {

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms, std::size_t n) : n_(n) {
    if (atoms.empty()) throw std::invalid_argument("measure: no atoms");
    for (auto& a : atoms) {
        if (a.index > n) throw std::out_of_range("measure: atom off the grid");
        if (!(a.mass > 0.0) || !std::isfinite(a.mass)) throw std::invalid_argument("measure: masses must be positive");
        if (a.index == n) a.index = 0;
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.index < b.index; });
    CompensatedSum total;
    for (const auto& a : atoms) {
        total.add(a.mass);
        if (!atoms_.empty() && atoms_.back().index == a.index) atoms_.back().mass += a.mass;
        else atoms_.push_back(a);
    }
    if (std::abs(total.value() - 1.0) > 1e-12) throw std::invalid_argument("measure: masses must sum to 1");
}

DiscreteMeasure uniform_ball_measure(const MetricTree& t, const TreePoint& x, double delta) {
    const Ball b = t.ball(x, delta);
    if (b.indices.empty()) throw std::invalid_argument("uniform_ball_measure: empty ball");
    const double w = 1.0 / static_cast<double>(b.indices.size());
    std::vector<Atom> atoms;
    atoms.reserve(b.indices.size());
    for (std::size_t i : b.indices) atoms.push_back({i, w});
    return DiscreteMeasure(std::move(atoms), t.steps());
}

namespace {

void check_grid(const MetricTree& t, const DiscreteMeasure& m) {
    if (m.grid_steps() != t.steps()) throw std::invalid_argument("transport: measure lives on another grid");
}

}  // namespace

TransportResult w1_edge_cut(const MetricTree& t, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            double fault) {
    check_grid(t, mu);
    check_grid(t, nu);
    const EdgeList& g = t.edges();
    std::vector<double> net(g.node_count(), 0.0);
    for (const auto& a : mu.atoms()) net[g.node_of_index[a.index]] += a.mass;
    for (const auto& a : nu.atoms()) net[g.node_of_index[a.index]] -= a.mass;
    CompensatedSum cost;
    for (std::size_t u : g.post_order) {
        if (u == 0) continue;
        if (net[u] != 0.0) {
            cost.add(g.length[u] * std::abs(net[u]));
            net[g.parent[u]] += net[u];
        }
    }
    return {cost.value() + fault, TransportMethod::kEdgeCut, {}};
}

TransportResult w1_oracle(const MetricTree& t, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    check_grid(t, mu);
    check_grid(t, nu);
    const std::size_t m = mu.size(), k = nu.size();
    if (m * k > kOracleMaxPairs) throw std::invalid_argument("w1_oracle: instance too large");

    std::vector<double> cost(m * k);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j) cost[i * k + j] = t.distance(mu.atoms()[i].index, nu.atoms()[j].index);

    std::vector<double> supply(m), demand(k), flow(m * k, 0.0);
    for (std::size_t i = 0; i < m; ++i) supply[i] = mu.atoms()[i].mass;
    for (std::size_t j = 0; j < k; ++j) demand[j] = nu.atoms()[j].mass;

    constexpr double kMassEps = 1e-15;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    // Nodes 0..m-1 are sources, m..m+k-1 sinks. Label-correcting shortest
    // paths from every source that still has supply; residual arcs are
    // i->j (always) and j->i (when flow(i, j) > 0, negated cost).
    std::vector<double> dist(m + k);
    std::vector<std::size_t> pred(m + k);
    std::vector<char> queued(m + k);
    for (;;) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(pred.begin(), pred.end(), kNone);
        std::fill(queued.begin(), queued.end(), 0);
        std::deque<std::size_t> queue;
        for (std::size_t i = 0; i < m; ++i) {
            if (supply[i] > kMassEps) {
                dist[i] = 0.0;
                queue.push_back(i);
                queued[i] = 1;
            }
        }
        if (queue.empty()) break;
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            queued[u] = 0;
            auto relax = [&](std::size_t v, double nd) {
                if (nd < dist[v] - 1e-14) {
                    dist[v] = nd;
                    pred[v] = u;
                    if (!queued[v]) {
                        queued[v] = 1;
                        queue.push_back(v);
                    }
                }
            };
            if (u < m) {
                for (std::size_t j = 0; j < k; ++j) relax(m + j, dist[u] + cost[u * k + j]);
            } else {
                const std::size_t j = u - m;
                for (std::size_t i = 0; i < m; ++i)
                    if (flow[i * k + j] > kMassEps) relax(i, dist[u] - cost[i * k + j]);
            }
        }
        std::size_t sink = kNone;
        for (std::size_t j = 0; j < k; ++j)
            if (demand[j] > kMassEps && dist[m + j] < kInf && (sink == kNone || dist[m + j] < dist[m + sink])) sink = j;
        if (sink == kNone) break;

        // Walk back to find the source and the bottleneck.
        double push = demand[sink];
        std::size_t v = m + sink;
        while (pred[v] != kNone) {
            const std::size_t u = pred[v];
            if (u >= m) push = std::min(push, flow[v * k + (u - m)]);
            v = u;
        }
        push = std::min(push, supply[v]);
        supply[v] -= push;
        demand[sink] -= push;
        v = m + sink;
        while (pred[v] != kNone) {
            const std::size_t u = pred[v];
            if (u < m) flow[u * k + (v - m)] += push;
            else flow[v * k + (u - m)] -= push;
            v = u;
        }
    }

    TransportResult r;
    r.method = TransportMethod::kOracle;
    CompensatedSum total;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (flow[i * k + j] > 0.0) {
                r.plan.push_back({i, j, flow[i * k + j]});
                total.add(flow[i * k + j] * cost[i * k + j]);
            }
    r.cost = total.value();
    return r;
}

double kantorovich_gap(const MetricTree& t, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const TreePoint& x, const TreePoint& y) {
    check_grid(t, mu);
    check_grid(t, nu);
    if (!(t.distance(x, y) > 0.0)) throw std::invalid_argument("kantorovich_gap: x and y coincide");
    CompensatedSum gap;
    for (const auto& a : mu.atoms()) gap.add(a.mass * t.lipschitz_witness(x, y, GridIndex{a.index}));
    for (const auto& a : nu.atoms()) gap.add(-a.mass * t.lipschitz_witness(x, y, GridIndex{a.index}));
    return gap.value();
}

double independent_plan_cost(const MetricTree& t, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    CompensatedSum total;
    for (const auto& a : mu.atoms())
        for (const auto& b : nu.atoms()) total.add(a.mass * b.mass * t.distance(a.index, b.index));
    return total.value();
}

}  // namespace bcrt
