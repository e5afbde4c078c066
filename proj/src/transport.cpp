#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cmek/distances.hpp"
#include "cmek/error.hpp"

namespace cmek {

// Successive shortest augmenting paths on the bipartite transport network.
// Shipping lanes i -> j have unbounded capacity and cost G(i, j); their
// residual reverse lanes j -> i carry the current flow at cost -G(i, j).
// Bellman-Ford handles the negative residual costs. Every augmentation
// exhausts a supply, a demand or a reverse lane, so the loop terminates.
double transport_cost(std::span<const double> supply, std::span<const double> demand,
                      const GroundMatrix& ground) {
    const std::size_t k = supply.size();
    if (demand.size() != k || ground.dim != k) throw Error("transport_cost: dimension mismatch");
    for (std::size_t i = 0; i < k; ++i) {
        if (!(supply[i] >= 0.0) || !(demand[i] >= 0.0)) throw Error("transport_cost: negative mass");
    }
    const double total_s = std::accumulate(supply.begin(), supply.end(), 0.0);
    const double total_d = std::accumulate(demand.begin(), demand.end(), 0.0);
    const double scale = std::max(total_s, total_d);
    if (std::abs(total_s - total_d) > 1e-9 * std::max(scale, 1.0)) {
        throw Error("transport_cost: supply and demand totals differ");
    }
    if (scale == 0.0) return 0.0;
    const double eps = 1e-15 * scale;
    double max_cost = 0.0;
    for (double c : ground.cost) max_cost = std::max(max_cost, c);
    // Relaxations must beat rounding noise, or near-zero residual cycles
    // can chain parent pointers into a loop.
    const double slack = 1e-12 * (max_cost + 1.0);

    std::vector<double> left(supply.begin(), supply.end());
    std::vector<double> need(demand.begin(), demand.end());
    std::vector<double> flow(k * k, 0.0);
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Node ids: supplies 0..k-1, demands k..2k-1.
    std::vector<double> dist(2 * k);
    std::vector<std::size_t> parent(2 * k);

    for (std::size_t round = 0; round < 4 * k * k + 4 * k; ++round) {
        double remaining = 0.0;
        for (double v : left) remaining += v;
        if (remaining <= eps * static_cast<double>(k)) break;

        std::fill(dist.begin(), dist.end(), inf);
        const std::size_t none = 2 * k;
        std::fill(parent.begin(), parent.end(), none);
        for (std::size_t i = 0; i < k; ++i) {
            if (left[i] > eps) dist[i] = 0.0;
        }
        for (std::size_t pass = 0; pass < 2 * k; ++pass) {
            bool changed = false;
            for (std::size_t i = 0; i < k; ++i) {
                if (dist[i] == inf) continue;
                for (std::size_t j = 0; j < k; ++j) {
                    const double nd = dist[i] + ground(i, j);
                    if (nd < dist[k + j] - slack) {
                        dist[k + j] = nd;
                        parent[k + j] = i;
                        changed = true;
                    }
                }
            }
            for (std::size_t j = 0; j < k; ++j) {
                if (dist[k + j] == inf) continue;
                for (std::size_t i = 0; i < k; ++i) {
                    if (flow[i * k + j] <= eps) continue;
                    const double nd = dist[k + j] - ground(i, j);
                    if (nd < dist[i] - slack) {
                        dist[i] = nd;
                        parent[i] = k + j;
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }

        std::size_t sink = none;
        for (std::size_t j = 0; j < k; ++j) {
            if (need[j] > eps && dist[k + j] < inf && (sink == none || dist[k + j] < dist[sink])) {
                sink = k + j;
            }
        }
        if (sink == none) break;

        // Bottleneck along the path back to a supply root.
        double amount = need[sink - k];
        std::size_t v = sink;
        std::size_t steps = 0;
        while (parent[v] != none) {
            if (++steps > 2 * k) throw Error("transport_cost: augmenting path did not terminate");
            const std::size_t u = parent[v];
            if (u >= k) amount = std::min(amount, flow[v * k + (u - k)]);
            v = u;
        }
        amount = std::min(amount, left[v]);
        if (!(amount > 0.0)) break;

        left[v] -= amount;
        need[sink - k] -= amount;
        v = sink;
        while (parent[v] != none) {
            const std::size_t u = parent[v];
            if (u < k) {
                flow[u * k + (v - k)] += amount;
            } else {
                flow[v * k + (u - k)] -= amount;
            }
            v = u;
        }
    }

    double cost = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) cost += flow[i * k + j] * ground(i, j);
    }
    return cost;
}

}  // namespace cmek
