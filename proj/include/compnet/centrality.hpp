#pragma once

// Per-node centrality measures on one adjacency scope: common out-neighbor
// scores of order 1 and 2, closeness, betweenness, PageRank on the reversed
// digraph, and weighted in/out-degrees.
//
// CON is computed by the direct min-sum over actor pairs. Pairs where either
// row is all-zero contribute nothing and receive nothing, so the pair loop
// only visits rows with support; the result is identical to the full sum
// over V x V.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "compnet/graph.hpp"

namespace compnet {

// Number of common competitors u and v have both defeated:
// sum over x of min(A[u,x], A[v,x]). Symmetric in (u, v).
inline std::int64_t con_pair(const WeightedAdjacency& a, std::size_t u, std::size_t v) {
    if (u == v) throw std::invalid_argument("con_pair requires u != v");
    auto ru = a.row(u);
    auto rv = a.row(v);
    std::int64_t s = 0;
    for (std::size_t x = 0; x < ru.size(); ++x) s += std::min(ru[x], rv[x]);
    return s;
}

namespace detail {

inline std::vector<std::int64_t> con_scores_on(const WeightedAdjacency& a) {
    const std::size_t n = a.size();
    std::vector<std::int64_t> con(n, 0);
    std::vector<std::uint32_t> support;
    for (std::uint32_t v = 0; v < n; ++v) {
        auto row = a.row(v);
        if (std::any_of(row.begin(), row.end(), [](std::int64_t w) { return w != 0; }))
            support.push_back(v);
    }
    for (std::size_t i = 0; i < support.size(); ++i) {
        auto ri = a.row(support[i]);
        for (std::size_t j = i + 1; j < support.size(); ++j) {
            auto rj = a.row(support[j]);
            std::int64_t s = 0;
            for (std::size_t x = 0; x < n; ++x) s += std::min(ri[x], rj[x]);
            con[support[i]] += s;
            con[support[j]] += s;
        }
    }
    return con;
}

} // namespace detail

// Order 1 runs on A itself; order 2 on A2 = A + A^2 (zero diagonal).
inline std::vector<std::int64_t> con_scores(const WeightedAdjacency& a, int order) {
    if (order == 1) return detail::con_scores_on(a);
    if (order == 2) return detail::con_scores_on(second_order_adjacency(a));
    throw std::invalid_argument("con order must be 1 or 2");
}

// C(v) = 1 / sum of BFS distances to nodes reachable from v; 0 when v
// reaches nothing. No reachable-fraction rescaling.
inline std::vector<double> closeness(const SimpleDigraph& g) {
    std::vector<double> c(g.n, 0.0);
    std::vector<int> dist(g.n);
    std::vector<std::uint32_t> queue(g.n);
    for (std::uint32_t s = 0; s < g.n; ++s) {
        if (g.out[s].empty()) continue;
        std::fill(dist.begin(), dist.end(), -1);
        std::size_t head = 0, tail = 0;
        dist[s] = 0;
        queue[tail++] = s;
        std::int64_t total = 0;
        while (head < tail) {
            const std::uint32_t u = queue[head++];
            for (auto v : g.out[u])
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    total += dist[v];
                    queue[tail++] = v;
                }
        }
        if (total > 0) c[s] = 1.0 / static_cast<double>(total);
    }
    return c;
}

// Unnormalized directed betweenness (Brandes). Pairs with no connecting
// path contribute nothing; endpoints are excluded.
inline std::vector<double> betweenness(const SimpleDigraph& g) {
    std::vector<double> b(g.n, 0.0);
    std::vector<int> dist(g.n);
    std::vector<double> sigma(g.n), delta(g.n);
    std::vector<std::vector<std::uint32_t>> pred(g.n);
    std::vector<std::uint32_t> order;
    order.reserve(g.n);
    std::vector<std::uint32_t> queue(g.n);

    for (std::uint32_t s = 0; s < g.n; ++s) {
        if (g.out[s].empty()) continue;
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : pred) p.clear();
        order.clear();

        std::size_t head = 0, tail = 0;
        dist[s] = 0;
        sigma[s] = 1.0;
        queue[tail++] = s;
        while (head < tail) {
            const std::uint32_t u = queue[head++];
            order.push_back(u);
            for (auto v : g.out[u]) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    queue[tail++] = v;
                }
                if (dist[v] == dist[u] + 1) {
                    sigma[v] += sigma[u];
                    pred[v].push_back(u);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const std::uint32_t w = *it;
            for (auto u : pred[w])
                delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w]);
            if (w != s) b[w] += delta[w];
        }
    }
    return b;
}

struct PageRankResult {
    std::vector<double> values; // sums to 1
    int iterations = 0;
    bool converged = false;
    double residual = 0.0; // final L1 change
};

// Standard power iteration with uniform teleport and uniform dangling-mass
// redistribution. The caller passes the graph to rank; reverse_pagerank
// below feeds the edge-reversed digraph so rank flows from losers to winners.
inline PageRankResult pagerank(const SimpleDigraph& g, double damping = 0.85,
                               double tol = 1e-9, int max_iter = 200) {
    if (!(damping > 0.0 && damping < 1.0))
        throw std::invalid_argument("damping must lie in (0, 1)");
    const std::size_t n = g.n;
    PageRankResult r;
    if (n == 0) return r;
    std::vector<double> pr(n, 1.0 / static_cast<double>(n)), next(n);
    const double teleport = (1.0 - damping) / static_cast<double>(n);

    for (int it = 1; it <= max_iter; ++it) {
        double dangling = 0.0;
        for (std::size_t u = 0; u < n; ++u)
            if (g.out[u].empty()) dangling += pr[u];
        const double base = teleport + damping * dangling / static_cast<double>(n);
        std::fill(next.begin(), next.end(), base);
        for (std::size_t u = 0; u < n; ++u) {
            if (g.out[u].empty()) continue;
            const double share = damping * pr[u] / static_cast<double>(g.out[u].size());
            for (auto v : g.out[u]) next[v] += share;
        }
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff += std::abs(next[i] - pr[i]);
        pr.swap(next);
        r.iterations = it;
        r.residual = diff;
        if (diff < tol) {
            r.converged = true;
            break;
        }
    }
    r.values = std::move(pr);
    return r;
}

inline PageRankResult reverse_pagerank(const SimpleDigraph& g, double damping = 0.85,
                                       double tol = 1e-9, int max_iter = 200) {
    return pagerank(g.reversed(), damping, tol, max_iter);
}

struct DegreeVectors {
    std::vector<std::int64_t> in;
    std::vector<std::int64_t> out;
};

// Weighted degrees; multiplicity counts.
inline DegreeVectors degrees(const WeightedAdjacency& a) {
    const std::size_t n = a.size();
    DegreeVectors d{std::vector<std::int64_t>(n, 0), std::vector<std::int64_t>(n, 0)};
    for (std::size_t i = 0; i < n; ++i) {
        auto row = a.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            d.out[i] += row[j];
            d.in[j] += row[j];
        }
    }
    return d;
}

} // namespace compnet
