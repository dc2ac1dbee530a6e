#pragma once

// Dynamic competition network: a fixed actor set with per-(competition, round)
// weighted directed multi-edge sets, plus the adjacency/simple-digraph views
// every downstream measure runs on.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "compnet/types.hpp"

namespace compnet {

// Dense non-negative integer matrix with zero diagonal. Entry (i, j) counts
// victories of i over j in the selected scope. Entries are 64-bit because
// A + A^2 products and CON sums can exceed 32 bits on cumulative scopes.
class WeightedAdjacency {
public:
    WeightedAdjacency() = default;
    explicit WeightedAdjacency(std::size_t n) : n_(n), data_(n * n, 0) {}

    std::size_t size() const { return n_; }

    std::int64_t& at(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    std::int64_t at(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    std::span<const std::int64_t> row(std::size_t i) const {
        return {data_.data() + i * n_, n_};
    }
    std::span<std::int64_t> row(std::size_t i) {
        return {data_.data() + i * n_, n_};
    }

    friend bool operator==(const WeightedAdjacency&, const WeightedAdjacency&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::int64_t> data_;
};

// Unweighted directed graph: edge i->j present iff the weighted form has
// A[i,j] >= 1. Distance-based measures run on this view; weights express
// repetition of victories, not path length.
struct SimpleDigraph {
    std::size_t n = 0;
    std::vector<std::vector<std::uint32_t>> out;

    std::size_t edge_count() const {
        std::size_t m = 0;
        for (const auto& a : out) m += a.size();
        return m;
    }

    SimpleDigraph reversed() const {
        SimpleDigraph r;
        r.n = n;
        r.out.resize(n);
        for (std::size_t u = 0; u < n; ++u)
            for (auto v : out[u]) r.out[v].push_back(static_cast<std::uint32_t>(u));
        for (auto& a : r.out) std::sort(a.begin(), a.end());
        return r;
    }
};

struct Scope {
    enum class Kind { round, cumulative, global };
    Kind kind = Kind::global;
    std::size_t competition = 0; // index into network.competitions
    int round = 0;               // dense round, 1-based

    static Scope per_round(std::size_t c, int t) { return {Kind::round, c, t}; }
    static Scope cumulative(std::size_t c, int t) { return {Kind::cumulative, c, t}; }
    static Scope global() { return {}; }
};

class DynamicCompetitionNetwork {
public:
    // Actor index is assigned in first-appearance order (winner before loser
    // within an event). Rounds are densely renumbered 1..k per competition.
    static DynamicCompetitionNetwork build(const std::vector<MatchEvent>& events) {
        if (events.empty()) throw StageError("cannot build a network from zero events");
        DynamicCompetitionNetwork net;
        std::unordered_map<std::string, std::uint32_t> actor_ix;
        std::unordered_map<std::string, std::size_t> comp_ix;

        auto actor = [&](const std::string& id) {
            auto [it, fresh] = actor_ix.try_emplace(
                id, static_cast<std::uint32_t>(net.actors_.size()));
            if (fresh) net.actors_.push_back(id);
            return it->second;
        };

        // First pass: discover competitions and their raw round sets.
        std::vector<std::map<int, int>> round_maps; // raw -> dense, per competition
        for (const auto& e : events) {
            auto [it, fresh] = comp_ix.try_emplace(e.competition, net.competitions_.size());
            if (fresh) {
                net.competitions_.push_back(e.competition);
                round_maps.emplace_back();
            }
            round_maps[it->second][e.round] = 0;
        }
        net.rounds_.resize(net.competitions_.size());
        for (std::size_t c = 0; c < round_maps.size(); ++c) {
            int dense = 0;
            for (auto& [raw, mapped] : round_maps[c]) mapped = ++dense;
            net.rounds_[c] = dense;
        }

        net.edges_.resize(net.competitions_.size());
        for (std::size_t c = 0; c < net.edges_.size(); ++c)
            net.edges_[c].resize(static_cast<std::size_t>(net.rounds_[c]));

        for (const auto& e : events) {
            const std::size_t c = comp_ix.at(e.competition);
            const int t = round_maps[c].at(e.round);
            const std::uint32_t w = actor(e.winner);
            const std::uint32_t l = actor(e.loser);
            net.edges_[c][static_cast<std::size_t>(t - 1)].push_back({w, l});
        }
        return net;
    }

    std::size_t actor_count() const { return actors_.size(); }
    const std::vector<std::string>& actors() const { return actors_; }
    const std::vector<std::string>& competitions() const { return competitions_; }
    int rounds(std::size_t competition) const { return rounds_.at(competition); }
    int max_rounds() const {
        int k = 0;
        for (int r : rounds_) k = std::max(k, r);
        return k;
    }

    std::size_t event_count() const {
        std::size_t m = 0;
        for (const auto& comp : edges_)
            for (const auto& round : comp) m += round.size();
        return m;
    }

    // (winner, loser) pairs of one dense round.
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& round_events(
        std::size_t competition, int round) const {
        check_scope(competition, round);
        return edges_[competition][static_cast<std::size_t>(round - 1)];
    }

    WeightedAdjacency adjacency(const Scope& scope) const {
        WeightedAdjacency a(actor_count());
        for_scope_events(scope, [&](std::uint32_t w, std::uint32_t l) {
            ++a.at(w, l);
        });
        return a;
    }

    SimpleDigraph simple_digraph(const Scope& scope) const {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
        for_scope_events(scope, [&](std::uint32_t w, std::uint32_t l) {
            pairs.emplace_back(w, l);
        });
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        SimpleDigraph g;
        g.n = actor_count();
        g.out.resize(g.n);
        for (auto [w, l] : pairs) g.out[w].push_back(l);
        return g;
    }

    // Actors touching at least one event of the scope, ascending index.
    std::vector<std::uint32_t> active_actors(const Scope& scope) const {
        std::vector<char> seen(actor_count(), 0);
        for_scope_events(scope, [&](std::uint32_t w, std::uint32_t l) {
            seen[w] = seen[l] = 1;
        });
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 0; i < seen.size(); ++i)
            if (seen[i]) out.push_back(i);
        return out;
    }

    // Actors with at least one event anywhere in the competition.
    std::vector<std::uint32_t> competition_actors(std::size_t competition) const {
        std::vector<char> seen(actor_count(), 0);
        for (const auto& round : edges_.at(competition))
            for (auto [w, l] : round) seen[w] = seen[l] = 1;
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 0; i < seen.size(); ++i)
            if (seen[i]) out.push_back(i);
        return out;
    }

private:
    template <class F>
    void for_scope_events(const Scope& scope, F&& f) const {
        switch (scope.kind) {
            case Scope::Kind::global:
                for (const auto& comp : edges_)
                    for (const auto& round : comp)
                        for (auto [w, l] : round) f(w, l);
                return;
            case Scope::Kind::round: {
                check_scope(scope.competition, scope.round);
                for (auto [w, l] :
                     edges_[scope.competition][static_cast<std::size_t>(scope.round - 1)])
                    f(w, l);
                return;
            }
            case Scope::Kind::cumulative: {
                check_scope(scope.competition, scope.round);
                for (int t = 1; t <= scope.round; ++t)
                    for (auto [w, l] :
                         edges_[scope.competition][static_cast<std::size_t>(t - 1)])
                        f(w, l);
                return;
            }
        }
    }

    void check_scope(std::size_t competition, int round) const {
        if (competition >= competitions_.size())
            throw StageError("competition index out of range");
        if (round < 1 || round > rounds_[competition])
            throw StageError("round " + std::to_string(round) +
                             " out of range for competition '" +
                             competitions_[competition] + "'");
    }

    std::vector<std::string> actors_;
    std::vector<std::string> competitions_;
    std::vector<int> rounds_;
    // edges_[competition][round-1] -> (winner, loser) pairs with multiplicity
    std::vector<std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>>> edges_;
};

inline DynamicCompetitionNetwork build_network(const std::vector<MatchEvent>& events) {
    return DynamicCompetitionNetwork::build(events);
}

// A2 = A + A*A with the diagonal forced to zero: a node must not count
// itself as its own out-neighbor through a 2-cycle.
inline WeightedAdjacency second_order_adjacency(const WeightedAdjacency& a) {
    const std::size_t n = a.size();
    WeightedAdjacency out = a;
    for (std::size_t i = 0; i < n; ++i) {
        auto row_i = a.row(i);
        auto out_i = out.row(i);
        for (std::size_t k = 0; k < n; ++k) {
            const std::int64_t aik = row_i[k];
            if (aik == 0) continue;
            auto row_k = a.row(k);
            for (std::size_t j = 0; j < n; ++j) out_i[j] += aik * row_k[j];
        }
        out_i[i] = 0;
    }
    return out;
}

struct GraphStats {
    std::size_t nodes = 0;
    std::size_t edges = 0; // event count, multiplicity included
    int rounds = 0;        // max dense round count over competitions
    std::size_t competitions = 0;
    std::string label_counts; // "top/middle/bottom", empty when no labels given
    bool connected = false;
    std::size_t wcc_count = 0;
    std::size_t scc_count = 0;
    double sparsity = 0.0; // distinct directed edges / n(n-1)
    int diameter = 0;      // longest shortest path over reachable ordered pairs
    double runtime_seconds = 0.0; // full feature-pass wall clock, 0 if unmeasured
};

namespace detail {

inline std::size_t count_wcc(const SimpleDigraph& g) {
    std::vector<std::uint32_t> parent(g.n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::uint32_t u = 0; u < g.n; ++u)
        for (auto v : g.out[u]) parent[find(u)] = find(v);
    std::size_t roots = 0;
    for (std::uint32_t u = 0; u < g.n; ++u)
        if (find(u) == u) ++roots;
    return roots;
}

// Iterative Tarjan; recursion would overflow on long chains.
inline std::size_t count_scc(const SimpleDigraph& g) {
    constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> index(g.n, kUnset), low(g.n, 0);
    std::vector<char> on_stack(g.n, 0);
    std::vector<std::uint32_t> stack;
    std::size_t scc = 0;
    std::uint32_t next_index = 0;

    struct Frame {
        std::uint32_t v;
        std::size_t child;
    };
    std::vector<Frame> call;
    for (std::uint32_t root = 0; root < g.n; ++root) {
        if (index[root] != kUnset) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& [v, child] = call.back();
            if (child == 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            if (child < g.out[v].size()) {
                const std::uint32_t w = g.out[v][child++];
                if (index[w] == kUnset) {
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            } else {
                if (low[v] == index[v]) {
                    ++scc;
                    std::uint32_t w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                    } while (w != v);
                }
                const std::uint32_t done = v;
                call.pop_back();
                if (!call.empty())
                    low[call.back().v] = std::min(low[call.back().v], low[done]);
            }
        }
    }
    return scc;
}

// Longest shortest path over ordered reachable pairs, directed BFS.
inline int directed_diameter(const SimpleDigraph& g) {
    int diameter = 0;
    std::vector<int> dist(g.n);
    std::vector<std::uint32_t> queue(g.n);
    for (std::uint32_t s = 0; s < g.n; ++s) {
        if (g.out[s].empty()) continue;
        std::fill(dist.begin(), dist.end(), -1);
        std::size_t head = 0, tail = 0;
        dist[s] = 0;
        queue[tail++] = s;
        while (head < tail) {
            const std::uint32_t u = queue[head++];
            for (auto v : g.out[u])
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    diameter = std::max(diameter, dist[v]);
                    queue[tail++] = v;
                }
        }
    }
    return diameter;
}

} // namespace detail

inline GraphStats graph_stats(const DynamicCompetitionNetwork& net) {
    GraphStats s;
    s.nodes = net.actor_count();
    s.edges = net.event_count();
    s.rounds = net.max_rounds();
    s.competitions = net.competitions().size();
    const SimpleDigraph g = net.simple_digraph(Scope::global());
    s.wcc_count = detail::count_wcc(g);
    s.scc_count = detail::count_scc(g);
    s.connected = s.wcc_count == 1;
    const std::size_t m_simple = g.edge_count();
    s.sparsity = s.nodes > 1 ? static_cast<double>(m_simple) /
                                   (static_cast<double>(s.nodes) *
                                    static_cast<double>(s.nodes - 1))
                             : 0.0;
    s.diameter = detail::directed_diameter(g);
    return s;
}

// Convenience overload carrying the label split into the stats row.
template <class LabelTableLike>
GraphStats graph_stats(const DynamicCompetitionNetwork& net,
                       const LabelTableLike* labels) {
    GraphStats s = graph_stats(net);
    if (labels) s.label_counts = labels->counts_string();
    return s;
}

} // namespace compnet
