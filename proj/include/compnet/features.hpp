#pragma once

// The per-(competition, round) feature loop: build the scope adjacency, run
// every requested centrality measure, and collect long-form rows. Scopes are
// independent work units; rows always come out sorted by (competition, round,
// actor index) regardless of the thread count.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "compnet/centrality.hpp"
#include "compnet/graph.hpp"
#include "compnet/types.hpp"

namespace compnet {

enum class ScopeMode { per_round, cumulative };

inline std::string_view scope_mode_name(ScopeMode m) {
    return m == ScopeMode::per_round ? "per-round" : "cumulative";
}

inline ScopeMode parse_scope_mode(std::string_view s) {
    if (s == "per-round" || s == "per_round") return ScopeMode::per_round;
    if (s == "cumulative") return ScopeMode::cumulative;
    throw StageError("unknown scope mode '" + std::string(s) + "'");
}

struct LongFeatures {
    struct Row {
        std::uint32_t actor = 0;
        std::uint32_t competition = 0;
        int round = 1;
        std::vector<double> values; // aligned to `measures`
    };

    std::vector<Measure> measures;
    std::vector<std::string> actors;       // actor index -> id
    std::vector<std::string> competitions; // competition index -> id
    std::vector<Row> rows;
    double runtime_seconds = 0.0;
    std::vector<std::string> warnings; // e.g. PageRank non-convergence
};

namespace detail {

struct ScopeOutput {
    std::vector<LongFeatures::Row> rows;
    std::string warning;
};

inline ScopeOutput compute_scope(const DynamicCompetitionNetwork& net,
                                 const std::vector<Measure>& measures,
                                 std::size_t competition, int round, ScopeMode mode) {
    const Scope scope = mode == ScopeMode::per_round
                            ? Scope::per_round(competition, round)
                            : Scope::cumulative(competition, round);

    bool need_adjacency = false, need_digraph = false;
    for (Measure m : measures) {
        switch (m) {
            case Measure::con1:
            case Measure::con2:
            case Measure::in_degree:
            case Measure::out_degree: need_adjacency = true; break;
            case Measure::pagerank:
            case Measure::closeness:
            case Measure::betweenness: need_digraph = true; break;
        }
    }

    WeightedAdjacency a;
    SimpleDigraph g;
    if (need_adjacency) a = net.adjacency(scope);
    if (need_digraph) g = net.simple_digraph(scope);

    const std::size_t n = net.actor_count();
    std::vector<std::vector<double>> columns(measures.size());
    ScopeOutput out;
    for (std::size_t mi = 0; mi < measures.size(); ++mi) {
        auto& col = columns[mi];
        col.resize(n);
        switch (measures[mi]) {
            case Measure::con1: {
                auto v = con_scores(a, 1);
                for (std::size_t i = 0; i < n; ++i) col[i] = static_cast<double>(v[i]);
                break;
            }
            case Measure::con2: {
                auto v = con_scores(a, 2);
                for (std::size_t i = 0; i < n; ++i) col[i] = static_cast<double>(v[i]);
                break;
            }
            case Measure::pagerank: {
                auto pr = reverse_pagerank(g);
                if (!pr.converged)
                    out.warning = "pagerank did not converge for competition '" +
                                  net.competitions()[competition] + "' round " +
                                  std::to_string(round) + " (" +
                                  std::to_string(pr.iterations) + " iterations, residual " +
                                  std::to_string(pr.residual) + ")";
                col = std::move(pr.values);
                break;
            }
            case Measure::closeness: col = closeness(g); break;
            case Measure::betweenness: col = betweenness(g); break;
            case Measure::in_degree: {
                auto d = degrees(a);
                for (std::size_t i = 0; i < n; ++i)
                    col[i] = static_cast<double>(d.in[i]);
                break;
            }
            case Measure::out_degree: {
                auto d = degrees(a);
                for (std::size_t i = 0; i < n; ++i)
                    col[i] = static_cast<double>(d.out[i]);
                break;
            }
        }
    }

    for (std::uint32_t actor : net.active_actors(scope)) {
        LongFeatures::Row row;
        row.actor = actor;
        row.competition = static_cast<std::uint32_t>(competition);
        row.round = round;
        row.values.reserve(measures.size());
        for (const auto& col : columns) row.values.push_back(col[actor]);
        out.rows.push_back(std::move(row));
    }
    return out;
}

} // namespace detail

// threads = 0 picks the hardware concurrency; output is identical for any
// thread count.
inline LongFeatures run_nrm(const DynamicCompetitionNetwork& net,
                            std::vector<Measure> measures,
                            ScopeMode mode = ScopeMode::per_round,
                            unsigned threads = 0) {
    if (measures.empty()) throw StageError("run_nrm requires at least one measure");
    const auto start = std::chrono::steady_clock::now();

    std::vector<std::pair<std::size_t, int>> scopes;
    for (std::size_t c = 0; c < net.competitions().size(); ++c)
        for (int t = 1; t <= net.rounds(c); ++t) scopes.emplace_back(c, t);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(scopes.size()));

    std::vector<detail::ScopeOutput> outputs(scopes.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < scopes.size(); ++i)
            outputs[i] = detail::compute_scope(net, measures, scopes[i].first,
                                               scopes[i].second, mode);
    } else {
        std::atomic<std::size_t> cursor{0};
        auto worker = [&] {
            while (true) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= scopes.size()) return;
                outputs[i] = detail::compute_scope(net, measures, scopes[i].first,
                                                   scopes[i].second, mode);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    LongFeatures out;
    out.measures = std::move(measures);
    out.actors = net.actors();
    out.competitions = net.competitions();
    for (auto& o : outputs) {
        if (!o.warning.empty()) out.warnings.push_back(std::move(o.warning));
        for (auto& r : o.rows) out.rows.push_back(std::move(r));
    }
    out.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

struct WideFeatures {
    std::vector<std::string> actors;  // lexicographic, one row per actor
    std::vector<std::string> columns; // "{measure}_t{round}", measure-major
    std::vector<std::vector<double>> data; // [actor][column]
    int max_round = 0;
    std::vector<Measure> measures;
};

// One row per actor, cell = the actor's value for that measure and round.
// Rounds the actor's competition lacks, or where the actor was inactive,
// fill with 0. An actor participating in several competitions has its
// same-round values summed. Rows are ordered by actor id so the pivot is
// reproducible from the long CSV alone.
inline WideFeatures to_wide(const LongFeatures& lf) {
    WideFeatures w;
    w.actors = lf.actors;
    std::sort(w.actors.begin(), w.actors.end());
    w.measures = lf.measures;
    for (const auto& row : lf.rows) w.max_round = std::max(w.max_round, row.round);
    const std::size_t k = static_cast<std::size_t>(w.max_round);
    for (Measure m : lf.measures)
        for (int t = 1; t <= w.max_round; ++t)
            w.columns.push_back(std::string(measure_name(m)) + "_t" + std::to_string(t));

    std::vector<std::size_t> slot(lf.actors.size());
    for (std::size_t i = 0; i < lf.actors.size(); ++i) {
        const auto it = std::lower_bound(w.actors.begin(), w.actors.end(), lf.actors[i]);
        slot[i] = static_cast<std::size_t>(it - w.actors.begin());
    }
    w.data.assign(w.actors.size(), std::vector<double>(lf.measures.size() * k, 0.0));
    for (const auto& row : lf.rows)
        for (std::size_t mi = 0; mi < lf.measures.size(); ++mi)
            w.data[slot[row.actor]][mi * k + static_cast<std::size_t>(row.round - 1)] +=
                row.values[mi];
    return w;
}

// (x - min) / (max - min); a constant input maps to all zeros.
inline std::vector<double> unity_normalize(const std::vector<double>& values) {
    if (values.empty()) throw StageError("unity_normalize: empty input");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> out(values.size(), 0.0);
    if (hi > lo)
        for (std::size_t i = 0; i < values.size(); ++i)
            out[i] = (values[i] - lo) / (hi - lo);
    return out;
}

// Trailing window mean, truncated at the start; output aligns with input.
inline std::vector<double> moving_average(const std::vector<double>& values,
                                          std::size_t window = 50) {
    if (window == 0) throw StageError("moving_average: window must be >= 1");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t begin = i + 1 >= window ? i + 1 - window : 0;
        double acc = 0.0;
        for (std::size_t j = begin; j <= i; ++j) acc += values[j];
        out[i] = acc / static_cast<double>(i - begin + 1);
    }
    return out;
}

} // namespace compnet
