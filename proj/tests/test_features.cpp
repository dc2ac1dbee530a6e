#include <doctest.h>

#include <algorithm>
#include <map>

#include "compnet/features.hpp"
#include "compnet/graph.hpp"
#include "compnet/rng.hpp"

using namespace compnet;

namespace {

std::vector<MatchEvent> shared_loser_events() {
    return {{"S1", 1, "u", "w"}, {"S1", 1, "v", "w"}};
}

const LongFeatures::Row* find_row(const LongFeatures& lf, const std::string& actor,
                                  int round) {
    for (const auto& r : lf.rows)
        if (lf.actors[r.actor] == actor && r.round == round) return &r;
    return nullptr;
}

} // namespace

TEST_CASE("run_nrm on the shared-loser triangle: con1 rows (u,1),(v,1),(w,0)") {
    const auto net = build_network(shared_loser_events());
    const auto lf = run_nrm(net, {Measure::con1}, ScopeMode::per_round, 1);
    REQUIRE(lf.rows.size() == 3);
    CHECK(find_row(lf, "u", 1)->values[0] == 1.0);
    CHECK(find_row(lf, "v", 1)->values[0] == 1.0);
    CHECK(find_row(lf, "w", 1)->values[0] == 0.0);
}

TEST_CASE("run_nrm requires at least one measure") {
    const auto net = build_network(shared_loser_events());
    CHECK_THROWS_AS(run_nrm(net, {}, ScopeMode::per_round, 1), StageError);
}

TEST_CASE("per-scope rows cover exactly the active actors") {
    const auto net = build_network({{"S1", 1, "a", "b"},
                                    {"S1", 2, "a", "c"},
                                    {"S2", 1, "d", "e"}});
    const auto lf = run_nrm(net, {Measure::out_degree}, ScopeMode::per_round, 1);
    std::map<std::pair<std::uint32_t, int>, std::size_t> per_scope;
    for (const auto& r : lf.rows) ++per_scope[{r.competition, r.round}];
    CHECK(per_scope[{0, 1}] == 2); // a, b
    CHECK(per_scope[{0, 2}] == 2); // a, c
    CHECK(per_scope[{1, 1}] == 2); // d, e
    CHECK(lf.rows.size() == 6);
}

TEST_CASE("per-round rows equal direct centrality output on that scope") {
    const auto net = build_network({{"S1", 1, "a", "b"},
                                    {"S1", 1, "b", "c"},
                                    {"S1", 2, "a", "c"},
                                    {"S1", 2, "c", "b"}});
    const auto lf = run_nrm(net, all_measures(), ScopeMode::per_round, 1);
    for (int t = 1; t <= 2; ++t) {
        const auto scope = Scope::per_round(0, t);
        const auto a = net.adjacency(scope);
        const auto g = net.simple_digraph(scope);
        const auto con1 = con_scores(a, 1);
        const auto con2 = con_scores(a, 2);
        const auto pr = reverse_pagerank(g).values;
        const auto cl = closeness(g);
        const auto bt = betweenness(g);
        const auto dg = degrees(a);
        for (const auto& row : lf.rows) {
            if (row.round != t) continue;
            const auto i = row.actor;
            CHECK(row.values[0] == static_cast<double>(con1[i]));
            CHECK(row.values[1] == static_cast<double>(con2[i]));
            CHECK(row.values[2] == pr[i]);
            CHECK(row.values[3] == cl[i]);
            CHECK(row.values[4] == bt[i]);
            CHECK(row.values[5] == static_cast<double>(dg.in[i]));
            CHECK(row.values[6] == static_cast<double>(dg.out[i]));
        }
    }
}

TEST_CASE("cumulative mode uses rounds 1..t") {
    const auto net = build_network({{"S1", 1, "a", "b"}, {"S1", 2, "a", "b"}});
    const auto lf = run_nrm(net, {Measure::out_degree}, ScopeMode::cumulative, 1);
    CHECK(find_row(lf, "a", 1)->values[0] == 1.0);
    CHECK(find_row(lf, "a", 2)->values[0] == 2.0); // both rounds accumulated
}

TEST_CASE("output is independent of the thread count") {
    std::vector<MatchEvent> ev;
    for (int t = 1; t <= 6; ++t)
        for (int i = 0; i < 10; ++i)
            ev.push_back({"C" + std::to_string(i % 3), t,
                          "a" + std::to_string(i), "a" + std::to_string((i + 3) % 10)});
    const auto net = build_network(ev);
    const auto one = run_nrm(net, all_measures(), ScopeMode::per_round, 1);
    const auto many = run_nrm(net, all_measures(), ScopeMode::per_round, 4);
    REQUIRE(one.rows.size() == many.rows.size());
    for (std::size_t i = 0; i < one.rows.size(); ++i) {
        CHECK(one.rows[i].actor == many.rows[i].actor);
        CHECK(one.rows[i].round == many.rows[i].round);
        CHECK(one.rows[i].values == many.rows[i].values);
    }
}

TEST_CASE("wide pivot: shape, fill, and lexicographic actor order") {
    const auto net = build_network({{"S1", 1, "b", "a"}, {"S1", 2, "a", "b"}});
    const auto lf = run_nrm(net, {Measure::con1, Measure::out_degree},
                            ScopeMode::per_round, 1);
    const auto w = to_wide(lf);
    CHECK(w.actors == std::vector<std::string>{"a", "b"});
    CHECK(w.columns == std::vector<std::string>{"con1_t1", "con1_t2", "out_degree_t1",
                                                "out_degree_t2"});
    REQUIRE(w.data.size() == 2);
    REQUIRE(w.data[0].size() == 4);
    // out_degree: b won round 1, a won round 2
    CHECK(w.data[0][2] == 0.0);
    CHECK(w.data[0][3] == 1.0);
    CHECK(w.data[1][2] == 1.0);
    CHECK(w.data[1][3] == 0.0);
}

TEST_CASE("actor inactive in a round pivots to a zero cell") {
    const auto net = build_network({{"S1", 1, "a", "b"}, {"S1", 2, "b", "c"}});
    const auto lf = run_nrm(net, {Measure::con1}, ScopeMode::per_round, 1);
    const auto w = to_wide(lf);
    const auto a_ix = static_cast<std::size_t>(
        std::find(w.actors.begin(), w.actors.end(), "a") - w.actors.begin());
    CHECK(w.data[a_ix][1] == 0.0); // con1_t2 for `a`, inactive in round 2
}

TEST_CASE("wide pivot preserves every nonzero long cell") {
    const auto net = build_network({{"S1", 1, "a", "b"},
                                    {"S1", 1, "c", "b"},
                                    {"S1", 2, "a", "c"},
                                    {"S2", 1, "d", "e"}});
    const auto lf = run_nrm(net, all_measures(), ScopeMode::per_round, 1);
    const auto w = to_wide(lf);
    const std::size_t k = static_cast<std::size_t>(w.max_round);
    for (const auto& row : lf.rows) {
        const auto& actor = lf.actors[row.actor];
        const auto a_ix = static_cast<std::size_t>(
            std::find(w.actors.begin(), w.actors.end(), actor) - w.actors.begin());
        for (std::size_t mi = 0; mi < lf.measures.size(); ++mi) {
            if (row.values[mi] == 0.0) continue;
            CHECK(w.data[a_ix][mi * k + static_cast<std::size_t>(row.round - 1)] ==
                  row.values[mi]);
        }
    }
}

TEST_CASE("unity normalization") {
    CHECK(unity_normalize({2, 4, 6}) == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(unity_normalize({5, 5, 5}) == std::vector<double>{0.0, 0.0, 0.0});
    CHECK_THROWS_AS(unity_normalize({}), StageError);

    const std::vector<double> v{3.5, -1.0, 9.25, 0.0, 7.5};
    const auto n = unity_normalize(v);
    CHECK(*std::min_element(n.begin(), n.end()) == 0.0);
    CHECK(*std::max_element(n.begin(), n.end()) == 1.0);
    // order preserved
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            if (v[i] < v[j]) CHECK(n[i] < n[j]);
}

TEST_CASE("moving average") {
    CHECK(moving_average({4, 8, 15}, 1) == std::vector<double>{4, 8, 15});
    CHECK(moving_average({1, 2, 3}, 2) == std::vector<double>{1.0, 1.5, 2.5});
    CHECK(moving_average({2, 2, 2, 2}, 50) == std::vector<double>{2, 2, 2, 2});
    CHECK_THROWS_AS(moving_average({1.0}, 0), StageError);

    const std::vector<double> v{9, -3, 4, 4, 0, 12, -7};
    const auto m = moving_average(v, 3);
    CHECK(m.size() == v.size());
    const double lo = *std::min_element(v.begin(), v.end());
    const double hi = *std::max_element(v.begin(), v.end());
    for (double x : m) {
        CHECK(x >= lo);
        CHECK(x <= hi);
    }
}

TEST_CASE("many small competitions stay fast end to end") {
    // ~780 actors across 46 disjoint competitions of 12 rounds each; the
    // full-actor-set adjacency per scope must not blow the pass up.
    Rng rng(99);
    std::vector<MatchEvent> ev;
    for (int comp = 0; comp < 46; ++comp) {
        const std::string c = "S" + std::to_string(comp);
        const int base = comp * 17;
        for (int t = 1; t <= 12; ++t)
            for (int g = 0; g < 7; ++g) {
                const int i = base + static_cast<int>(rng.bounded(17));
                int j = base + static_cast<int>(rng.bounded(17));
                if (i == j) continue;
                ev.push_back({c, t, "p" + std::to_string(i), "p" + std::to_string(j)});
            }
    }
    const auto net = build_network(ev);
    CHECK(net.competitions().size() == 46);
    const auto lf = run_nrm(net, all_measures(), ScopeMode::per_round, 0);
    CHECK(lf.rows.size() > 4000);
    CHECK(lf.runtime_seconds < 30.0);
}

TEST_CASE("long output ordering is deterministic: competition, round, actor") {
    const auto net = build_network({{"S2", 1, "x", "y"},
                                    {"S1", 2, "a", "b"},
                                    {"S1", 1, "b", "a"}});
    const auto lf = run_nrm(net, {Measure::con1}, ScopeMode::per_round, 2);
    REQUIRE(lf.rows.size() == 6);
    for (std::size_t i = 1; i < lf.rows.size(); ++i) {
        const auto& p = lf.rows[i - 1];
        const auto& q = lf.rows[i];
        const auto key = [&](const LongFeatures::Row& r) {
            return std::tuple<std::uint32_t, int, std::uint32_t>(r.competition, r.round,
                                                                 r.actor);
        };
        CHECK(key(p) < key(q));
    }
}
