#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "compnet/centrality.hpp"
#include "compnet/graph.hpp"
#include "compnet/rng.hpp"
#include "oracles.hpp"

using namespace compnet;

namespace {

// Pairwise competition scenarios as raw adjacency matrices: both u and v
// defeat w directly; only v reaches w through an intermediary; both u and v
// reach w through intermediaries. Indices by appearance order.
WeightedAdjacency direct_pair_matrix() { // u->w, v->w : u=0 v=1 w=2
    WeightedAdjacency a(3);
    a.at(0, 2) = 1;
    a.at(1, 2) = 1;
    return a;
}

WeightedAdjacency mixed_pair_matrix() { // u->w, v->z, z->w : u=0 v=1 z=2 w=3
    WeightedAdjacency a(4);
    a.at(0, 3) = 1;
    a.at(1, 2) = 1;
    a.at(2, 3) = 1;
    return a;
}

WeightedAdjacency indirect_pair_matrix() { // u->x, x->w, v->z, z->w : u=0 v=1 x=2 z=3 w=4
    WeightedAdjacency a(5);
    a.at(0, 2) = 1;
    a.at(2, 4) = 1;
    a.at(1, 3) = 1;
    a.at(3, 4) = 1;
    return a;
}

SimpleDigraph path_abc() { // a->b->c
    SimpleDigraph g;
    g.n = 3;
    g.out = {{1}, {2}, {}};
    return g;
}

} // namespace

TEST_CASE("con_pair on the direct/indirect competition scenarios") {
    const auto a = direct_pair_matrix();
    CHECK(con_pair(a, 0, 1) == 1);
    CHECK(con_pair(a, 1, 0) == 1);

    const auto b = mixed_pair_matrix();
    CHECK(con_pair(b, 0, 1) == 0);
    CHECK(con_pair(second_order_adjacency(b), 0, 1) == 1);

    const auto c = indirect_pair_matrix();
    CHECK(con_pair(c, 0, 1) == 0);
    CHECK(con_pair(second_order_adjacency(c), 0, 1) == 1);
}

TEST_CASE("con_pair rejects u == v") {
    CHECK_THROWS_AS(con_pair(direct_pair_matrix(), 1, 1), std::invalid_argument);
}

TEST_CASE("con scores on the shared-loser triangle: u=1, v=1, w=0") {
    const auto con = con_scores(direct_pair_matrix(), 1);
    CHECK(con == std::vector<std::int64_t>{1, 1, 0});
}

TEST_CASE("con scores with an indirect path: CON1(u)=1, CON2(u)=2") {
    const auto b = mixed_pair_matrix();
    CHECK(con_scores(b, 1)[0] == 1); // pairs with z through w
    CHECK(con_scores(b, 2)[0] == 2); // pairs with v and z
}

TEST_CASE("all-zero adjacency gives a zero vector") {
    const WeightedAdjacency zero(6);
    const auto con = con_scores(zero, 1);
    CHECK(std::all_of(con.begin(), con.end(), [](auto v) { return v == 0; }));
    const auto con2 = con_scores(zero, 2);
    CHECK(std::all_of(con2.begin(), con2.end(), [](auto v) { return v == 0; }));
}

TEST_CASE("con matches the brute-force triple loop, orders 1 and 2") {
    Rng rng(101);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng.bounded(49);
        const double p = rng.uniform() * 0.3;
        const auto a = oracle::random_adjacency(rng, n, p, 3);
        CHECK(con_scores(a, 1) == oracle::brute_con(a, 1));
        CHECK(con_scores(a, 2) == oracle::brute_con(a, 2));
    }
}

TEST_CASE("con symmetry and the pair-sum identity") {
    Rng rng(103);
    const auto a = oracle::random_adjacency(rng, 12, 0.3, 3);
    std::int64_t pair_total = 0;
    for (std::size_t u = 0; u < a.size(); ++u)
        for (std::size_t v = u + 1; v < a.size(); ++v) {
            CHECK(con_pair(a, u, v) == con_pair(a, v, u));
            pair_total += con_pair(a, u, v);
        }
    const auto con = con_scores(a, 1);
    std::int64_t vec_total = 0;
    for (auto v : con) vec_total += v;
    CHECK(vec_total == 2 * pair_total);
}

TEST_CASE("adding a victory never decreases CON1") {
    Rng rng(107);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = oracle::random_adjacency(rng, 10, 0.2, 2);
        const auto before = con_scores(a, 1);
        const std::size_t i = rng.bounded(10);
        std::size_t j = rng.bounded(9);
        if (j >= i) ++j;
        a.at(i, j) += 1;
        const auto after = con_scores(a, 1);
        for (std::size_t v = 0; v < before.size(); ++v) CHECK(after[v] >= before[v]);
    }
}

TEST_CASE("CON2 dominates CON1") {
    Rng rng(109);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = oracle::random_adjacency(rng, 2 + rng.bounded(15), 0.3, 3);
        const auto c1 = con_scores(a, 1);
        const auto c2 = con_scores(a, 2);
        for (std::size_t v = 0; v < c1.size(); ++v) CHECK(c2[v] >= c1[v]);
    }
}

TEST_CASE("closeness on a path and an isolated node") {
    const auto c = closeness(path_abc());
    CHECK(c[0] == doctest::Approx(1.0 / 3.0));
    CHECK(c[1] == doctest::Approx(1.0));
    CHECK(c[2] == 0.0); // reaches nothing

    SimpleDigraph lonely;
    lonely.n = 1;
    lonely.out.resize(1);
    CHECK(closeness(lonely)[0] == 0.0);
}

TEST_CASE("closeness equals the distance-sum oracle") {
    Rng rng(113);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = oracle::random_adjacency(rng, 2 + rng.bounded(10), 0.3, 1);
        const auto g = oracle::to_simple(a);
        const auto fast = closeness(g);
        const auto brute = oracle::closeness_by_distance_sums(g);
        for (std::size_t v = 0; v < g.n; ++v)
            CHECK(fast[v] == doctest::Approx(brute[v]).epsilon(1e-12));
    }
}

TEST_CASE("betweenness on a path: only the middle node scores") {
    const auto b = betweenness(path_abc());
    CHECK(b[0] == doctest::Approx(0.0));
    CHECK(b[1] == doctest::Approx(1.0));
    CHECK(b[2] == doctest::Approx(0.0));
}

TEST_CASE("betweenness on a complete symmetric digraph is zero") {
    SimpleDigraph g;
    g.n = 4;
    g.out.resize(4);
    for (std::uint32_t i = 0; i < 4; ++i)
        for (std::uint32_t j = 0; j < 4; ++j)
            if (i != j) g.out[i].push_back(j);
    for (double v : betweenness(g)) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("betweenness equals exhaustive path enumeration") {
    Rng rng(127);
    for (int trial = 0; trial < 60; ++trial) {
        const auto a = oracle::random_adjacency(rng, 2 + rng.bounded(7), 0.35, 1);
        const auto g = oracle::to_simple(a);
        const auto fast = betweenness(g);
        const auto brute = oracle::brute_betweenness(g);
        for (std::size_t v = 0; v < g.n; ++v)
            CHECK(std::abs(fast[v] - brute[v]) < 1e-12);
    }
}

TEST_CASE("pagerank on the edgeless graph is uniform") {
    SimpleDigraph g;
    g.n = 5;
    g.out.resize(5);
    const auto pr = reverse_pagerank(g);
    CHECK(pr.converged);
    for (double v : pr.values) CHECK(v == doctest::Approx(0.2));
}

TEST_CASE("a single victory ranks the winner above the loser") {
    SimpleDigraph g;
    g.n = 2;
    g.out = {{1}, {}}; // a beat b
    const auto pr = reverse_pagerank(g);
    CHECK(pr.values[0] > pr.values[1]);
}

TEST_CASE("reverse pagerank matches the dense linear solve") {
    Rng rng(131);
    for (int trial = 0; trial < 40; ++trial) {
        const auto a = oracle::random_adjacency(rng, 2 + rng.bounded(9), 0.3, 1);
        const auto g = oracle::to_simple(a).reversed();
        const auto pr = pagerank(g, 0.85, 1e-13, 500);
        const auto exact = oracle::pagerank_linear_solve(g, 0.85);
        for (std::size_t v = 0; v < g.n; ++v)
            CHECK(std::abs(pr.values[v] - exact[v]) < 1e-8);
    }
}

TEST_CASE("pagerank sums to one and respects the teleport floor") {
    Rng rng(137);
    const auto a = oracle::random_adjacency(rng, 20, 0.15, 1);
    const auto pr = reverse_pagerank(oracle::to_simple(a));
    double sum = 0.0;
    for (double v : pr.values) {
        sum += v;
        CHECK(v >= (1.0 - 0.85) / 20.0 - 1e-12);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
}

TEST_CASE("pagerank damping must lie in (0,1)") {
    SimpleDigraph g;
    g.n = 2;
    g.out.resize(2);
    CHECK_THROWS_AS(pagerank(g, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(pagerank(g, 0.0), std::invalid_argument);
}

TEST_CASE("degrees on the shared-loser triangle and multiplicity") {
    const auto d = degrees(direct_pair_matrix());
    CHECK(d.out[0] == 1); // u
    CHECK(d.in[2] == 2);  // w

    WeightedAdjacency twice(2);
    twice.at(0, 1) = 2;
    CHECK(degrees(twice).out[0] == 2);
}

TEST_CASE("relabeling actors permutes every measure identically") {
    Rng rng(139);
    const std::size_t n = 9;
    const auto a = oracle::random_adjacency(rng, n, 0.3, 2);

    // permutation p: new index of old i
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.bounded(i)]);

    WeightedAdjacency pa(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) pa.at(p[i], p[j]) = a.at(i, j);

    const auto con = con_scores(a, 2);
    const auto pcon = con_scores(pa, 2);
    const auto g = oracle::to_simple(a);
    const auto pg = oracle::to_simple(pa);
    const auto bt = betweenness(g), pbt = betweenness(pg);
    const auto cl = closeness(g), pcl = closeness(pg);
    const auto pr = reverse_pagerank(g).values, ppr = reverse_pagerank(pg).values;
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(pcon[p[i]] == con[i]);
        CHECK(pbt[p[i]] == doctest::Approx(bt[i]));
        CHECK(pcl[p[i]] == doctest::Approx(cl[i]));
        CHECK(ppr[p[i]] == doctest::Approx(pr[i]).epsilon(1e-9));
    }
}

TEST_CASE("distance measures ignore multiplicity doubling") {
    std::vector<MatchEvent> ev = {{"S1", 1, "a", "b"}, {"S1", 1, "b", "c"},
                                  {"S1", 1, "a", "c"}};
    std::vector<MatchEvent> doubled = ev;
    doubled.insert(doubled.end(), ev.begin(), ev.end());

    const auto g1 = build_network(ev).simple_digraph(Scope::global());
    const auto g2 = build_network(doubled).simple_digraph(Scope::global());
    CHECK(betweenness(g1) == betweenness(g2));
    CHECK(closeness(g1) == closeness(g2));
}
