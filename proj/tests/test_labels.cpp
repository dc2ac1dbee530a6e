#include <doctest.h>

#include <set>

#include "compnet/labels.hpp"

using namespace compnet;

namespace {

GroundTruthTable scores_1_to(std::size_t n) {
    GroundTruthTable t;
    for (std::size_t i = 1; i <= n; ++i)
        t.entries.push_back({"a" + std::to_string(i), static_cast<double>(i)});
    return t;
}

} // namespace

TEST_CASE("n=10 with defaults: top {10}, bottom {1}, middle 8") {
    const auto table = assign_classes(scores_1_to(10));
    CHECK(table.top_count == 1);
    CHECK(table.middle_count == 8);
    CHECK(table.bottom_count == 1);
    CHECK(table.find("a10")->label == ClassLabel::Top);
    CHECK(table.find("a1")->label == ClassLabel::Bottom);
    CHECK(table.find("a5")->label == ClassLabel::Middle);
    CHECK(table.find("a10")->rank == 1);
}

TEST_CASE("n=493 with defaults splits 50/393/50") {
    const auto table = assign_classes(scores_1_to(493));
    CHECK(table.top_count == 50);
    CHECK(table.middle_count == 393);
    CHECK(table.bottom_count == 50);
}

TEST_CASE("n=759 at (0.20, 0.80) splits 152/455/152") {
    const auto table = assign_classes(scores_1_to(759), 0.20, 0.80);
    CHECK(table.top_count == 152);
    CHECK(table.middle_count == 455);
    CHECK(table.bottom_count == 152);
}

TEST_CASE("classes partition the labeled set") {
    for (std::size_t n : {3, 11, 100, 863}) {
        const auto table = assign_classes(scores_1_to(n));
        CHECK(table.top_count + table.middle_count + table.bottom_count == n);
        std::size_t top = 0, mid = 0, bot = 0;
        for (const auto& e : table.entries) {
            if (e.label == ClassLabel::Top) ++top;
            else if (e.label == ClassLabel::Middle) ++mid;
            else ++bot;
        }
        CHECK(top == table.top_count);
        CHECK(mid == table.middle_count);
        CHECK(bot == table.bottom_count);
    }
}

TEST_CASE("no bottom actor outscores a top actor") {
    GroundTruthTable t;
    // interleaved insertion order, descending/ascending mix
    for (int i = 0; i < 40; ++i)
        t.entries.push_back({"x" + std::to_string(i),
                             static_cast<double>((i * 7919) % 101)});
    const auto table = assign_classes(t, 0.2, 0.8);
    double min_top = 1e18, max_bottom = -1e18;
    for (const auto& e : table.entries) {
        if (e.label == ClassLabel::Top) min_top = std::min(min_top, e.score);
        if (e.label == ClassLabel::Bottom) max_bottom = std::max(max_bottom, e.score);
    }
    CHECK(max_bottom <= min_top);
}

TEST_CASE("strictly increasing score transforms leave labels unchanged") {
    GroundTruthTable t = scores_1_to(50);
    const auto before = assign_classes(t, 0.1, 0.9);
    for (auto& e : t.entries) e.score = std::exp(e.score / 10.0) * 3.0 + 7.0;
    const auto after = assign_classes(t, 0.1, 0.9);
    for (const auto& e : before.entries)
        CHECK(after.find(e.actor)->label == e.label);
}

TEST_CASE("fewer than 3 actors is an error") {
    CHECK_THROWS_AS(assign_classes(scores_1_to(2)), StageError);
}

TEST_CASE("invalid quantiles are an error") {
    CHECK_THROWS_AS(assign_classes(scores_1_to(10), 0.9, 0.1), StageError);
    CHECK_THROWS_AS(assign_classes(scores_1_to(10), 0.0, 0.9), StageError);
}

TEST_CASE("tie group straddling a cut is split by stable input order") {
    GroundTruthTable t;
    // scores: 9, 5, 5, 5, 1 with (0.25, 0.75): top 2, bottom 2
    t.entries = {{"p", 9}, {"q", 5}, {"r", 5}, {"s", 5}, {"t", 1}};
    const auto table = assign_classes(t, 0.25, 0.75);
    CHECK(table.top_count == 2);
    CHECK(table.bottom_count == 2);
    CHECK(table.find("p")->label == ClassLabel::Top);
    CHECK(table.find("q")->label == ClassLabel::Top);    // first of the tie, stable
    CHECK(table.find("r")->label == ClassLabel::Middle);
    CHECK(table.find("s")->label == ClassLabel::Bottom); // last of the tie
    CHECK(table.find("t")->label == ClassLabel::Bottom);
    CHECK(table.ties_split > 0);
}
