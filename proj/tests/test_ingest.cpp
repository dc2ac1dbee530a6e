#include <doctest.h>

#include <sstream>

#include "compnet/ingest.hpp"

using namespace compnet;

namespace {

MatchLog parse(const std::string& text, Format f) {
    std::istringstream in(text);
    return parse_match_log(in, f);
}

TruthParseResult parse_truth(const std::string& text, Format f) {
    std::istringstream in(text);
    return parse_ground_truth(in, f);
}

} // namespace

TEST_CASE("generic row maps fields directly") {
    auto log = parse("competition,round,winner,loser\nS1,3,alice,bob\n", Format::generic);
    REQUIRE(log.events.size() == 1);
    CHECK(log.events[0] == MatchEvent{"S1", 3, "alice", "bob"});
    CHECK(log.rejected.empty());
}

TEST_CASE("events come back sorted by competition then round, stable within") {
    auto log = parse(
        "competition,round,winner,loser\n"
        "S2,1,e,f\n"
        "S1,2,c,d\n"
        "S1,1,a,b\n"
        "S1,1,x,y\n",
        Format::generic);
    REQUIRE(log.events.size() == 4);
    CHECK(log.events[0] == MatchEvent{"S1", 1, "a", "b"});
    CHECK(log.events[1] == MatchEvent{"S1", 1, "x", "y"});
    CHECK(log.events[2] == MatchEvent{"S1", 2, "c", "d"});
    CHECK(log.events[3] == MatchEvent{"S2", 1, "e", "f"});
}

TEST_CASE("bad rows are rejected with their line numbers") {
    auto log = parse(
        "competition,round,winner,loser\n"
        "S1,1,a,b\n"
        "S1,zero,a,b\n"
        "S1,0,a,b\n"
        "S1,2,a,a\n"
        "S1,3,,b\n",
        Format::generic);
    CHECK(log.events.size() == 1);
    REQUIRE(log.rejected.size() == 4);
    CHECK(log.rejected[0].line == 3);
    CHECK(log.rejected[1].line == 4);
    CHECK(log.rejected[1].message.find("positive") != std::string::npos);
    CHECK(log.rejected[2].line == 5);
    CHECK(log.rejected[2].message.find("winner equals loser") != std::string::npos);
    CHECK(log.rejected[3].line == 6);
}

TEST_CASE("event count equals source rows minus rejected rows") {
    const std::string text =
        "competition,round,winner,loser\n"
        "S1,1,a,b\nS1,1,b,c\nS1,1,c,c\nS1,2,a,c\n";
    auto log = parse(text, Format::generic);
    CHECK(log.events.size() + log.rejected.size() == 4);
}

TEST_CASE("missing required column raises ParseError") {
    CHECK_THROWS_AS(parse("competition,round,winner\nS1,1,a\n", Format::generic),
                    ParseError);
    CHECK_THROWS_AS(parse("", Format::generic), ParseError);
}

TEST_CASE("unknown format tag raises ParseError") {
    CHECK_THROWS_AS(parse_format("xml"), ParseError);
    CHECK(parse_format("dota") == Format::dota);
}

TEST_CASE("numeric ids lose a trailing .0") {
    CHECK(normalize_actor_id("8629005.0") == "8629005");
    CHECK(normalize_actor_id("8629005") == "8629005");
    CHECK(normalize_actor_id("team.0x") == "team.0x");
    CHECK(normalize_actor_id("a1.0") == "a1.0"); // not purely numeric
    auto log = parse("competition,round,winner,loser\nD,1,8629005.0,123.0\n",
                     Format::generic);
    CHECK(log.events[0].winner == "8629005");
    CHECK(log.events[0].loser == "123");
}

TEST_CASE("parsing is deterministic") {
    const std::string text =
        "competition,round,winner,loser\nS1,1,a,b\nS1,2,b,c\nS2,1,c,a\n";
    auto a = parse(text, Format::generic);
    auto b = parse(text, Format::generic);
    CHECK(a.events == b.events);
}

TEST_CASE("generic round trip reproduces the event list") {
    auto log = parse(
        "competition,round,winner,loser\n"
        "S1,1,a,b\nS1,1,\"x,1\",y\nS2,4,p,q\n",
        Format::generic);
    std::ostringstream out;
    write_events_csv(out, log.events);
    auto again = parse(out.str(), Format::generic);
    CHECK(again.events == log.events);
}

TEST_CASE("chess adapter: decisive games only, draws emit nothing") {
    auto log = parse(
        "round,white,black,result\n"
        "1,anna,boris,1-0\n"
        "1,carla,dan,0-1\n"
        "2,anna,dan,1/2-1/2\n",
        Format::chess);
    REQUIRE(log.events.size() == 2);
    CHECK(log.events[0] == MatchEvent{"chess", 1, "anna", "boris"});
    CHECK(log.events[1] == MatchEvent{"chess", 1, "dan", "carla"});
    CHECK(log.rejected.empty());

    auto bad = parse("round,white,black,result\n1,a,b,2-0\n", Format::chess);
    CHECK(bad.events.empty());
    REQUIRE(bad.rejected.size() == 1);
    CHECK(bad.rejected[0].message.find("result") != std::string::npos);
}

TEST_CASE("survivor adapter: voter -> target, season-qualified ids") {
    auto log = parse(
        "version_season,episode,castaway,vote\n"
        "US01,1,richard,sonja\n"
        "US01,1,kelly,\n"
        "US01,2,sue,richard\n"
        "US02,1,richard,tina\n",
        Format::survivor);
    REQUIRE(log.events.size() == 3);
    CHECK(log.events[0] == MatchEvent{"US01", 1, "US01:richard", "US01:sonja"});
    CHECK(log.events[1] == MatchEvent{"US01", 2, "US01:sue", "US01:richard"});
    CHECK(log.events[2] == MatchEvent{"US02", 1, "US02:richard", "US02:tina"});
    // kelly cast no vote, so she is in neither count: 4 distinct people
    // appear in vote events, 5 season-qualified nodes
    CHECK(log.raw_actor_count == 4);
    CHECK(log.actor_count == 5);
}

TEST_CASE("survivor self-vote is rejected") {
    auto log = parse(
        "version_season,episode,castaway,vote\nUS01,1,rudy,rudy\n", Format::survivor);
    CHECK(log.events.empty());
    REQUIRE(log.rejected.size() == 1);
}

TEST_CASE("dota adapter: winner from radiant_win, week as round") {
    auto log = parse(
        "week,radiant_team_id,dire_team_id,radiant_win\n"
        "39,8629005.0,9426115.0,True\n"
        "39,9425660.0,8629317.0,false\n"
        "40,8629005.0,9425656.0,0\n",
        Format::dota);
    REQUIRE(log.events.size() == 3);
    CHECK(log.events[0] == MatchEvent{"dota", 39, "8629005", "9426115"});
    CHECK(log.events[1] == MatchEvent{"dota", 39, "8629317", "9425660"});
    CHECK(log.events[2] == MatchEvent{"dota", 40, "9425656", "8629005"});
}

TEST_CASE("generic ground truth") {
    auto res = parse_truth("actor,score\nalice,2750.0\nbob,2600\n", Format::generic);
    REQUIRE(res.table.entries.size() == 2);
    CHECK(res.table.entries[0].actor == "alice");
    CHECK(res.table.entries[0].score == doctest::Approx(2750.0));
}

TEST_CASE("duplicate truth actor is fatal") {
    CHECK_THROWS_AS(parse_truth("actor,score\na,1\na,2\n", Format::generic),
                    ParseError);
}

TEST_CASE("unparsable truth score is fatal with a line number") {
    try {
        parse_truth("actor,score\na,1\nb,high\n", Format::generic);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("survivor outcomes map to season-sized ordinal scores") {
    // 16-player season: sole survivor -> 16, runner-up -> 15, k-th voted out -> k.
    std::string text = "version_season,castaway,result\n";
    text += "US01,winner_w,Sole Survivor\n";
    text += "US01,runner_r,Runner-up\n";
    for (int k = 1; k <= 14; ++k)
        text += "US01,cast" + std::to_string(k) + "," + std::to_string(k) +
                (k == 1 ? "st" : k == 2 ? "nd" : k == 3 ? "rd" : "th") + " voted out\n";
    auto res = parse_truth(text, Format::survivor);
    REQUIRE(res.table.entries.size() == 16);
    auto score_of = [&](const std::string& actor) {
        for (const auto& e : res.table.entries)
            if (e.actor == actor) return e.score;
        FAIL("missing actor");
        return 0.0;
    };
    CHECK(score_of("US01:winner_w") == doctest::Approx(16));
    CHECK(score_of("US01:runner_r") == doctest::Approx(15));
    CHECK(score_of("US01:cast1") == doctest::Approx(1));
    CHECK(score_of("US01:cast14") == doctest::Approx(14));
}

TEST_CASE("survivor place column outranks later eliminations") {
    auto res = parse_truth(
        "version_season,castaway_id,place\nUS01,c1,1\nUS01,c2,2\nUS01,c3,3\n",
        Format::survivor);
    REQUIRE(res.table.entries.size() == 3);
    CHECK(res.table.entries[0].score > res.table.entries[1].score);
    CHECK(res.table.entries[1].score > res.table.entries[2].score);
}

TEST_CASE("truth round trip through the generic writer") {
    auto res = parse_truth("actor,score\na,1.5\nb,-2.25\n", Format::generic);
    std::ostringstream out;
    write_truth_csv(out, res.table);
    auto again = parse_truth(out.str(), Format::generic);
    REQUIRE(again.table.entries.size() == 2);
    CHECK(again.table.entries[0].score == res.table.entries[0].score);
    CHECK(again.table.entries[1].score == res.table.entries[1].score);
}

TEST_CASE("CRLF line endings parse the same as LF") {
    auto unix_log = parse("competition,round,winner,loser\nS1,1,a,b\n", Format::generic);
    auto dos_log =
        parse("competition,round,winner,loser\r\nS1,1,a,b\r\n", Format::generic);
    CHECK(unix_log.events == dos_log.events);
}

TEST_CASE("quoted CSV fields with commas and escaped quotes") {
    auto log = parse(
        "competition,round,winner,loser\n"
        "\"S,1\",1,\"an \"\"ace\"\"\",b\n",
        Format::generic);
    REQUIRE(log.events.size() == 1);
    CHECK(log.events[0].competition == "S,1");
    CHECK(log.events[0].winner == "an \"ace\"");
}
