#pragma once

// Dataset ingestion: generic match logs plus Survivor / Chess.com / Dota 2
// adapters. All adapters emit the same canonical event stream and tolerate
// extra columns. Expected column names are documented per adapter below and
// in the README.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "compnet/csv.hpp"
#include "compnet/types.hpp"

namespace compnet {

// Row-level problem: the row was dropped, parsing continued.
struct RowIssue {
    std::size_t line = 0;
    std::string message;
};

struct MatchLog {
    std::vector<MatchEvent> events;
    std::vector<RowIssue> rejected;
    // Survivor castaway counts differ before and after season qualification;
    // both are reported rather than forcing either number.
    std::size_t raw_actor_count = 0;
    std::size_t actor_count = 0;
};

// Table 1 prints ids like "8629005.0"; numeric ids lose a trailing ".0".
inline std::string normalize_actor_id(std::string id) {
    if (id.size() > 2 && id.ends_with(".0")) {
        bool digits = true;
        for (std::size_t i = 0; i + 2 < id.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(id[i]))) {
                digits = false;
                break;
            }
        if (digits) id.erase(id.size() - 2);
    }
    return id;
}

namespace detail {

inline void count_actors(MatchLog& log) {
    std::set<std::string> ids;
    for (const auto& e : log.events) {
        ids.insert(e.winner);
        ids.insert(e.loser);
    }
    log.actor_count = ids.size();
    if (log.raw_actor_count == 0) log.raw_actor_count = log.actor_count;
}

// Shared row validation; returns false (and records the issue) on a bad row.
inline bool push_event(MatchLog& log, std::size_t line, std::string competition,
                       long long round, std::string winner, std::string loser) {
    winner = normalize_actor_id(std::move(winner));
    loser = normalize_actor_id(std::move(loser));
    if (winner.empty() || loser.empty()) {
        log.rejected.push_back({line, "empty actor id"});
        return false;
    }
    if (winner == loser) {
        log.rejected.push_back({line, "winner equals loser ('" + winner + "')"});
        return false;
    }
    if (round < 1) {
        log.rejected.push_back(
            {line, "round must be a positive integer, got " + std::to_string(round)});
        return false;
    }
    log.events.push_back(MatchEvent{std::move(competition), static_cast<int>(round),
                                    std::move(winner), std::move(loser)});
    return true;
}

// Generic match log: header `competition,round,winner,loser`, one victory per row.
inline MatchLog parse_generic_log(const csv::Table& t) {
    MatchLog log;
    auto c_comp = t.require_column({"competition"});
    auto c_round = t.require_column({"round"});
    auto c_win = t.require_column({"winner"});
    auto c_lose = t.require_column({"loser"});
    for (std::size_t r = 0; r < t.size(); ++r) {
        auto round = try_parse_int(t.cell(r, c_round));
        if (!round) {
            log.rejected.push_back(
                {t.line_of(r), "round is not an integer: '" + t.cell(r, c_round) + "'"});
            continue;
        }
        push_event(log, t.line_of(r), t.cell(r, c_comp), *round, t.cell(r, c_win),
                   t.cell(r, c_lose));
    }
    return log;
}

// Survivor vote_history export. One event per tribal-council vote, directed
// voter -> target. Columns: `version_season` (competition), `episode` (round),
// `castaway` (voter), `vote` (target). Rows with an empty vote target
// (immunity, no vote recorded) produce nothing. Name columns are preferred
// over `castaway_id`/`vote_id` so that voter, target, and the ground-truth
// table live in one identity space.
// Actor ids are season-qualified (`<season>:<castaway>`) so returning players
// are distinct nodes per season; the unqualified count is reported as raw.
inline MatchLog parse_survivor_log(const csv::Table& t) {
    MatchLog log;
    auto c_season = t.require_column({"version_season", "season_name", "season"});
    auto c_round = t.require_column({"episode", "order", "round"});
    auto c_voter = t.optional_column({"castaway"});
    auto c_voter_id = t.optional_column({"castaway_id"});
    auto c_target = t.optional_column({"vote"});
    auto c_target_id = t.optional_column({"vote_id"});
    if (!c_voter && !c_voter_id)
        throw ParseError("missing required column (expected one of: 'castaway' 'castaway_id')");
    if (!c_target && !c_target_id)
        throw ParseError("missing required column (expected one of: 'vote' 'vote_id')");

    std::set<std::string> raw_ids;
    for (std::size_t r = 0; r < t.size(); ++r) {
        std::string voter = c_voter ? t.cell(r, *c_voter) : "";
        if (voter.empty() && c_voter_id) voter = t.cell(r, *c_voter_id);
        std::string target = c_target ? t.cell(r, *c_target) : "";
        if (target.empty() && c_target_id) target = t.cell(r, *c_target_id);
        if (target.empty()) continue; // not a vote row
        if (voter.empty()) {
            log.rejected.push_back({t.line_of(r), "vote without a voter"});
            continue;
        }
        auto round = try_parse_int(t.cell(r, c_round));
        if (!round) {
            log.rejected.push_back(
                {t.line_of(r), "episode is not an integer: '" + t.cell(r, c_round) + "'"});
            continue;
        }
        std::string season = t.cell(r, c_season);
        raw_ids.insert(voter);
        raw_ids.insert(target);
        push_event(log, t.line_of(r), season, *round, season + ":" + voter,
                   season + ":" + target);
    }
    log.raw_actor_count = raw_ids.size();
    return log;
}

// Chess results export: `round`, `white`, `black`, `result` plus an optional
// `tournament`/`competition` column (defaults to a single competition named
// "chess"). Decisive results ("1-0", "0-1") emit winner -> loser; draws
// ("1/2-1/2", "0.5-0.5") emit nothing.
inline MatchLog parse_chess_log(const csv::Table& t) {
    MatchLog log;
    auto c_round = t.require_column({"round"});
    auto c_white = t.require_column({"white", "white_id", "white_username"});
    auto c_black = t.require_column({"black", "black_id", "black_username"});
    auto c_result = t.require_column({"result", "score"});
    auto c_comp = t.optional_column({"tournament", "competition", "event"});

    for (std::size_t r = 0; r < t.size(); ++r) {
        auto round = try_parse_int(t.cell(r, c_round));
        if (!round) {
            log.rejected.push_back(
                {t.line_of(r), "round is not an integer: '" + t.cell(r, c_round) + "'"});
            continue;
        }
        std::string comp = c_comp ? t.cell(r, *c_comp) : "";
        if (comp.empty()) comp = "chess";
        std::string white = t.cell(r, c_white);
        std::string black = t.cell(r, c_black);
        std::string result = t.cell(r, c_result);
        if (result == "1-0") {
            push_event(log, t.line_of(r), comp, *round, white, black);
        } else if (result == "0-1") {
            push_event(log, t.line_of(r), comp, *round, black, white);
        } else if (result == "1/2-1/2" || result == "0.5-0.5" || result == "draw") {
            // draws produce no edge
        } else {
            log.rejected.push_back({t.line_of(r), "unrecognized result '" + result + "'"});
        }
    }
    return log;
}

// Dota 2 main_metadata export: `radiant_team_id`, `dire_team_id`,
// `radiant_win` (true/false/1/0) and a `week`/`round` column. One event per
// match, winning team -> losing team.
inline MatchLog parse_dota_log(const csv::Table& t) {
    MatchLog log;
    auto c_rad = t.require_column({"radiant_team_id", "radiant_team"});
    auto c_dire = t.require_column({"dire_team_id", "dire_team"});
    auto c_win = t.require_column({"radiant_win", "radiant_won"});
    auto c_round = t.require_column({"week", "round"});
    auto c_comp = t.optional_column({"competition", "league"});

    for (std::size_t r = 0; r < t.size(); ++r) {
        auto round = try_parse_int(t.cell(r, c_round));
        if (!round) {
            log.rejected.push_back(
                {t.line_of(r), "week is not an integer: '" + t.cell(r, c_round) + "'"});
            continue;
        }
        std::string comp = c_comp ? t.cell(r, *c_comp) : "";
        if (comp.empty()) comp = "dota";
        std::string win_cell = t.cell(r, c_win);
        std::transform(win_cell.begin(), win_cell.end(), win_cell.begin(),
                       [](unsigned char ch) { return std::tolower(ch); });
        bool radiant_win;
        if (win_cell == "true" || win_cell == "1")
            radiant_win = true;
        else if (win_cell == "false" || win_cell == "0")
            radiant_win = false;
        else {
            log.rejected.push_back(
                {t.line_of(r), "radiant_win is not a boolean: '" + win_cell + "'"});
            continue;
        }
        std::string rad = t.cell(r, c_rad);
        std::string dire = t.cell(r, c_dire);
        if (radiant_win)
            push_event(log, t.line_of(r), comp, *round, rad, dire);
        else
            push_event(log, t.line_of(r), comp, *round, dire, rad);
    }
    return log;
}

} // namespace detail

// Events come back sorted by (competition, round, input order); identical
// bytes always produce identical event lists.
inline MatchLog parse_match_log(std::istream& in, Format format) {
    csv::Table t(in);
    MatchLog log;
    switch (format) {
        case Format::generic: log = detail::parse_generic_log(t); break;
        case Format::survivor: log = detail::parse_survivor_log(t); break;
        case Format::chess: log = detail::parse_chess_log(t); break;
        case Format::dota: log = detail::parse_dota_log(t); break;
    }
    std::stable_sort(log.events.begin(), log.events.end(),
                     [](const MatchEvent& a, const MatchEvent& b) {
                         if (a.competition != b.competition)
                             return a.competition < b.competition;
                         return a.round < b.round;
                     });
    detail::count_actors(log);
    return log;
}

struct TruthParseResult {
    GroundTruthTable table;
    std::vector<RowIssue> rejected;
};

namespace detail {

inline void add_truth_entry(TruthParseResult& out, std::set<std::string>& seen,
                            std::size_t line, std::string actor, double score) {
    actor = normalize_actor_id(std::move(actor));
    if (actor.empty()) {
        out.rejected.push_back({line, "empty actor id"});
        return;
    }
    if (!seen.insert(actor).second)
        throw ParseError("line " + std::to_string(line) + ": duplicate actor '" +
                         actor + "' in ground truth");
    out.table.entries.push_back({std::move(actor), score});
}

// Generic ground truth: header `actor,score`.
inline TruthParseResult parse_generic_truth(const csv::Table& t) {
    TruthParseResult out;
    auto c_actor = t.require_column({"actor"});
    auto c_score = t.require_column({"score"});
    std::set<std::string> seen;
    for (std::size_t r = 0; r < t.size(); ++r)
        add_truth_entry(out, seen, t.line_of(r), t.cell(r, c_actor),
                        parse_double(t.cell(r, c_score), t.line_of(r)));
    return out;
}

// Survivor castaways export. Columns: `version_season`, `castaway_id`/
// `castaway`, and either `place` (1 = sole survivor) or a textual `result`
// ("Sole Survivor", "Runner-up", "7th voted out", ...). Outcomes map to an
// integer score per season: sole survivor = season size n, runner-up = n-1,
// k-th voted out = k. Later elimination always scores higher.
inline TruthParseResult parse_survivor_truth(const csv::Table& t) {
    TruthParseResult out;
    auto c_season = t.require_column({"version_season", "season_name", "season"});
    auto c_actor = t.optional_column({"castaway", "full_name"});
    auto c_actor_id = t.optional_column({"castaway_id"});
    if (!c_actor && !c_actor_id)
        throw ParseError("missing required column (expected one of: 'castaway' 'castaway_id')");
    auto c_place = t.optional_column({"place"});
    auto c_result = t.optional_column({"result", "outcome"});
    if (!c_place && !c_result)
        throw ParseError("missing required column (expected one of: 'place' 'result')");

    struct Raw {
        std::size_t line;
        std::string season;
        std::string actor;
        std::optional<long long> place;
        std::string result;
    };
    std::vector<Raw> raws;
    std::map<std::string, std::size_t> season_sizes;
    for (std::size_t r = 0; r < t.size(); ++r) {
        Raw raw;
        raw.line = t.line_of(r);
        raw.season = t.cell(r, c_season);
        raw.actor = c_actor ? t.cell(r, *c_actor) : "";
        if (raw.actor.empty() && c_actor_id) raw.actor = t.cell(r, *c_actor_id);
        if (c_place) raw.place = try_parse_int(t.cell(r, *c_place));
        if (c_result) raw.result = t.cell(r, *c_result);
        ++season_sizes[raw.season];
        raws.push_back(std::move(raw));
    }

    std::set<std::string> seen;
    for (const auto& raw : raws) {
        const double n = static_cast<double>(season_sizes[raw.season]);
        double score;
        if (raw.place) {
            score = n - static_cast<double>(*raw.place) + 1.0;
        } else {
            std::string low = raw.result;
            std::transform(low.begin(), low.end(), low.begin(), [](unsigned char ch) {
                return std::tolower(ch);
            });
            if (low.find("sole survivor") != std::string::npos) {
                score = n;
            } else if (low.find("runner-up") != std::string::npos ||
                       low.find("runner up") != std::string::npos) {
                score = n - 1.0;
            } else if (auto k = try_parse_int(low.substr(0, low.find_first_not_of(
                           "0123456789")))) {
                // "7th voted out" -> 7
                score = static_cast<double>(*k);
            } else {
                out.rejected.push_back(
                    {raw.line, "cannot interpret outcome '" + raw.result + "'"});
                continue;
            }
        }
        add_truth_entry(out, seen, raw.line, raw.season + ":" + raw.actor, score);
    }
    return out;
}

// Chess ratings: `player`/`actor`/`username` + `rating`/`glicko`/`score`.
inline TruthParseResult parse_chess_truth(const csv::Table& t) {
    TruthParseResult out;
    auto c_actor = t.require_column({"player", "actor", "username", "name"});
    auto c_score = t.require_column({"rating", "glicko", "score"});
    std::set<std::string> seen;
    for (std::size_t r = 0; r < t.size(); ++r)
        add_truth_entry(out, seen, t.line_of(r), t.cell(r, c_actor),
                        parse_double(t.cell(r, c_score), t.line_of(r)));
    return out;
}

// Dota ratings: `team_id`/`actor` + `rating`/`score`.
inline TruthParseResult parse_dota_truth(const csv::Table& t) {
    TruthParseResult out;
    auto c_actor = t.require_column({"team_id", "actor", "team"});
    auto c_score = t.require_column({"rating", "glicko", "score"});
    std::set<std::string> seen;
    for (std::size_t r = 0; r < t.size(); ++r)
        add_truth_entry(out, seen, t.line_of(r), t.cell(r, c_actor),
                        parse_double(t.cell(r, c_score), t.line_of(r)));
    return out;
}

} // namespace detail

inline TruthParseResult parse_ground_truth(std::istream& in, Format format) {
    csv::Table t(in);
    switch (format) {
        case Format::generic: return detail::parse_generic_truth(t);
        case Format::survivor: return detail::parse_survivor_truth(t);
        case Format::chess: return detail::parse_chess_truth(t);
        case Format::dota: return detail::parse_dota_truth(t);
    }
    throw ParseError("unknown format");
}

// Canonical generic writers; parse(write(events)) == events.
inline void write_events_csv(std::ostream& out, const std::vector<MatchEvent>& events) {
    out << "competition,round,winner,loser\n";
    for (const auto& e : events)
        out << csv::quote_if_needed(e.competition) << ',' << e.round << ','
            << csv::quote_if_needed(e.winner) << ',' << csv::quote_if_needed(e.loser)
            << '\n';
}

inline void write_truth_csv(std::ostream& out, const GroundTruthTable& truth) {
    out << "actor,score\n";
    for (const auto& e : truth.entries)
        out << csv::quote_if_needed(e.actor) << ',' << format_double(e.score) << '\n';
}

} // namespace compnet
