#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "compnet/csv.hpp"

namespace compnet {

// Thrown when a pipeline stage fails for reasons other than input parsing.
class StageError : public std::runtime_error {
public:
    explicit StageError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Format { generic, survivor, chess, dota };

inline std::string_view format_name(Format f) {
    switch (f) {
        case Format::generic: return "generic";
        case Format::survivor: return "survivor";
        case Format::chess: return "chess";
        case Format::dota: return "dota";
    }
    return "?";
}

inline Format parse_format(std::string_view s) {
    if (s == "generic") return Format::generic;
    if (s == "survivor") return Format::survivor;
    if (s == "chess") return Format::chess;
    if (s == "dota") return Format::dota;
    throw ParseError("unknown format tag '" + std::string(s) + "'");
}

// One directed victory/vote occurrence. Parallel events are meaningful and
// preserved; they become edge multiplicity.
struct MatchEvent {
    std::string competition;
    int round = 1; // >= 1
    std::string winner;
    std::string loser;

    friend bool operator==(const MatchEvent&, const MatchEvent&) = default;
};

enum class TiePolicy { average_rank, stable_order };

// Higher score = better true rank.
struct GroundTruthEntry {
    std::string actor;
    double score = 0.0;
};

struct GroundTruthTable {
    std::vector<GroundTruthEntry> entries;
    TiePolicy tie_policy = TiePolicy::average_rank;
};

enum class ClassLabel : int { Top = 0, Middle = 1, Bottom = 2 };

inline constexpr std::array<std::string_view, 3> kClassNames = {"Top", "Middle",
                                                                "Bottom"};

inline std::string_view class_name(ClassLabel c) {
    return kClassNames[static_cast<int>(c)];
}

inline ClassLabel parse_class(std::string_view s) {
    for (int i = 0; i < 3; ++i)
        if (kClassNames[i] == s) return static_cast<ClassLabel>(i);
    throw ParseError("unknown class label '" + std::string(s) + "'");
}

enum class Measure : int {
    con1 = 0,
    con2,
    pagerank,
    closeness,
    betweenness,
    in_degree,
    out_degree,
};

inline constexpr std::array<std::string_view, 7> kMeasureNames = {
    "con1",      "con2",      "pagerank",  "closeness",
    "betweenness", "in_degree", "out_degree"};

inline std::string_view measure_name(Measure m) {
    return kMeasureNames[static_cast<int>(m)];
}

inline Measure parse_measure(std::string_view s) {
    for (std::size_t i = 0; i < kMeasureNames.size(); ++i)
        if (kMeasureNames[i] == s) return static_cast<Measure>(i);
    throw StageError("unknown measure name '" + std::string(s) + "'");
}

inline std::vector<Measure> all_measures() {
    std::vector<Measure> out;
    for (std::size_t i = 0; i < kMeasureNames.size(); ++i)
        out.push_back(static_cast<Measure>(i));
    return out;
}

} // namespace compnet
