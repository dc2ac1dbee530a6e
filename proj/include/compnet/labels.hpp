#pragma once

// Three-way quantile labels over ground-truth scores. The cut is count-based
// rather than threshold-based: Top takes the ceil(n * (1 - upper_q))
// best-ranked actors and Bottom the ceil(n * lower_q) worst. Tie groups
// straddling a cut are broken by stable input order and the number of such
// splits is reported.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "compnet/types.hpp"

namespace compnet {

struct LabelTable {
    struct Entry {
        std::string actor;
        ClassLabel label = ClassLabel::Middle;
        double score = 0.0;
        std::size_t rank = 0; // 1 = best, ordinal after tie resolution
    };
    std::vector<Entry> entries; // input order preserved
    std::size_t top_count = 0, middle_count = 0, bottom_count = 0;
    double lower_q = 0.10, upper_q = 0.90;
    std::size_t ties_split = 0; // actors whose tie group straddled a cut

    std::string counts_string() const {
        return std::to_string(top_count) + "/" + std::to_string(middle_count) + "/" +
               std::to_string(bottom_count);
    }

    const Entry* find(const std::string& actor) const {
        for (const auto& e : entries)
            if (e.actor == actor) return &e;
        return nullptr;
    }
};

namespace detail {

// ceil with a guard against products like 10 * 0.1 landing just above an
// integer in floating point.
inline std::size_t quantile_count(std::size_t n, double q) {
    return static_cast<std::size_t>(
        std::ceil(static_cast<double>(n) * q - 1e-9));
}

} // namespace detail

inline LabelTable assign_classes(const GroundTruthTable& truth, double lower_q = 0.10,
                                 double upper_q = 0.90) {
    const std::size_t n = truth.entries.size();
    if (n < 3) throw StageError("label assignment needs at least 3 actors");
    if (!(lower_q > 0.0 && lower_q < upper_q && upper_q < 1.0))
        throw StageError("quantiles must satisfy 0 < lower < upper < 1");

    LabelTable table;
    table.lower_q = lower_q;
    table.upper_q = upper_q;
    table.entries.resize(n);

    // Order by score descending; equal scores keep input order, which is how
    // ties straddling a cut are resolved.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return truth.entries[a].score > truth.entries[b].score;
    });

    const std::size_t top_n = detail::quantile_count(n, 1.0 - upper_q);
    const std::size_t bottom_n = detail::quantile_count(n, lower_q);
    if (top_n + bottom_n > n)
        throw StageError("quantiles leave no room for a middle class");

    for (std::size_t pos = 0; pos < n; ++pos) {
        auto& e = table.entries[order[pos]];
        e.actor = truth.entries[order[pos]].actor;
        e.score = truth.entries[order[pos]].score;
        e.rank = pos + 1;
        if (pos < top_n) e.label = ClassLabel::Top;
        else if (pos >= n - bottom_n) e.label = ClassLabel::Bottom;
        else e.label = ClassLabel::Middle;
    }
    table.top_count = top_n;
    table.bottom_count = bottom_n;
    table.middle_count = n - top_n - bottom_n;

    // Count actors cut away from same-score neighbors at either boundary.
    auto count_straddle = [&](std::size_t cut) {
        // cut = first position of the lower class; 0 or n means no boundary
        if (cut == 0 || cut >= n) return std::size_t{0};
        const double s = truth.entries[order[cut]].score;
        if (truth.entries[order[cut - 1]].score != s) return std::size_t{0};
        std::size_t inside = 0, outside = 0;
        for (std::size_t p = cut; p > 0 && truth.entries[order[p - 1]].score == s; --p)
            ++inside;
        for (std::size_t p = cut; p < n && truth.entries[order[p]].score == s; ++p)
            ++outside;
        return std::min(inside, outside);
    };
    table.ties_split = count_straddle(top_n) + count_straddle(n - bottom_n);
    return table;
}

} // namespace compnet
