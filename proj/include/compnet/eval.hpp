#pragma once

// Rank-correlation analysis, per-time-step importance aggregation, and the
// plot/embedding exports.
//
// Spearman p-values use the t approximation with the regularized incomplete
// beta evaluated in the log domain: the chess-scale correlations produce
// p-values far below double underflow, so log10(p) is reported alongside p.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "compnet/features.hpp"
#include "compnet/labels.hpp"
#include "compnet/types.hpp"

namespace compnet {

namespace detail {

// Average ranks (1-based); tied values share the mean of their positions.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the regularized incomplete beta (Lentz). The CF
// value itself is O(1); only the prefactor needs log-domain care.
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 3e-16, kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

// log of I_x(a, b), exact to the usual CF accuracy even when I_x underflows.
inline double log_reg_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    if (x >= 1.0) return 0.0;
    const double log_front =
        a * std::log(x) + b * std::log1p(-x) - std::log(a) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) return log_front + std::log(betacf(a, b, x));
    // Mirror branch: I_x(a,b) = 1 - I_{1-x}(b,a); safe because the mirrored
    // value is not tiny here.
    const double log_front_m = b * std::log1p(-x) + a * std::log(x) -
                               std::log(b) - log_beta(b, a);
    const double mirrored = std::exp(log_front_m) * betacf(b, a, 1.0 - x);
    return std::log1p(-mirrored);
}

// Two-sided p of Student's t: p = I_{nu/(nu+t^2)}(nu/2, 1/2), in log.
inline double log_student_t_two_sided(double t, double dof) {
    const double x = dof / (dof + t * t);
    return log_reg_incomplete_beta(dof / 2.0, 0.5, x);
}

} // namespace detail

struct SpearmanResult {
    double rho = 0.0;
    double p_value = 1.0;    // underflows to 0 for extreme correlations
    double log10_p = 0.0;    // always meaningful; -inf when |rho| = 1
    std::size_t n = 0;
};

// Average-rank transform on ties, Pearson correlation of ranks, two-sided p
// from t = rho * sqrt((n-2) / (1-rho^2)) against Student's t with n-2 dof.
inline SpearmanResult spearman(const std::vector<double>& x,
                               const std::vector<double>& y) {
    if (x.size() != y.size()) throw StageError("spearman: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw StageError("spearman needs at least 3 observations");

    const auto rx = detail::average_ranks(x);
    const auto ry = detail::average_ranks(y);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw StageError("spearman: zero rank variance, rho is undefined");

    SpearmanResult r;
    r.n = n;
    r.rho = sxy / std::sqrt(sxx * syy);
    r.rho = std::clamp(r.rho, -1.0, 1.0);

    if (std::abs(r.rho) >= 1.0 - 1e-14) {
        r.p_value = 0.0;
        r.log10_p = -std::numeric_limits<double>::infinity();
        return r;
    }
    const double dof = static_cast<double>(n - 2);
    const double t = r.rho * std::sqrt(dof / (1.0 - r.rho * r.rho));
    const double logp = detail::log_student_t_two_sided(t, dof);
    r.p_value = std::exp(logp);
    r.log10_p = logp / std::log(10.0);
    return r;
}

struct CorrelationReport {
    struct Entry {
        std::string measure;
        bool defined = true; // false when rank variance is zero
        double rho = 0.0;
        double p_value = 1.0;
        double log10_p = 0.0;
        std::size_t n = 0;
    };
    std::vector<Entry> entries; // sorted by rho descending, undefined last
};

// Actor-level measure value = sum of the actor's per-round values (Spearman
// is invariant to the monotone choice of sum vs mean). Correlates each
// measure with the ground-truth score over actors present in both.
inline CorrelationReport correlation_report(const LongFeatures& lf,
                                            const GroundTruthTable& truth) {
    std::map<std::string, double> score;
    for (const auto& e : truth.entries) score.emplace(e.actor, e.score);

    std::vector<std::size_t> actor_ids;
    std::vector<char> in_truth(lf.actors.size(), 0);
    for (std::size_t i = 0; i < lf.actors.size(); ++i)
        if (score.count(lf.actors[i])) in_truth[i] = 1;

    std::vector<std::vector<double>> sums(lf.measures.size(),
                                          std::vector<double>(lf.actors.size(), 0.0));
    std::vector<char> seen(lf.actors.size(), 0);
    for (const auto& row : lf.rows) {
        seen[row.actor] = 1;
        for (std::size_t mi = 0; mi < lf.measures.size(); ++mi)
            sums[mi][row.actor] += row.values[mi];
    }

    std::vector<double> truth_vec;
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < lf.actors.size(); ++i)
        if (seen[i] && in_truth[i]) {
            kept.push_back(i);
            truth_vec.push_back(score.at(lf.actors[i]));
        }
    if (kept.size() < 3)
        throw StageError("correlation needs at least 3 actors with both features "
                         "and ground truth");

    CorrelationReport report;
    for (std::size_t mi = 0; mi < lf.measures.size(); ++mi) {
        CorrelationReport::Entry e;
        e.measure = measure_name(lf.measures[mi]);
        std::vector<double> v;
        v.reserve(kept.size());
        for (auto i : kept) v.push_back(sums[mi][i]);
        try {
            const auto s = spearman(v, truth_vec);
            e.rho = s.rho;
            e.p_value = s.p_value;
            e.log10_p = s.log10_p;
            e.n = s.n;
        } catch (const StageError&) {
            e.defined = false;
            e.n = kept.size();
        }
        report.entries.push_back(std::move(e));
    }
    std::stable_sort(report.entries.begin(), report.entries.end(),
                     [](const auto& a, const auto& b) {
                         if (a.defined != b.defined) return a.defined;
                         return a.rho > b.rho;
                     });
    return report;
}

struct TimestepImportance {
    std::vector<std::string> measures;
    int max_round = 0;
    std::vector<std::vector<double>> series; // [measure][round-1], 0 where absent
    std::vector<double> measure_means;       // mean over that measure's columns
};

// Groups per-column MDI values by the `{measure}_t{round}` naming convention.
inline TimestepImportance importance_by_timestep(
    const std::vector<std::pair<std::string, double>>& column_importance) {
    struct Parsed {
        std::string measure;
        int round;
        double value;
    };
    std::vector<Parsed> parsed;
    for (const auto& [name, value] : column_importance) {
        const auto pos = name.rfind("_t");
        if (pos == std::string::npos || pos == 0)
            throw StageError("cannot parse feature column name '" + name + "'");
        const auto round = try_parse_int(std::string_view(name).substr(pos + 2));
        if (!round || *round < 1)
            throw StageError("cannot parse feature column name '" + name + "'");
        parsed.push_back({name.substr(0, pos), static_cast<int>(*round), value});
    }

    TimestepImportance out;
    std::map<std::string, std::size_t> measure_ix;
    for (const auto& p : parsed) {
        if (!measure_ix.count(p.measure)) {
            measure_ix[p.measure] = out.measures.size();
            out.measures.push_back(p.measure);
        }
        out.max_round = std::max(out.max_round, p.round);
    }
    out.series.assign(out.measures.size(),
                      std::vector<double>(static_cast<std::size_t>(out.max_round), 0.0));
    std::vector<std::size_t> column_counts(out.measures.size(), 0);
    out.measure_means.assign(out.measures.size(), 0.0);
    for (const auto& p : parsed) {
        const auto mi = measure_ix[p.measure];
        out.series[mi][static_cast<std::size_t>(p.round - 1)] += p.value;
        out.measure_means[mi] += p.value;
        ++column_counts[mi];
    }
    for (std::size_t mi = 0; mi < out.measures.size(); ++mi)
        if (column_counts[mi] > 0)
            out.measure_means[mi] /= static_cast<double>(column_counts[mi]);
    return out;
}

struct PlotSeries {
    std::vector<std::string> measures; // column order
    bool has_truth = false;
    std::vector<std::string> actors;          // sorted by the chosen measure, best first
    std::vector<std::vector<double>> columns; // [measure][rank], normalized + smoothed
    std::vector<double> truth_column;
};

// Actors sorted descending by one measure; every series unity-normalized and
// smoothed with a trailing moving average. Backs the rank-vs-measure charts.
inline PlotSeries export_plot_series(const LongFeatures& lf,
                                     const GroundTruthTable* truth, Measure sort_by,
                                     std::size_t window = 50) {
    std::size_t sort_ix = lf.measures.size();
    for (std::size_t mi = 0; mi < lf.measures.size(); ++mi)
        if (lf.measures[mi] == sort_by) sort_ix = mi;
    if (sort_ix == lf.measures.size())
        throw StageError("sort measure '" + std::string(measure_name(sort_by)) +
                         "' is not part of the feature run");

    std::vector<std::vector<double>> sums(lf.measures.size(),
                                          std::vector<double>(lf.actors.size(), 0.0));
    std::vector<char> seen(lf.actors.size(), 0);
    for (const auto& row : lf.rows) {
        seen[row.actor] = 1;
        for (std::size_t mi = 0; mi < lf.measures.size(); ++mi)
            sums[mi][row.actor] += row.values[mi];
    }

    std::map<std::string, double> truth_score;
    if (truth)
        for (const auto& e : truth->entries) truth_score.emplace(e.actor, e.score);

    std::vector<std::size_t> actors;
    for (std::size_t i = 0; i < lf.actors.size(); ++i)
        if (seen[i] && (!truth || truth_score.count(lf.actors[i]))) actors.push_back(i);
    if (actors.empty()) throw StageError("no actors to export");

    std::stable_sort(actors.begin(), actors.end(), [&](std::size_t a, std::size_t b) {
        return sums[sort_ix][a] > sums[sort_ix][b];
    });

    PlotSeries out;
    out.has_truth = truth != nullptr;
    for (Measure m : lf.measures) out.measures.emplace_back(measure_name(m));
    for (auto i : actors) out.actors.push_back(lf.actors[i]);

    for (std::size_t mi = 0; mi < lf.measures.size(); ++mi) {
        std::vector<double> series;
        series.reserve(actors.size());
        for (auto i : actors) series.push_back(sums[mi][i]);
        out.columns.push_back(moving_average(unity_normalize(series), window));
    }
    if (truth) {
        std::vector<double> series;
        for (auto i : actors) series.push_back(truth_score.at(lf.actors[i]));
        out.truth_column = moving_average(unity_normalize(series), window);
    }
    return out;
}

struct EmbeddingExport {
    std::vector<std::string> columns; // wide feature columns
    std::vector<std::string> actors;
    std::vector<ClassLabel> labels;
    std::vector<std::vector<double>> data; // normalized per column over these rows
};

// One row per labeled actor: wide features unity-normalized per column plus
// the class label. Unlabeled actors are inert; they neither appear nor
// affect the normalization.
inline EmbeddingExport export_embedding_input(const WideFeatures& wide,
                                              const LabelTable& labels) {
    if (labels.entries.empty()) throw StageError("embedding export requires labels");
    std::map<std::string, ClassLabel> by_actor;
    for (const auto& e : labels.entries) by_actor.emplace(e.actor, e.label);

    EmbeddingExport out;
    out.columns = wide.columns;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < wide.actors.size(); ++i) {
        auto it = by_actor.find(wide.actors[i]);
        if (it == by_actor.end()) continue;
        rows.push_back(i);
        out.actors.push_back(wide.actors[i]);
        out.labels.push_back(it->second);
    }
    if (rows.empty()) throw StageError("no labeled actors to export");

    out.data.assign(rows.size(), std::vector<double>(wide.columns.size(), 0.0));
    for (std::size_t c = 0; c < wide.columns.size(); ++c) {
        std::vector<double> col;
        col.reserve(rows.size());
        for (auto r : rows) col.push_back(wide.data[r][c]);
        col = unity_normalize(col);
        for (std::size_t r = 0; r < rows.size(); ++r) out.data[r][c] = col[r];
    }
    return out;
}

} // namespace compnet
