#pragma once

// CSV and JSON serialization for every artifact the pipeline produces.
// Numbers are written with shortest-round-trip formatting so files parsed
// back by a later stage carry exactly the values the earlier stage computed.

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "compnet/eval.hpp"
#include "compnet/features.hpp"
#include "compnet/graph.hpp"
#include "compnet/ingest.hpp"
#include "compnet/labels.hpp"
#include "compnet/learn.hpp"

namespace compnet {

using json = nlohmann::ordered_json;

// --- features -------------------------------------------------------------

inline void write_long_csv(std::ostream& out, const LongFeatures& lf) {
    out << "actor,competition,round";
    for (Measure m : lf.measures) out << ',' << measure_name(m);
    out << '\n';
    for (const auto& row : lf.rows) {
        out << csv::quote_if_needed(lf.actors[row.actor]) << ','
            << csv::quote_if_needed(lf.competitions[row.competition]) << ','
            << row.round;
        for (double v : row.values) out << ',' << format_double(v);
        out << '\n';
    }
}

inline LongFeatures read_long_csv(std::istream& in) {
    csv::Table t(in);
    LongFeatures lf;
    const auto& header = t.header();
    if (header.size() < 4 || header[0] != "actor" || header[1] != "competition" ||
        header[2] != "round")
        throw ParseError("long feature CSV must start with actor,competition,round");
    for (std::size_t c = 3; c < header.size(); ++c)
        lf.measures.push_back(parse_measure(header[c]));

    std::map<std::string, std::uint32_t> actor_ix, comp_ix;
    for (std::size_t r = 0; r < t.size(); ++r) {
        LongFeatures::Row row;
        const std::string actor = t.cell(r, 0);
        const std::string comp = t.cell(r, 1);
        auto [ait, afresh] =
            actor_ix.try_emplace(actor, static_cast<std::uint32_t>(lf.actors.size()));
        if (afresh) lf.actors.push_back(actor);
        row.actor = ait->second;
        auto [cit, cfresh] = comp_ix.try_emplace(
            comp, static_cast<std::uint32_t>(lf.competitions.size()));
        if (cfresh) lf.competitions.push_back(comp);
        row.competition = cit->second;
        auto round = try_parse_int(t.cell(r, 2));
        if (!round || *round < 1)
            throw ParseError("line " + std::to_string(t.line_of(r)) + ": bad round");
        row.round = static_cast<int>(*round);
        for (std::size_t c = 3; c < header.size(); ++c)
            row.values.push_back(parse_double(t.cell(r, c), t.line_of(r)));
        lf.rows.push_back(std::move(row));
    }
    return lf;
}

inline void write_wide_csv(std::ostream& out, const WideFeatures& w) {
    out << "actor";
    for (const auto& c : w.columns) out << ',' << c;
    out << '\n';
    for (std::size_t i = 0; i < w.actors.size(); ++i) {
        out << csv::quote_if_needed(w.actors[i]);
        for (double v : w.data[i]) out << ',' << format_double(v);
        out << '\n';
    }
}

inline json long_features_json(const LongFeatures& lf) {
    json rows = json::array();
    for (const auto& row : lf.rows) {
        json r;
        r["actor"] = lf.actors[row.actor];
        r["competition"] = lf.competitions[row.competition];
        r["round"] = row.round;
        for (std::size_t mi = 0; mi < lf.measures.size(); ++mi)
            r[std::string(measure_name(lf.measures[mi]))] = row.values[mi];
        rows.push_back(std::move(r));
    }
    json out;
    json measures = json::array();
    for (Measure m : lf.measures) measures.push_back(std::string(measure_name(m)));
    out["measures"] = std::move(measures);
    out["rows"] = std::move(rows);
    return out;
}

inline json wide_features_json(const WideFeatures& w) {
    json rows = json::array();
    for (std::size_t i = 0; i < w.actors.size(); ++i) {
        json r;
        r["actor"] = w.actors[i];
        for (std::size_t c = 0; c < w.columns.size(); ++c)
            r[w.columns[c]] = w.data[i][c];
        rows.push_back(std::move(r));
    }
    json out;
    out["columns"] = w.columns;
    out["rows"] = std::move(rows);
    return out;
}

// --- labels ----------------------------------------------------------------

inline void write_labels_csv(std::ostream& out, const LabelTable& labels) {
    std::vector<const LabelTable::Entry*> sorted;
    for (const auto& e : labels.entries) sorted.push_back(&e);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto* a, const auto* b) { return a->rank < b->rank; });
    out << "actor,class,score,rank\n";
    for (const auto* e : sorted)
        out << csv::quote_if_needed(e->actor) << ',' << class_name(e->label) << ','
            << format_double(e->score) << ',' << e->rank << '\n';
}

inline LabelTable read_labels_csv(std::istream& in) {
    csv::Table t(in);
    auto c_actor = t.require_column({"actor"});
    auto c_class = t.require_column({"class"});
    auto c_score = t.require_column({"score"});
    auto c_rank = t.require_column({"rank"});
    LabelTable labels;
    for (std::size_t r = 0; r < t.size(); ++r) {
        LabelTable::Entry e;
        e.actor = t.cell(r, c_actor);
        e.label = parse_class(t.cell(r, c_class));
        e.score = parse_double(t.cell(r, c_score), t.line_of(r));
        auto rank = try_parse_int(t.cell(r, c_rank));
        if (!rank) throw ParseError("line " + std::to_string(t.line_of(r)) + ": bad rank");
        e.rank = static_cast<std::size_t>(*rank);
        switch (e.label) {
            case ClassLabel::Top: ++labels.top_count; break;
            case ClassLabel::Middle: ++labels.middle_count; break;
            case ClassLabel::Bottom: ++labels.bottom_count; break;
        }
        labels.entries.push_back(std::move(e));
    }
    return labels;
}

// --- graph stats ------------------------------------------------------------

inline json stats_json(const GraphStats& s) {
    json j;
    j["nodes"] = s.nodes;
    j["edges"] = s.edges;
    j["rounds"] = s.rounds;
    j["competitions"] = s.competitions;
    if (!s.label_counts.empty()) j["labels"] = s.label_counts;
    j["connected"] = s.connected;
    j["wcc"] = s.wcc_count;
    j["scc"] = s.scc_count;
    j["sparsity"] = s.sparsity;
    j["diameter"] = s.diameter;
    if (s.runtime_seconds > 0.0) j["runtime_seconds"] = s.runtime_seconds;
    return j;
}

inline void write_stats_text(std::ostream& out, const GraphStats& s) {
    auto row = [&](std::string_view name, const std::string& value) {
        out << name;
        for (std::size_t i = name.size(); i < 16; ++i) out << ' ';
        out << value << '\n';
    };
    std::ostringstream sparsity;
    sparsity.precision(4);
    sparsity << s.sparsity;
    row("# Nodes", std::to_string(s.nodes));
    row("# Edges", std::to_string(s.edges));
    row("# Rounds", std::to_string(s.rounds));
    row("# Competitions", std::to_string(s.competitions));
    row("# Labels", s.label_counts.empty() ? "-" : s.label_counts);
    row("Connected", s.connected ? "Yes" : "No");
    row("# WCC", std::to_string(s.wcc_count));
    row("# SCC", std::to_string(s.scc_count));
    row("Sparsity", sparsity.str());
    row("Diameter", std::to_string(s.diameter));
    if (s.runtime_seconds > 0.0) {
        std::ostringstream rt;
        rt.precision(3);
        rt << s.runtime_seconds << "s";
        row("Runtime", rt.str());
    } else {
        row("Runtime", "-");
    }
}

// --- model -----------------------------------------------------------------

inline json model_json(const ForestModel& model) {
    json j;
    j["format"] = model.kind == "dt" ? "compnet-dt-v1" : "compnet-rf-v1";
    j["kind"] = model.kind;
    json params;
    params["n_trees"] = model.params.n_trees;
    params["max_depth"] = model.params.max_depth;
    params["min_samples_split"] = model.params.min_samples_split;
    params["bootstrap"] = model.params.bootstrap;
    params["feature_sampling"] =
        model.params.feature_sampling == FeatureSampling::all ? "all" : "sqrt";
    params["seed"] = model.params.seed;
    j["params"] = std::move(params);
    j["feature_names"] = model.feature_names;
    j["classes"] = std::vector<std::string>{"Top", "Middle", "Bottom"};
    json trees = json::array();
    for (const auto& tree : model.trees) {
        json t;
        t["seed"] = tree.seed;
        json nodes = json::array();
        for (const auto& n : tree.nodes) {
            json node;
            node["f"] = n.feature;
            node["thr"] = n.threshold;
            node["l"] = n.left;
            node["r"] = n.right;
            node["n"] = n.n_samples;
            node["di"] = n.impurity_decrease;
            node["dist"] = std::vector<double>(n.dist.begin(), n.dist.end());
            nodes.push_back(std::move(node));
        }
        t["nodes"] = std::move(nodes);
        trees.push_back(std::move(t));
    }
    j["trees"] = std::move(trees);
    return j;
}

inline ForestModel model_from_json(const json& j) {
    ForestModel model;
    const std::string format = j.at("format").get<std::string>();
    if (format != "compnet-dt-v1" && format != "compnet-rf-v1")
        throw ParseError("unsupported model format '" + format + "'");
    model.kind = j.at("kind").get<std::string>();
    const auto& p = j.at("params");
    model.params.n_trees = p.at("n_trees").get<std::size_t>();
    model.params.max_depth = p.at("max_depth").get<int>();
    model.params.min_samples_split = p.at("min_samples_split").get<std::size_t>();
    model.params.bootstrap = p.at("bootstrap").get<bool>();
    model.params.feature_sampling = p.at("feature_sampling").get<std::string>() == "all"
                                        ? FeatureSampling::all
                                        : FeatureSampling::sqrt_count;
    model.params.seed = p.at("seed").get<std::uint64_t>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const auto& tj : j.at("trees")) {
        DecisionTree tree;
        tree.seed = tj.at("seed").get<std::uint64_t>();
        for (const auto& nj : tj.at("nodes")) {
            TreeNode n;
            n.feature = nj.at("f").get<int>();
            n.threshold = nj.at("thr").get<double>();
            n.left = nj.at("l").get<std::int32_t>();
            n.right = nj.at("r").get<std::int32_t>();
            n.n_samples = nj.at("n").get<std::uint32_t>();
            n.impurity_decrease = nj.at("di").get<double>();
            const auto dist = nj.at("dist").get<std::vector<double>>();
            for (std::size_t c = 0; c < kNumClasses && c < dist.size(); ++c)
                n.dist[c] = dist[c];
            tree.nodes.push_back(std::move(n));
        }
        // Reject structurally broken trees before anything traverses them.
        const auto node_count = static_cast<std::int32_t>(tree.nodes.size());
        if (tree.nodes.empty()) throw ParseError("model tree has no nodes");
        for (const auto& n : tree.nodes) {
            if (n.feature >= 0) {
                if (n.feature >= static_cast<int>(model.feature_names.size()) ||
                    n.left < 0 || n.left >= node_count || n.right < 0 ||
                    n.right >= node_count)
                    throw ParseError("model tree has out-of-range node references");
            }
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

// --- metrics / correlations / importance ------------------------------------

inline json metrics_json(const MetricsReport& r) {
    json j;
    j["accuracy"] = r.accuracy;
    j["precision_macro"] = r.precision_macro;
    j["recall_macro"] = r.recall_macro;
    j["f1_macro"] = r.f1_macro;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        json cls;
        cls["precision"] = r.precision[c];
        cls["recall"] = r.recall[c];
        cls["f1"] = r.f1[c];
        cls["support"] = r.support[c];
        j["per_class"][std::string(kClassNames[c])] = std::move(cls);
    }
    json confusion = json::array();
    for (const auto& row : r.confusion)
        confusion.push_back(std::vector<std::size_t>(row.begin(), row.end()));
    j["confusion"] = std::move(confusion);
    return j;
}

inline void write_correlations_csv(std::ostream& out, const CorrelationReport& r) {
    out << "measure,rho,p_value,log10_p,n\n";
    for (const auto& e : r.entries) {
        out << e.measure << ',';
        if (e.defined)
            out << format_double(e.rho) << ',' << format_double(e.p_value) << ','
                << format_double(e.log10_p);
        else
            out << "undefined,undefined,undefined";
        out << ',' << e.n << '\n';
    }
}

inline json correlations_json(const CorrelationReport& r) {
    json arr = json::array();
    for (const auto& e : r.entries) {
        json ej;
        ej["measure"] = e.measure;
        ej["defined"] = e.defined;
        if (e.defined) {
            ej["rho"] = e.rho;
            ej["p_value"] = e.p_value;
            ej["log10_p"] = e.log10_p;
        }
        ej["n"] = e.n;
        arr.push_back(std::move(ej));
    }
    return arr;
}

inline void write_column_importance_csv(
    std::ostream& out, const std::vector<std::string>& columns,
    const std::vector<double>& importance) {
    out << "column,importance\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << columns[i] << ',' << format_double(importance[i]) << '\n';
}

inline void write_importance_by_round_csv(std::ostream& out,
                                          const TimestepImportance& ti) {
    out << "measure,round,importance\n";
    for (std::size_t mi = 0; mi < ti.measures.size(); ++mi)
        for (int t = 1; t <= ti.max_round; ++t)
            out << ti.measures[mi] << ',' << t << ','
                << format_double(ti.series[mi][static_cast<std::size_t>(t - 1)]) << '\n';
}

inline void write_importance_means_csv(std::ostream& out,
                                       const TimestepImportance& ti) {
    out << "measure,mean_importance\n";
    for (std::size_t mi = 0; mi < ti.measures.size(); ++mi)
        out << ti.measures[mi] << ',' << format_double(ti.measure_means[mi]) << '\n';
}

inline void write_plot_series_csv(std::ostream& out, const PlotSeries& p) {
    out << "rank,actor";
    for (const auto& m : p.measures) out << ',' << m;
    if (p.has_truth) out << ",truth";
    out << '\n';
    for (std::size_t i = 0; i < p.actors.size(); ++i) {
        out << (i + 1) << ',' << csv::quote_if_needed(p.actors[i]);
        for (const auto& col : p.columns) out << ',' << format_double(col[i]);
        if (p.has_truth) out << ',' << format_double(p.truth_column[i]);
        out << '\n';
    }
}

inline void write_embedding_csv(std::ostream& out, const EmbeddingExport& e) {
    out << "actor,label";
    for (const auto& c : e.columns) out << ',' << c;
    out << '\n';
    for (std::size_t i = 0; i < e.actors.size(); ++i) {
        out << csv::quote_if_needed(e.actors[i]) << ',' << class_name(e.labels[i]);
        for (double v : e.data[i]) out << ',' << format_double(v);
        out << '\n';
    }
}

} // namespace compnet
