#pragma once

// Batch orchestration: ingest -> graph -> features -> labels -> learn -> eval,
// with every intermediate persisted as plain CSV/JSON so each stage can be
// rerun independently and produce identical bytes.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "compnet/io.hpp"
#include "compnet/sha256.hpp"

namespace compnet {

struct RunConfig {
    std::string input;
    std::string truth;
    Format format = Format::generic;
    ScopeMode scope = ScopeMode::per_round;
    std::vector<Measure> measures = all_measures();
    double lower_q = 0.10;
    double upper_q = 0.90;
    std::string model = "rf"; // "dt" or "rf"
    double train_frac = 0.8;
    std::size_t trees = 100;
    int max_depth = 10;
    std::size_t min_samples_split = 2;
    std::uint64_t seed = 42;
    Measure sort_by = Measure::con1;
    std::size_t window = 50;
    unsigned threads = 0; // 0 = hardware concurrency
    std::string out_dir = "out";
};

inline json config_json(const RunConfig& c) {
    json j;
    j["input"] = c.input;
    j["truth"] = c.truth;
    j["format"] = std::string(format_name(c.format));
    j["scope"] = std::string(scope_mode_name(c.scope));
    std::vector<std::string> measures;
    for (Measure m : c.measures) measures.emplace_back(measure_name(m));
    j["measures"] = measures;
    j["quantiles"] = std::vector<double>{c.lower_q, c.upper_q};
    j["model"] = c.model;
    j["train_frac"] = c.train_frac;
    j["trees"] = c.trees;
    j["max_depth"] = c.max_depth;
    j["min_samples_split"] = c.min_samples_split;
    j["seed"] = c.seed;
    j["sort_by"] = std::string(measure_name(c.sort_by));
    j["window"] = c.window;
    j["threads"] = c.threads;
    j["out"] = c.out_dir;
    return j;
}

inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.input = j.value("input", c.input);
    c.truth = j.value("truth", c.truth);
    if (j.contains("format")) c.format = parse_format(j.at("format").get<std::string>());
    if (j.contains("scope"))
        c.scope = parse_scope_mode(j.at("scope").get<std::string>());
    if (j.contains("measures")) {
        c.measures.clear();
        for (const auto& m : j.at("measures"))
            c.measures.push_back(parse_measure(m.get<std::string>()));
    }
    if (j.contains("quantiles")) {
        const auto q = j.at("quantiles").get<std::vector<double>>();
        if (q.size() != 2) throw ParseError("quantiles must be [lower, upper]");
        c.lower_q = q[0];
        c.upper_q = q[1];
    }
    c.model = j.value("model", c.model);
    c.train_frac = j.value("train_frac", c.train_frac);
    c.trees = j.value("trees", c.trees);
    c.max_depth = j.value("max_depth", c.max_depth);
    c.min_samples_split = j.value("min_samples_split", c.min_samples_split);
    c.seed = j.value("seed", c.seed);
    if (j.contains("sort_by"))
        c.sort_by = parse_measure(j.at("sort_by").get<std::string>());
    c.window = j.value("window", c.window);
    c.threads = j.value("threads", c.threads);
    c.out_dir = j.value("out", c.out_dir);
    return c;
}

// Collects written files for the manifest; all writes funnel through here.
class OutputWriter {
public:
    explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& contents) {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw StageError("cannot open '" + path.string() + "' for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw StageError("failed writing '" + path.string() + "'");
        files_.push_back({name, contents.size(), Sha256::hash_hex(contents)});
    }

    json manifest(const RunConfig& config) const {
        json j;
        j["config"] = config_json(config);
        json files = json::array();
        for (const auto& f : files_) {
            json fj;
            fj["path"] = f.name;
            fj["bytes"] = f.bytes;
            fj["sha256"] = f.sha256;
            files.push_back(std::move(fj));
        }
        j["files"] = std::move(files);
        return j;
    }

    void echo_manifest(std::ostream& out) const {
        for (const auto& f : files_)
            out << f.sha256 << "  " << f.name << " (" << f.bytes << " bytes)\n";
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    struct Entry {
        std::string name;
        std::size_t bytes;
        std::string sha256;
    };
    std::filesystem::path dir_;
    std::vector<Entry> files_;
};

namespace stages {

inline MatchLog load_events(const std::string& path, Format format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open match log '" + path + "'");
    return parse_match_log(in, format);
}

inline TruthParseResult load_truth(const std::string& path, Format format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open ground truth '" + path + "'");
    return parse_ground_truth(in, format);
}

inline void report_rejects(std::ostream& err, const std::string& what,
                           const std::vector<RowIssue>& rejected) {
    for (const auto& r : rejected)
        err << what << ": line " << r.line << ": " << r.message << " (row dropped)\n";
}

struct TrainOutput {
    ForestModel model;      // long-form (actor, round) model backing the metrics
    ForestModel wide_model; // actor-level wide model backing per-round MDI
    Dataset train, test;
};

inline ForestParams forest_params(const RunConfig& config) {
    ForestParams p;
    p.n_trees = config.trees;
    p.max_depth = config.max_depth;
    p.min_samples_split = config.min_samples_split;
    p.seed = config.seed;
    return p;
}

// Trains the temporal-split model for metrics and, separately, a model over
// the wide measure x round matrix whose MDI is attributable per time-step.
inline TrainOutput train_models(const LongFeatures& lf, const WideFeatures& wide,
                                const LabelTable& labels, const RunConfig& config,
                                std::vector<std::string>* warnings = nullptr) {
    if (config.model != "dt" && config.model != "rf")
        throw StageError("model must be 'dt' or 'rf'");

    TrainOutput out;
    Dataset data = make_dataset(lf, labels, warnings);
    if (data.size() == 0) throw StageError("no labeled rows to train on");
    std::tie(out.train, out.test) = temporal_split(data, config.train_frac);

    Dataset wide_data;
    wide_data.feature_names = wide.columns;
    for (std::size_t i = 0; i < wide.actors.size(); ++i)
        if (const auto* e = labels.find(wide.actors[i]))
            wide_data.push_row(wide.actors[i], 0, wide.data[i], e->label);

    if (config.model == "dt") {
        ForestParams p = forest_params(config);
        p.n_trees = 1;
        p.bootstrap = false;
        p.feature_sampling = FeatureSampling::all;
        auto make_dt = [&](const Dataset& d) {
            ForestModel m;
            m.kind = "dt";
            m.params = p;
            m.feature_names = d.feature_names;
            m.trees.push_back(train_decision_tree(d, p.max_depth, p.min_samples_split,
                                                  p.seed));
            return m;
        };
        out.model = make_dt(out.train);
        out.wide_model = make_dt(wide_data);
    } else {
        out.model = train_random_forest(out.train, forest_params(config),
                                        config.threads);
        out.wide_model = train_random_forest(wide_data, forest_params(config),
                                             config.threads);
    }
    return out;
}

struct Evaluation {
    MetricsReport metrics;
    MetricsReport baseline;
    std::vector<double> measure_importance; // long model, per measure
    std::vector<double> column_importance;  // wide model, per wide column
    TimestepImportance by_timestep;
};

inline Evaluation evaluate_models(const ForestModel& model,
                                  const ForestModel& wide_model, const Dataset& test,
                                  const std::vector<std::string>& wide_columns) {
    Evaluation ev;
    ev.metrics = classification_metrics(test.y, predict(model, test.x));
    ev.baseline = majority_baseline(test.y);
    ev.measure_importance = mdi_importance(model);
    ev.column_importance = mdi_importance(wide_model);
    std::vector<std::pair<std::string, double>> cols;
    for (std::size_t i = 0; i < wide_columns.size(); ++i)
        cols.emplace_back(wide_columns[i], ev.column_importance[i]);
    ev.by_timestep = importance_by_timestep(cols);
    return ev;
}

} // namespace stages

// Full batch run. Returns the manifest; throws ParseError/StageError on the
// first failing stage. `err` receives row-level reports and warnings.
inline json run_pipeline(const RunConfig& config, std::ostream& err = std::cerr) {
    OutputWriter out(config.out_dir);
    auto dump = [](const json& j) { return j.dump(2) + "\n"; };
    out.write("config.json", dump(config_json(config)));

    // ingest
    MatchLog log = stages::load_events(config.input, config.format);
    stages::report_rejects(err, "events", log.rejected);
    if (log.events.empty()) throw StageError("no events parsed from input");
    TruthParseResult truth = stages::load_truth(config.truth, config.format);
    stages::report_rejects(err, "truth", truth.rejected);
    {
        std::ostringstream s;
        write_events_csv(s, log.events);
        out.write("events.csv", s.str());
    }
    {
        std::ostringstream s;
        write_truth_csv(s, truth.table);
        out.write("truth.csv", s.str());
    }

    // graph + features
    const DynamicCompetitionNetwork net = build_network(log.events);
    LongFeatures lf = run_nrm(net, config.measures, config.scope, config.threads);
    for (const auto& w : lf.warnings) err << "features: " << w << '\n';
    const WideFeatures wide = to_wide(lf);
    {
        std::ostringstream s;
        write_long_csv(s, lf);
        out.write("features_long.csv", s.str());
    }
    {
        std::ostringstream s;
        write_wide_csv(s, wide);
        out.write("features_wide.csv", s.str());
    }

    // labels
    const LabelTable labels = assign_classes(truth.table, config.lower_q, config.upper_q);
    {
        std::ostringstream s;
        write_labels_csv(s, labels);
        out.write("labels.csv", s.str());
    }

    // stats (runtime = the measured feature pass)
    GraphStats st = graph_stats(net, &labels);
    st.runtime_seconds = lf.runtime_seconds;
    {
        json j = stats_json(st);
        j["config"] = config_json(config);
        out.write("graph_stats.json", dump(j));
        std::ostringstream s;
        write_stats_text(s, st);
        out.write("graph_stats.txt", s.str());
    }

    // learn
    std::vector<std::string> join_warnings;
    stages::TrainOutput trained =
        stages::train_models(lf, wide, labels, config, &join_warnings);
    for (const auto& w : join_warnings) err << "train: " << w << '\n';
    {
        json j = model_json(trained.model);
        j["config"] = config_json(config);
        out.write("model.json", dump(j));
        json wj = model_json(trained.wide_model);
        wj["config"] = config_json(config);
        out.write("importance_model.json", dump(wj));
    }

    stages::Evaluation ev = stages::evaluate_models(trained.model, trained.wide_model,
                                                    trained.test, wide.columns);
    {
        json j;
        j["config"] = config_json(config);
        j["test_rows"] = trained.test.size();
        j["train_rows"] = trained.train.size();
        j["metrics"] = metrics_json(ev.metrics);
        j["majority_baseline"] = metrics_json(ev.baseline);
        json mi;
        for (std::size_t i = 0; i < trained.model.feature_names.size(); ++i)
            mi[trained.model.feature_names[i]] = ev.measure_importance[i];
        j["measure_importance"] = std::move(mi);
        out.write("metrics.json", dump(j));
    }
    {
        std::ostringstream s;
        write_column_importance_csv(s, wide.columns, ev.column_importance);
        out.write("mdi_wide_columns.csv", s.str());
    }
    {
        std::ostringstream s;
        write_importance_by_round_csv(s, ev.by_timestep);
        out.write("mdi_by_round.csv", s.str());
    }
    {
        std::ostringstream s;
        write_importance_means_csv(s, ev.by_timestep);
        out.write("mdi_measure_means.csv", s.str());
    }

    // eval: correlations + exports
    const CorrelationReport corr = correlation_report(lf, truth.table);
    {
        std::ostringstream s;
        write_correlations_csv(s, corr);
        out.write("correlations.csv", s.str());
        json j;
        j["config"] = config_json(config);
        j["correlations"] = correlations_json(corr);
        out.write("correlations.json", dump(j));
    }
    {
        const PlotSeries plot =
            export_plot_series(lf, &truth.table, config.sort_by, config.window);
        std::ostringstream s;
        write_plot_series_csv(s, plot);
        out.write("plot_series.csv", s.str());
    }
    {
        const EmbeddingExport emb = export_embedding_input(wide, labels);
        std::ostringstream s;
        write_embedding_csv(s, emb);
        out.write("embedding.csv", s.str());
    }

    const json manifest = out.manifest(config);
    out.write("manifest.json", dump(manifest));
    return manifest;
}

} // namespace compnet
