// compnet CLI: builds competition networks from match logs, computes per-round
// centrality features, trains tree models, and runs the correlation and
// export stages. `compnet pipeline` chains everything; the other subcommands
// rerun single stages from persisted intermediate files.
//
// Exit codes: 0 success, 1 usage, 2 parse error, 3 stage failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "compnet/pipeline.hpp"

namespace {

using namespace compnet;

struct Overrides {
    std::optional<std::string> config_file;
    std::optional<std::string> input, truth, format, scope, model, measures,
        quantiles, sort_by, out_dir;
    std::optional<double> train_frac;
    std::optional<std::size_t> trees, window, min_samples_split;
    std::optional<int> max_depth;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_file,
                    "JSON config file; explicit flags override its values");
    cmd->add_option("--input", o.input, "match log file");
    cmd->add_option("--truth", o.truth, "ground truth file");
    cmd->add_option("--format", o.format, "generic|survivor|chess|dota")
        ->check(CLI::IsMember({"generic", "survivor", "chess", "dota"}));
    cmd->add_option("--scope", o.scope, "per-round|cumulative")
        ->check(CLI::IsMember({"per-round", "cumulative"}));
    cmd->add_option("--measures", o.measures, "comma-separated measure list");
    cmd->add_option("--quantiles", o.quantiles, "lower,upper (e.g. 0.10,0.90)");
    cmd->add_option("--model", o.model, "dt|rf")->check(CLI::IsMember({"dt", "rf"}));
    cmd->add_option("--train-frac", o.train_frac, "fraction of rounds used to train");
    cmd->add_option("--trees", o.trees, "forest size");
    cmd->add_option("--max-depth", o.max_depth, "tree depth limit");
    cmd->add_option("--min-samples-split", o.min_samples_split,
                    "minimum node size eligible for a split");
    cmd->add_option("--seed", o.seed, "master RNG seed");
    cmd->add_option("--sort-by", o.sort_by, "measure the plot export is sorted by");
    cmd->add_option("--window", o.window, "moving-average window");
    cmd->add_option("--threads", o.threads, "worker threads (0 = auto)");
    cmd->add_option("--out", o.out_dir, "output directory");
}

RunConfig resolve_config(const Overrides& o) {
    RunConfig c;
    if (o.config_file) {
        std::ifstream in(*o.config_file);
        if (!in) throw ParseError("cannot open config file '" + *o.config_file + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ParseError("config file: " + std::string(e.what()));
        }
        c = config_from_json(j);
    }
    if (o.input) c.input = *o.input;
    if (o.truth) c.truth = *o.truth;
    if (o.format) c.format = parse_format(*o.format);
    if (o.scope) c.scope = parse_scope_mode(*o.scope);
    if (o.measures) {
        c.measures.clear();
        std::stringstream ss(*o.measures);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) c.measures.push_back(parse_measure(item));
        if (c.measures.empty()) throw ParseError("--measures parsed to an empty list");
    }
    if (o.quantiles) {
        std::stringstream ss(*o.quantiles);
        std::string lo, hi;
        if (!std::getline(ss, lo, ',') || !std::getline(ss, hi))
            throw ParseError("--quantiles expects lower,upper");
        try {
            c.lower_q = parse_double(lo, 1);
            c.upper_q = parse_double(hi, 1);
        } catch (const ParseError&) {
            throw ParseError("--quantiles expects two numbers, got '" + *o.quantiles +
                             "'");
        }
    }
    if (o.model) c.model = *o.model;
    if (o.train_frac) c.train_frac = *o.train_frac;
    if (o.trees) c.trees = *o.trees;
    if (o.max_depth) c.max_depth = *o.max_depth;
    if (o.min_samples_split) c.min_samples_split = *o.min_samples_split;
    if (o.seed) c.seed = *o.seed;
    if (o.sort_by) c.sort_by = parse_measure(*o.sort_by);
    if (o.window) c.window = *o.window;
    if (o.threads) c.threads = *o.threads;
    if (o.out_dir) c.out_dir = *o.out_dir;
    return c;
}

std::string slurp(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(std::string("cannot open ") + what + " '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

LongFeatures load_long_features(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open features file '" + path + "'");
    return read_long_csv(in);
}

LabelTable load_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open labels file '" + path + "'");
    return read_labels_csv(in);
}

GroundTruthTable load_truth_generic_or(const RunConfig& c) {
    auto res = stages::load_truth(c.truth, c.format);
    stages::report_rejects(std::cerr, "truth", res.rejected);
    return res.table;
}

int cmd_pipeline(const RunConfig& config) {
    const json manifest = run_pipeline(config);
    for (const auto& f : manifest.at("files"))
        std::cout << f.at("sha256").get<std::string>() << "  "
                  << f.at("path").get<std::string>() << " ("
                  << f.at("bytes").get<std::size_t>() << " bytes)\n";
    return 0;
}

int cmd_stats(const RunConfig& config) {
    MatchLog log = stages::load_events(config.input, config.format);
    stages::report_rejects(std::cerr, "events", log.rejected);
    if (log.events.empty()) throw StageError("no events parsed from input");
    const auto net = build_network(log.events);

    // Runtime row = the full feature pass, measured here.
    LongFeatures lf = run_nrm(net, config.measures, config.scope, config.threads);
    GraphStats st = graph_stats(net);
    st.runtime_seconds = lf.runtime_seconds;
    if (!config.truth.empty()) {
        const auto truth = load_truth_generic_or(config);
        st.label_counts =
            assign_classes(truth, config.lower_q, config.upper_q).counts_string();
    }
    if (log.raw_actor_count != log.actor_count)
        std::cerr << "note: " << log.raw_actor_count
                  << " distinct raw actor ids before season qualification, "
                  << log.actor_count << " nodes after\n";

    write_stats_text(std::cout, st);
    OutputWriter out(config.out_dir);
    json j = stats_json(st);
    j["config"] = config_json(config);
    out.write("graph_stats.json", j.dump(2) + "\n");
    std::ostringstream text;
    write_stats_text(text, st);
    out.write("graph_stats.txt", text.str());
    return 0;
}

int cmd_features(const RunConfig& config, bool also_json) {
    MatchLog log = stages::load_events(config.input, config.format);
    stages::report_rejects(std::cerr, "events", log.rejected);
    if (log.events.empty()) throw StageError("no events parsed from input");
    const auto net = build_network(log.events);
    LongFeatures lf = run_nrm(net, config.measures, config.scope, config.threads);
    for (const auto& w : lf.warnings) std::cerr << "features: " << w << '\n';

    OutputWriter out(config.out_dir);
    const auto wide = to_wide(lf);
    std::ostringstream s_long, s_wide;
    write_long_csv(s_long, lf);
    write_wide_csv(s_wide, wide);
    out.write("features_long.csv", s_long.str());
    out.write("features_wide.csv", s_wide.str());
    if (also_json) {
        out.write("features_long.json", long_features_json(lf).dump(2) + "\n");
        out.write("features_wide.json", wide_features_json(wide).dump(2) + "\n");
    }
    out.echo_manifest(std::cout);
    return 0;
}

int cmd_label(const RunConfig& config) {
    const auto truth = load_truth_generic_or(config);
    const LabelTable labels = assign_classes(truth, config.lower_q, config.upper_q);
    OutputWriter out(config.out_dir);
    std::ostringstream s;
    write_labels_csv(s, labels);
    out.write("labels.csv", s.str());
    std::cout << "labels: " << labels.counts_string();
    if (labels.ties_split > 0)
        std::cout << " (" << labels.ties_split << " tied actors split at a cut)";
    std::cout << '\n';
    return 0;
}

int cmd_train(const RunConfig& config, const std::string& features_path,
              const std::string& labels_path) {
    const LongFeatures lf = load_long_features(features_path);
    const LabelTable labels = load_labels(labels_path);
    std::vector<std::string> warnings;
    stages::TrainOutput trained =
        stages::train_models(lf, to_wide(lf), labels, config, &warnings);
    for (const auto& w : warnings) std::cerr << "train: " << w << '\n';

    OutputWriter out(config.out_dir);
    json j = model_json(trained.model);
    j["config"] = config_json(config);
    out.write("model.json", j.dump(2) + "\n");
    json wj = model_json(trained.wide_model);
    wj["config"] = config_json(config);
    out.write("importance_model.json", wj.dump(2) + "\n");
    std::cout << "trained " << trained.model.kind << " on " << trained.train.size()
              << " rows (" << trained.test.size() << " held out)\n";
    return 0;
}

int cmd_evaluate(const RunConfig& config, const std::string& features_path,
                 const std::string& labels_path, const std::string& model_path,
                 const std::string& importance_model_path) {
    const LongFeatures lf = load_long_features(features_path);
    const LabelTable labels = load_labels(labels_path);
    json mj, wj;
    try {
        std::istringstream(slurp(model_path, "model")) >> mj;
        std::istringstream(slurp(importance_model_path, "importance model")) >> wj;
    } catch (const json::exception& e) {
        throw ParseError("model file: " + std::string(e.what()));
    }
    const ForestModel model = model_from_json(mj);
    const ForestModel wide_model = model_from_json(wj);

    Dataset data = make_dataset(lf, labels);
    auto [train, test] = temporal_split(data, config.train_frac);
    const WideFeatures wide = to_wide(lf);
    stages::Evaluation ev =
        stages::evaluate_models(model, wide_model, test, wide.columns);

    OutputWriter out(config.out_dir);
    json j;
    j["config"] = config_json(config);
    j["test_rows"] = test.size();
    j["train_rows"] = train.size();
    j["metrics"] = metrics_json(ev.metrics);
    j["majority_baseline"] = metrics_json(ev.baseline);
    json mi;
    for (std::size_t i = 0; i < model.feature_names.size(); ++i)
        mi[model.feature_names[i]] = ev.measure_importance[i];
    j["measure_importance"] = std::move(mi);
    out.write("metrics.json", j.dump(2) + "\n");

    std::ostringstream s1, s2, s3;
    write_column_importance_csv(s1, wide.columns, ev.column_importance);
    out.write("mdi_wide_columns.csv", s1.str());
    write_importance_by_round_csv(s2, ev.by_timestep);
    out.write("mdi_by_round.csv", s2.str());
    write_importance_means_csv(s3, ev.by_timestep);
    out.write("mdi_measure_means.csv", s3.str());

    std::cout << "accuracy " << format_double(ev.metrics.accuracy) << ", macro F1 "
              << format_double(ev.metrics.f1_macro) << " (baseline accuracy "
              << format_double(ev.baseline.accuracy) << ", baseline F1 "
              << format_double(ev.baseline.f1_macro) << ")\n";
    return 0;
}

int cmd_correlate(const RunConfig& config, const std::string& features_path) {
    const LongFeatures lf = load_long_features(features_path);
    const auto truth = load_truth_generic_or(config);
    const CorrelationReport corr = correlation_report(lf, truth);

    OutputWriter out(config.out_dir);
    std::ostringstream s;
    write_correlations_csv(s, corr);
    out.write("correlations.csv", s.str());
    json j;
    j["config"] = config_json(config);
    j["correlations"] = correlations_json(corr);
    out.write("correlations.json", j.dump(2) + "\n");

    for (const auto& e : corr.entries) {
        std::cout << e.measure << ": ";
        if (e.defined)
            std::cout << "rho " << format_double(e.rho) << ", log10(p) "
                      << format_double(e.log10_p);
        else
            std::cout << "undefined (zero rank variance)";
        std::cout << " [n=" << e.n << "]\n";
    }
    return 0;
}

int cmd_export(const RunConfig& config, const std::string& features_path,
               const std::string& labels_path) {
    const LongFeatures lf = load_long_features(features_path);
    const LabelTable labels = load_labels(labels_path);
    const GroundTruthTable truth =
        config.truth.empty() ? GroundTruthTable{} : load_truth_generic_or(config);

    OutputWriter out(config.out_dir);
    const PlotSeries plot = export_plot_series(
        lf, config.truth.empty() ? nullptr : &truth, config.sort_by, config.window);
    std::ostringstream s1, s2;
    write_plot_series_csv(s1, plot);
    out.write("plot_series.csv", s1.str());
    const EmbeddingExport emb = export_embedding_input(to_wide(lf), labels);
    write_embedding_csv(s2, emb);
    out.write("embedding.csv", s2.str());
    out.echo_manifest(std::cout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"competition-network centrality and ranking pipeline"};
    app.require_subcommand(1);

    Overrides o;
    std::string features_path = "out/features_long.csv";
    std::string labels_path = "out/labels.csv";
    std::string model_path = "out/model.json";
    std::string importance_model_path = "out/importance_model.json";

    auto* p_pipeline = app.add_subcommand("pipeline", "run every stage end to end");
    add_common_options(p_pipeline, o);
    auto* p_stats = app.add_subcommand("stats", "graph statistics table");
    add_common_options(p_stats, o);
    auto* p_features = app.add_subcommand("features", "per-round centrality matrices");
    add_common_options(p_features, o);
    bool features_json = false;
    p_features->add_flag("--json", features_json,
                         "also write JSON mirrors of both matrices");
    auto* p_label = app.add_subcommand("label", "quantile class labels");
    add_common_options(p_label, o);
    auto* p_train = app.add_subcommand("train", "fit tree model(s) on features");
    add_common_options(p_train, o);
    p_train->add_option("--features", features_path, "long-form feature CSV");
    p_train->add_option("--labels", labels_path, "labels CSV");
    auto* p_eval = app.add_subcommand("evaluate", "metrics and MDI of a trained model");
    add_common_options(p_eval, o);
    p_eval->add_option("--features", features_path, "long-form feature CSV");
    p_eval->add_option("--labels", labels_path, "labels CSV");
    p_eval->add_option("--model-file", model_path, "trained model JSON");
    p_eval->add_option("--importance-model-file", importance_model_path,
                       "trained wide-matrix model JSON");
    auto* p_corr = app.add_subcommand("correlate", "Spearman rank correlations");
    add_common_options(p_corr, o);
    p_corr->add_option("--features", features_path, "long-form feature CSV");
    auto* p_export = app.add_subcommand("export", "plot series and embedding inputs");
    add_common_options(p_export, o);
    p_export->add_option("--features", features_path, "long-form feature CSV");
    p_export->add_option("--labels", labels_path, "labels CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        const compnet::RunConfig config = resolve_config(o);
        if (p_pipeline->parsed()) return cmd_pipeline(config);
        if (p_stats->parsed()) return cmd_stats(config);
        if (p_features->parsed()) return cmd_features(config, features_json);
        if (p_label->parsed()) return cmd_label(config);
        if (p_train->parsed()) return cmd_train(config, features_path, labels_path);
        if (p_eval->parsed())
            return cmd_evaluate(config, features_path, labels_path, model_path,
                                importance_model_path);
        if (p_corr->parsed()) return cmd_correlate(config, features_path);
        if (p_export->parsed()) return cmd_export(config, features_path, labels_path);
        return 1;
    } catch (const compnet::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "stage failure: " << e.what() << '\n';
        return 3;
    }
}
