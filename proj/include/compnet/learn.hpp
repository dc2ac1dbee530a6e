#pragma once

// Tree-ensemble classification over (actor, round) feature rows: temporal
// train/test split, CART decision tree, random forest with per-tree seeds,
// MDI feature importance, and the usual classification metrics.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "compnet/features.hpp"
#include "compnet/labels.hpp"
#include "compnet/rng.hpp"
#include "compnet/types.hpp"

namespace compnet {

constexpr std::size_t kNumClasses = 3;

struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<std::string> actors; // per row
    std::vector<int> rounds;         // per row
    std::vector<std::vector<double>> x;
    std::vector<ClassLabel> y;

    std::size_t size() const { return x.size(); }
    std::size_t feature_count() const { return feature_names.size(); }

    void push_row(std::string actor, int round, std::vector<double> values,
                  ClassLabel label) {
        actors.push_back(std::move(actor));
        rounds.push_back(round);
        x.push_back(std::move(values));
        y.push_back(label);
    }
};

// Join long-form feature rows with per-actor labels. Rows whose actor has no
// label are excluded (with one warning per actor); labeled actors absent
// from the features are warned about but kept in the label table.
inline Dataset make_dataset(const LongFeatures& lf, const LabelTable& labels,
                            std::vector<std::string>* warnings = nullptr) {
    std::map<std::string, ClassLabel> by_actor;
    for (const auto& e : labels.entries) by_actor.emplace(e.actor, e.label);

    Dataset d;
    for (Measure m : lf.measures) d.feature_names.emplace_back(measure_name(m));
    std::set<std::string> unlabeled;
    std::set<std::string> seen;
    for (const auto& row : lf.rows) {
        const std::string& actor = lf.actors[row.actor];
        seen.insert(actor);
        auto it = by_actor.find(actor);
        if (it == by_actor.end()) {
            unlabeled.insert(actor);
            continue;
        }
        d.push_row(actor, row.round, row.values, it->second);
    }
    if (warnings) {
        for (const auto& a : unlabeled)
            warnings->push_back("actor '" + a + "' has no ground-truth label; excluded");
        for (const auto& e : labels.entries)
            if (!seen.count(e.actor))
                warnings->push_back("labeled actor '" + e.actor +
                                    "' never appears in the event data");
    }
    return d;
}

// First ceil(train_fraction * k) distinct rounds are training data, the rest
// test data. Rounds are aligned by index across competitions.
inline std::pair<Dataset, Dataset> temporal_split(const Dataset& data,
                                                  double train_fraction = 0.8) {
    std::set<int> round_set(data.rounds.begin(), data.rounds.end());
    if (round_set.size() < 2)
        throw StageError("temporal split needs at least 2 distinct rounds");
    const auto k = static_cast<double>(round_set.size());
    const auto train_rounds =
        static_cast<std::size_t>(std::ceil(k * train_fraction - 1e-9));
    std::vector<int> rounds(round_set.begin(), round_set.end());
    if (train_rounds == 0 || train_rounds >= rounds.size())
        throw StageError("temporal split leaves an empty side (k = " +
                         std::to_string(rounds.size()) + ", fraction = " +
                         std::to_string(train_fraction) + ")");
    const int last_train_round = rounds[train_rounds - 1];

    Dataset train, test;
    train.feature_names = test.feature_names = data.feature_names;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto& side = data.rounds[i] <= last_train_round ? train : test;
        side.push_row(data.actors[i], data.rounds[i], data.x[i], data.y[i]);
    }
    return {std::move(train), std::move(test)};
}

// 1 - sum((c_i / N)^2)
inline double gini(const std::vector<std::size_t>& class_counts) {
    std::size_t total = 0;
    for (auto c : class_counts) total += c;
    if (total == 0) throw StageError("gini of an empty node is undefined");
    double s = 0.0;
    for (auto c : class_counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        s += p * p;
    }
    return 1.0 - s;
}

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1, right = -1;
    std::uint32_t n_samples = 0;
    double impurity_decrease = 0.0;      // Delta I at this node, 0 for leaves
    std::array<double, kNumClasses> dist{}; // class distribution, sums to 1
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root
    std::uint64_t seed = 0;

    int predict(const std::vector<double>& row) const {
        std::size_t at = 0;
        while (nodes[at].feature >= 0)
            at = row[static_cast<std::size_t>(nodes[at].feature)] <=
                         nodes[at].threshold
                     ? static_cast<std::size_t>(nodes[at].left)
                     : static_cast<std::size_t>(nodes[at].right);
        const auto& d = nodes[at].dist;
        std::size_t best = 0;
        for (std::size_t c = 1; c < kNumClasses; ++c)
            if (d[c] > d[best]) best = c;
        return static_cast<int>(best);
    }
};

enum class FeatureSampling { sqrt_count, all };

struct ForestParams {
    std::size_t n_trees = 100;
    int max_depth = 10;
    std::size_t min_samples_split = 2;
    bool bootstrap = true;
    FeatureSampling feature_sampling = FeatureSampling::sqrt_count;
    std::uint64_t seed = 0;
};

struct ForestModel {
    std::string kind; // "dt" or "rf"
    ForestParams params;
    std::vector<std::string> feature_names;
    std::vector<DecisionTree> trees;
};

namespace detail {

struct TreeBuilder {
    const std::vector<std::vector<double>>& x;
    const std::vector<ClassLabel>& y;
    int max_depth;
    std::size_t min_samples_split;
    std::size_t m_try; // features considered per node; 0 means all
    Rng* rng;          // null when m_try == 0
    std::size_t root_n;
    DecisionTree tree;

    static double gini_counts(const std::array<std::size_t, kNumClasses>& c,
                              std::size_t total) {
        double s = 0.0;
        for (auto v : c) {
            const double p = static_cast<double>(v) / static_cast<double>(total);
            s += p * p;
        }
        return 1.0 - s;
    }

    std::int32_t build(std::vector<std::uint32_t>& samples, int depth) {
        const std::size_t node_ix = tree.nodes.size();
        tree.nodes.emplace_back();
        const std::size_t n = samples.size();

        std::array<std::size_t, kNumClasses> counts{};
        for (auto s : samples) ++counts[static_cast<std::size_t>(y[s])];
        {
            auto& node = tree.nodes[node_ix];
            node.n_samples = static_cast<std::uint32_t>(n);
            for (std::size_t c = 0; c < kNumClasses; ++c)
                node.dist[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
        }

        const bool pure =
            *std::max_element(counts.begin(), counts.end()) == n;
        if (pure || depth >= max_depth || n < min_samples_split)
            return static_cast<std::int32_t>(node_ix);

        // Candidate features for this node, ascending for tie determinism.
        const std::size_t m = x[0].size();
        std::vector<std::uint32_t> feats(m);
        for (std::uint32_t f = 0; f < m; ++f) feats[f] = f;
        if (m_try > 0 && m_try < m) {
            for (std::size_t i = 0; i < m_try; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(
                                              rng->bounded(m - i));
                std::swap(feats[i], feats[j]);
            }
            feats.resize(m_try);
            std::sort(feats.begin(), feats.end());
        }

        const double parent_impurity = gini_counts(counts, n);
        int best_feature = -1;
        double best_threshold = 0.0, best_decrease = -1.0;

        std::vector<std::pair<double, std::uint32_t>> vals(n);
        for (auto f : feats) {
            for (std::size_t i = 0; i < n; ++i)
                vals[i] = {x[samples[i]][f], samples[i]};
            std::sort(vals.begin(), vals.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (vals.front().first == vals.back().first) continue; // constant

            std::array<std::size_t, kNumClasses> left{};
            std::size_t n_left = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                ++left[static_cast<std::size_t>(y[vals[i].second])];
                ++n_left;
                if (vals[i].first == vals[i + 1].first) continue;
                std::array<std::size_t, kNumClasses> right{};
                for (std::size_t c = 0; c < kNumClasses; ++c)
                    right[c] = counts[c] - left[c];
                const std::size_t n_right = n - n_left;
                const double child =
                    (static_cast<double>(n_left) * gini_counts(left, n_left) +
                     static_cast<double>(n_right) * gini_counts(right, n_right)) /
                    static_cast<double>(n);
                const double decrease = parent_impurity - child;
                if (decrease > best_decrease) {
                    best_decrease = decrease;
                    best_feature = static_cast<int>(f);
                    best_threshold = (vals[i].first + vals[i + 1].first) / 2.0;
                }
            }
        }

        // No feature varies within this node: nothing to split on.
        if (best_feature < 0) return static_cast<std::int32_t>(node_ix);

        std::vector<std::uint32_t> left_samples, right_samples;
        for (auto s : samples)
            (x[s][static_cast<std::size_t>(best_feature)] <= best_threshold
                 ? left_samples
                 : right_samples)
                .push_back(s);
        samples.clear();
        samples.shrink_to_fit();

        {
            auto& node = tree.nodes[node_ix];
            node.feature = best_feature;
            node.threshold = best_threshold;
            node.impurity_decrease = std::max(0.0, best_decrease);
        }
        const std::int32_t l = build(left_samples, depth + 1);
        const std::int32_t r = build(right_samples, depth + 1);
        tree.nodes[node_ix].left = l;
        tree.nodes[node_ix].right = r;
        return static_cast<std::int32_t>(node_ix);
    }
};

inline DecisionTree grow_tree(const Dataset& data,
                              const std::vector<std::uint32_t>& sample_ix,
                              int max_depth, std::size_t min_samples_split,
                              std::size_t m_try, Rng* rng) {
    TreeBuilder b{data.x, data.y, max_depth, min_samples_split, m_try, rng,
                  sample_ix.size(), {}};
    std::vector<std::uint32_t> samples = sample_ix;
    b.build(samples, 0);
    return std::move(b.tree);
}

} // namespace detail

// Greedy CART with gini impurity. Thresholds are midpoints between
// consecutive distinct sorted values; ties go to the lowest feature index,
// then the lowest threshold. Zero-gain splits are taken when a feature still
// varies, which is what lets depth-2 trees solve XOR-style data.
inline DecisionTree train_decision_tree(const Dataset& train, int max_depth = 10,
                                        std::size_t min_samples_split = 2,
                                        std::uint64_t seed = 0) {
    if (train.size() == 0) throw StageError("cannot train on an empty dataset");
    std::vector<std::uint32_t> all(train.size());
    for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    DecisionTree t = detail::grow_tree(train, all, max_depth, min_samples_split,
                                       /*m_try=*/0, nullptr);
    t.seed = seed;
    return t;
}

// Bootstrap + per-node feature subsampling. Tree t derives its RNG from
// (seed, t), so training is reproducible under any parallel schedule.
inline ForestModel train_random_forest(const Dataset& train, ForestParams params,
                                       unsigned threads = 0) {
    if (train.size() == 0) throw StageError("cannot train on an empty dataset");
    if (params.n_trees == 0) throw StageError("forest needs at least one tree");

    const std::size_t m = train.feature_count();
    const std::size_t m_try =
        params.feature_sampling == FeatureSampling::all
            ? 0
            : std::max<std::size_t>(
                  1, static_cast<std::size_t>(std::sqrt(static_cast<double>(m))));

    ForestModel model;
    model.kind = "rf";
    model.params = params;
    model.feature_names = train.feature_names;
    model.trees.resize(params.n_trees);

    auto train_one = [&](std::size_t t) {
        const std::uint64_t tree_seed = derive_seed(params.seed, t);
        Rng rng(tree_seed);
        std::vector<std::uint32_t> sample_ix(train.size());
        if (params.bootstrap) {
            for (auto& s : sample_ix)
                s = static_cast<std::uint32_t>(rng.bounded(train.size()));
        } else {
            for (std::uint32_t i = 0; i < sample_ix.size(); ++i) sample_ix[i] = i;
        }
        model.trees[t] = detail::grow_tree(train, sample_ix, params.max_depth,
                                           params.min_samples_split, m_try,
                                           m_try > 0 ? &rng : nullptr);
        model.trees[t].seed = tree_seed;
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(params.n_trees));
    if (threads <= 1) {
        for (std::size_t t = 0; t < params.n_trees; ++t) train_one(t);
    } else {
        std::atomic<std::size_t> cursor{0};
        auto worker = [&] {
            while (true) {
                const std::size_t t = cursor.fetch_add(1);
                if (t >= params.n_trees) return;
                train_one(t);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return model;
}

// Majority vote across trees; vote ties resolve to the lower class index.
inline int predict_row(const ForestModel& model, const std::vector<double>& row) {
    if (row.size() != model.feature_names.size())
        throw StageError("feature dimension mismatch: model expects " +
                         std::to_string(model.feature_names.size()) + ", row has " +
                         std::to_string(row.size()));
    std::array<std::size_t, kNumClasses> votes{};
    for (const auto& t : model.trees) ++votes[static_cast<std::size_t>(t.predict(row))];
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c)
        if (votes[c] > votes[best]) best = c;
    return static_cast<int>(best);
}

inline std::vector<ClassLabel> predict(const ForestModel& model,
                                       const std::vector<std::vector<double>>& rows) {
    std::vector<ClassLabel> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back(static_cast<ClassLabel>(predict_row(model, r)));
    return out;
}

// MDI(f) = sum over nodes splitting on f of p(t) * Delta I_t, averaged over
// trees, then normalized to sum to 1 (all zeros when the forest never split).
inline std::vector<double> mdi_importance(const ForestModel& model) {
    std::vector<double> total(model.feature_names.size(), 0.0);
    for (const auto& tree : model.trees) {
        const double root_n = static_cast<double>(tree.nodes.front().n_samples);
        for (const auto& node : tree.nodes)
            if (node.feature >= 0)
                total[static_cast<std::size_t>(node.feature)] +=
                    static_cast<double>(node.n_samples) / root_n *
                    node.impurity_decrease;
    }
    for (auto& v : total) v /= static_cast<double>(model.trees.size());
    double sum = 0.0;
    for (auto v : total) sum += v;
    if (sum > 0.0)
        for (auto& v : total) v /= sum;
    return total;
}

struct MetricsReport {
    double accuracy = 0.0;
    double precision_macro = 0.0, recall_macro = 0.0, f1_macro = 0.0;
    std::array<double, kNumClasses> precision{}, recall{}, f1{};
    std::array<std::array<std::size_t, kNumClasses>, kNumClasses> confusion{}; // [true][pred]
    std::array<std::size_t, kNumClasses> support{};
};

// Macro averages run over classes present in y_true; per-class terms that are
// undefined (no predictions / no support) count as 0.
inline MetricsReport classification_metrics(const std::vector<ClassLabel>& y_true,
                                            const std::vector<ClassLabel>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw StageError("metrics: y_true and y_pred lengths differ");
    if (y_true.empty()) throw StageError("metrics: empty input");

    MetricsReport r;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const auto t = static_cast<std::size_t>(y_true[i]);
        const auto p = static_cast<std::size_t>(y_pred[i]);
        ++r.confusion[t][p];
        ++r.support[t];
        if (t == p) ++correct;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());

    std::size_t present = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        std::size_t tp = r.confusion[c][c], fp = 0, fn = 0;
        for (std::size_t o = 0; o < kNumClasses; ++o) {
            if (o == c) continue;
            fp += r.confusion[o][c];
            fn += r.confusion[c][o];
        }
        r.precision[c] = tp + fp > 0
                             ? static_cast<double>(tp) / static_cast<double>(tp + fp)
                             : 0.0;
        r.recall[c] = tp + fn > 0
                          ? static_cast<double>(tp) / static_cast<double>(tp + fn)
                          : 0.0;
        r.f1[c] = r.precision[c] + r.recall[c] > 0.0
                      ? 2.0 * r.precision[c] * r.recall[c] /
                            (r.precision[c] + r.recall[c])
                      : 0.0;
        if (r.support[c] > 0) {
            ++present;
            r.precision_macro += r.precision[c];
            r.recall_macro += r.recall[c];
            r.f1_macro += r.f1[c];
        }
    }
    if (present > 0) {
        r.precision_macro /= static_cast<double>(present);
        r.recall_macro /= static_cast<double>(present);
        r.f1_macro /= static_cast<double>(present);
    }
    return r;
}

// Metrics of the constant majority-class predictor, the imbalance baseline
// any real model has to beat.
inline MetricsReport majority_baseline(const std::vector<ClassLabel>& y_true) {
    std::array<std::size_t, kNumClasses> counts{};
    for (auto y : y_true) ++counts[static_cast<std::size_t>(y)];
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c)
        if (counts[c] > counts[best]) best = c;
    std::vector<ClassLabel> pred(y_true.size(), static_cast<ClassLabel>(best));
    return classification_metrics(y_true, pred);
}

} // namespace compnet
