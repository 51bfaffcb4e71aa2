#include "renecast/gbrt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "renecast/error.hpp"
#include "renecast/metrics.hpp"

namespace renecast::gbrt {

namespace {

constexpr double kSplitGainTol = 1e-12;  // ignores float-noise splits on constant regions

double feature(const FeatureRow& row, int index) {
    return index == 0 ? row.year : row.country_code;
}

struct SplitChoice {
    bool found = false;
    int feature_index = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

// Canonical sample order for a feature: by the active feature value, then the
// full row, then the target. Prefix sums over this order make split gains
// independent of the caller's row permutation.
std::vector<std::size_t> sorted_by_feature(std::span<const FeatureRow> rows,
                                           std::span<const double> targets,
                                           std::span<const std::size_t> samples,
                                           int feature_index) {
    std::vector<std::size_t> order(samples.begin(), samples.end());
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double fa = feature(rows[a], feature_index);
        const double fb = feature(rows[b], feature_index);
        if (fa != fb) return fa < fb;
        if (rows[a].year != rows[b].year) return rows[a].year < rows[b].year;
        if (rows[a].country_code != rows[b].country_code)
            return rows[a].country_code < rows[b].country_code;
        return targets[a] < targets[b];
    });
    return order;
}

class TreeBuilder {
public:
    TreeBuilder(std::span<const FeatureRow> rows, std::span<const double> targets,
                int max_depth, int min_samples_split)
        : rows_(rows),
          targets_(targets),
          max_depth_(max_depth),
          min_samples_split_(min_samples_split) {}

    Tree build() {
        std::vector<std::size_t> all(rows_.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        grow(all, 0);
        return std::move(tree_);
    }

private:
    double mean_of(std::span<const std::size_t> samples) const {
        // Summed in canonical order so leaf values are permutation-invariant.
        auto order = sorted_by_feature(rows_, targets_, samples, 0);
        double total = 0.0;
        for (std::size_t idx : order) total += targets_[idx];
        return total / static_cast<double>(samples.size());
    }

    SplitChoice best_split(std::span<const std::size_t> samples) const {
        SplitChoice best;
        const auto n = samples.size();
        for (int f = 0; f < 2; ++f) {
            const auto order = sorted_by_feature(rows_, targets_, samples, f);
            // prefix sums of y and y^2 in canonical order
            std::vector<double> sum(n + 1, 0.0), sumsq(n + 1, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double y = targets_[order[i]];
                sum[i + 1] = sum[i] + y;
                sumsq[i + 1] = sumsq[i] + y * y;
            }
            const auto sse = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
                const double s = sum[hi] - sum[lo];
                const double sq = sumsq[hi] - sumsq[lo];
                const auto cnt = static_cast<double>(hi - lo);
                return sq - s * s / cnt;
            };
            const double parent = sse(0, n);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double left_value = feature(rows_[order[i]], f);
                const double right_value = feature(rows_[order[i + 1]], f);
                if (left_value == right_value) continue;
                const double threshold = 0.5 * (left_value + right_value);
                const double gain = parent - sse(0, i + 1) - sse(i + 1, n);
                // Strict > keeps the first best: lower feature index, then
                // lower threshold.
                if (!best.found || gain > best.gain) {
                    best = {true, f, threshold, gain};
                }
            }
        }
        return best;
    }

    int grow(std::span<const std::size_t> samples, int depth) {
        const int node_index = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        const bool can_split = depth < max_depth_ &&
                               samples.size() >= static_cast<std::size_t>(min_samples_split_);
        SplitChoice choice;
        if (can_split) choice = best_split(samples);

        if (!can_split || !choice.found || choice.gain <= kSplitGainTol) {
            tree_.nodes[node_index].value = mean_of(samples);
            return node_index;
        }

        std::vector<std::size_t> left, right;
        left.reserve(samples.size());
        right.reserve(samples.size());
        for (std::size_t idx : samples) {
            if (feature(rows_[idx], choice.feature_index) <= choice.threshold)
                left.push_back(idx);
            else
                right.push_back(idx);
        }

        tree_.nodes[node_index].feature_index = choice.feature_index;
        tree_.nodes[node_index].threshold = choice.threshold;
        const int left_index = grow(left, depth + 1);
        const int right_index = grow(right, depth + 1);
        tree_.nodes[node_index].left = left_index;
        tree_.nodes[node_index].right = right_index;
        return node_index;
    }

    std::span<const FeatureRow> rows_;
    std::span<const double> targets_;
    int max_depth_;
    int min_samples_split_;
    Tree tree_;
};

nlohmann::json node_to_json(const Tree& tree, int index) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
    nlohmann::json doc;
    if (node.feature_index < 0) {
        doc["value"] = node.value;
    } else {
        doc["feature"] = node.feature_index;
        doc["threshold"] = node.threshold;
        doc["left"] = node_to_json(tree, node.left);
        doc["right"] = node_to_json(tree, node.right);
    }
    return doc;
}

int node_from_json(const nlohmann::json& doc, Tree& tree) {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (doc.contains("value")) {
        tree.nodes[static_cast<std::size_t>(index)].value = doc.at("value").get<double>();
        return index;
    }
    tree.nodes[static_cast<std::size_t>(index)].feature_index = doc.at("feature").get<int>();
    tree.nodes[static_cast<std::size_t>(index)].threshold = doc.at("threshold").get<double>();
    const int left = node_from_json(doc.at("left"), tree);
    const int right = node_from_json(doc.at("right"), tree);
    tree.nodes[static_cast<std::size_t>(index)].left = left;
    tree.nodes[static_cast<std::size_t>(index)].right = right;
    return index;
}

int node_depth(const Tree& tree, int index) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
    if (node.feature_index < 0) return 0;
    return 1 + std::max(node_depth(tree, node.left), node_depth(tree, node.right));
}

}  // namespace

int country_ordinal(std::string_view iso) {
    const auto it = std::find(kSouthAmericaIso.begin(), kSouthAmericaIso.end(), iso);
    if (it == kSouthAmericaIso.end()) {
        throw InputError("country '" + std::string(iso) + "' is not in the encoding");
    }
    return static_cast<int>(it - kSouthAmericaIso.begin());
}

FeatureRow encode(int year, std::string_view iso) {
    return {static_cast<double>(year), static_cast<double>(country_ordinal(iso))};
}

void validate(const Hyperparams& hyper) {
    if (hyper.n_estimators < 1) throw InputError("n_estimators must be >= 1");
    if (!(hyper.learning_rate > 0.0 && hyper.learning_rate <= 1.0))
        throw InputError("learning_rate must lie in (0, 1]");
    if (hyper.max_depth < 1) throw InputError("max_depth must be >= 1");
    if (hyper.min_samples_split < 2) throw InputError("min_samples_split must be >= 2");
}

double Tree::predict(const FeatureRow& row) const {
    int index = 0;
    while (true) {
        const TreeNode& node = nodes[static_cast<std::size_t>(index)];
        if (node.feature_index < 0) return node.value;
        index = feature(row, node.feature_index) <= node.threshold ? node.left : node.right;
    }
}

int Tree::depth() const { return nodes.empty() ? 0 : node_depth(*this, 0); }

Tree fit_tree(std::span<const FeatureRow> rows, std::span<const double> targets,
              int max_depth, int min_samples_split) {
    if (rows.empty()) throw InputError("fit_tree needs at least one sample");
    if (rows.size() != targets.size()) throw InputError("rows/targets length mismatch");
    if (max_depth < 1) throw InputError("max_depth must be >= 1");
    TreeBuilder builder(rows, targets, max_depth, min_samples_split);
    return builder.build();
}

double BoostedEnsemble::predict(const FeatureRow& row) const {
    double total = 0.0;
    for (const Tree& tree : trees) total += tree.predict(row);
    return base_prediction + hyper.learning_rate * total;
}

nlohmann::json BoostedEnsemble::to_json() const {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["hyper"] = {{"n_estimators", hyper.n_estimators},
                    {"learning_rate", hyper.learning_rate},
                    {"max_depth", hyper.max_depth},
                    {"min_samples_split", hyper.min_samples_split},
                    {"seed", hyper.seed}};
    doc["base_prediction"] = base_prediction;
    nlohmann::json trees_doc = nlohmann::json::array();
    for (const Tree& tree : trees) trees_doc.push_back(node_to_json(tree, 0));
    doc["trees"] = std::move(trees_doc);
    return doc;
}

BoostedEnsemble BoostedEnsemble::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || doc.value("format_version", 0) != 1) {
        throw InputError("unsupported ensemble format");
    }
    BoostedEnsemble ensemble;
    const auto& hyper = doc.at("hyper");
    ensemble.hyper.n_estimators = hyper.at("n_estimators").get<int>();
    ensemble.hyper.learning_rate = hyper.at("learning_rate").get<double>();
    ensemble.hyper.max_depth = hyper.at("max_depth").get<int>();
    ensemble.hyper.min_samples_split = hyper.at("min_samples_split").get<int>();
    ensemble.hyper.seed = hyper.at("seed").get<std::uint64_t>();
    ensemble.base_prediction = doc.at("base_prediction").get<double>();
    for (const auto& tree_doc : doc.at("trees")) {
        Tree tree;
        node_from_json(tree_doc, tree);
        ensemble.trees.push_back(std::move(tree));
    }
    return ensemble;
}

BoostedEnsemble fit_ensemble(std::span<const FeatureRow> rows,
                             std::span<const double> targets, const Hyperparams& hyper,
                             FitTrace* trace) {
    validate(hyper);
    if (rows.size() != targets.size()) throw InputError("rows/targets length mismatch");
    if (rows.size() < 2) throw InputError("fit_ensemble needs at least 2 samples");

    BoostedEnsemble ensemble;
    ensemble.hyper = hyper;

    // Base mean summed in canonical order, like the leaf means, so the whole
    // fit is invariant under a permutation of the training rows.
    std::vector<std::size_t> all(rows.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    double mean = 0.0;
    for (std::size_t idx : sorted_by_feature(rows, targets, all, 0)) mean += targets[idx];
    mean /= static_cast<double>(targets.size());
    ensemble.base_prediction = mean;

    std::vector<double> current(rows.size(), mean);
    std::vector<double> residuals(rows.size());
    if (trace) trace->train_rmse.clear();

    for (int round = 0; round < hyper.n_estimators; ++round) {
        for (std::size_t i = 0; i < rows.size(); ++i) residuals[i] = targets[i] - current[i];
        Tree tree = fit_tree(rows, residuals, hyper.max_depth, hyper.min_samples_split);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            current[i] += hyper.learning_rate * tree.predict(rows[i]);
        }
        ensemble.trees.push_back(std::move(tree));
        if (trace) trace->train_rmse.push_back(rmse(targets, current));
    }
    return ensemble;
}

std::map<std::string, double> predict_year(const BoostedEnsemble& ensemble, int year,
                                           std::span<const std::string> countries) {
    std::map<std::string, double> out;
    for (const std::string& iso : countries) {
        const double raw = ensemble.predict(encode(year, iso));
        out[iso] = std::max(0.0, raw);
    }
    return out;
}

RegressionTable build_table(const Dataset& dataset) {
    RegressionTable table;
    table.countries = dataset.countries();
    const auto years = dataset.year_range();
    for (const std::string& iso : table.countries) {
        const auto totals = dataset.country_totals(iso);
        for (std::size_t i = 0; i < years.size(); ++i) {
            table.rows.push_back(encode(years[i], iso));
            table.targets.push_back(totals[i]);
        }
    }
    return table;
}

}  // namespace renecast::gbrt
