#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "renecast/dataset.hpp"

#include "json.hpp"

namespace renecast::gbrt {

/// Model input: calendar year plus an ordinal country encoding (index of the
/// ISO code in the alphabetically sorted 12-country list). Ordinal rather
/// than one-hot: threshold splits handle ordered categories directly, and the
/// encoding is isolated here so it can be swapped.
struct FeatureRow {
    double year = 0.0;
    double country_code = 0.0;

    friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

/// Index of a South American ISO code in kSouthAmericaIso; throws InputError
/// for codes outside the encoding.
int country_ordinal(std::string_view iso);

FeatureRow encode(int year, std::string_view iso);

struct Hyperparams {
    int n_estimators = 100;
    double learning_rate = 0.1;
    int max_depth = 5;
    int min_samples_split = 2;
    std::uint64_t seed = 42;
};

void validate(const Hyperparams& hyper);

/// One regression tree stored as a node arena. feature_index == -1 marks a
/// leaf carrying `value` (TWh of residual); internal nodes route
/// x[feature_index] <= threshold to `left`, else `right`.
struct TreeNode {
    int feature_index = -1;
    double threshold = 0.0;
    double value = 0.0;
    int left = -1;
    int right = -1;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
    std::vector<TreeNode> nodes;  // root at index 0

    double predict(const FeatureRow& row) const;
    int depth() const;

    friend bool operator==(const Tree&, const Tree&) = default;
};

/// Greedy exact CART on squared error. Candidate thresholds are midpoints of
/// adjacent distinct sorted feature values; the best split maximizes
/// SSE_parent - (SSE_left + SSE_right), ties broken by lower feature index
/// then lower threshold. A node becomes a leaf (mean target) at the depth
/// limit, below min_samples_split, or when no split improves SSE by more
/// than 1e-12.
Tree fit_tree(std::span<const FeatureRow> rows, std::span<const double> targets,
              int max_depth, int min_samples_split = 2);

struct BoostedEnsemble {
    Hyperparams hyper;
    double base_prediction = 0.0;  // mean of training targets
    std::vector<Tree> trees;

    double predict(const FeatureRow& row) const;

    nlohmann::json to_json() const;
    static BoostedEnsemble from_json(const nlohmann::json& doc);
};

/// Per-round training diagnostics, filled by fit_ensemble on request.
struct FitTrace {
    std::vector<double> train_rmse;  // after each boosting round
};

/// Standard least-squares boosting: F_0 = mean(y), each round fits a tree to
/// the residuals and adds it scaled by the learning rate. Fully
/// deterministic; no subsampling.
BoostedEnsemble fit_ensemble(std::span<const FeatureRow> rows,
                             std::span<const double> targets, const Hyperparams& hyper,
                             FitTrace* trace = nullptr);

/// One prediction per requested country at the given year, clamped at 0 from
/// below (generation cannot be negative).
std::map<std::string, double> predict_year(const BoostedEnsemble& ensemble, int year,
                                           std::span<const std::string> countries);

/// Training table built from a dataset: one row per (country, year) with the
/// country's total generation across sources as target. Rows ordered by
/// (country, year).
struct RegressionTable {
    std::vector<FeatureRow> rows;
    std::vector<double> targets;
    std::vector<std::string> countries;
};

RegressionTable build_table(const Dataset& dataset);

}  // namespace renecast::gbrt
