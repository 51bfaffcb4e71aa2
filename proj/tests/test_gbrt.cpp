#include "doctest.h"

#include "renecast/gbrt.hpp"

#include <algorithm>

#include "renecast/error.hpp"
#include "renecast/metrics.hpp"
#include "renecast/rng.hpp"
#include "support.hpp"

using namespace renecast;
using gbrt::FeatureRow;

namespace {

std::vector<FeatureRow> single_feature_rows(const std::vector<double>& xs) {
    std::vector<FeatureRow> rows;
    for (double x : xs) rows.push_back({x, 0.0});
    return rows;
}

struct RandomInstance {
    std::vector<FeatureRow> rows;
    std::vector<double> targets;
};

RandomInstance random_instance(DeterministicRng& rng, std::size_t max_n) {
    RandomInstance inst;
    const std::size_t n = 2 + rng.next_u64() % (max_n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        inst.rows.push_back({1960.0 + static_cast<double>(rng.next_u64() % 60),
                             static_cast<double>(rng.next_u64() % 12)});
        inst.targets.push_back(200.0 * rng.next_f64() - 50.0);
    }
    return inst;
}

}  // namespace

TEST_CASE("country encoding is ordinal over the sorted ISO list") {
    CHECK(gbrt::country_ordinal("ARG") == 0);
    CHECK(gbrt::country_ordinal("PER") == 7);
    CHECK(gbrt::country_ordinal("PRY") == 8);
    CHECK(gbrt::country_ordinal("VEN") == 11);
    CHECK_THROWS_AS(gbrt::country_ordinal("MEX"), InputError);
    const auto row = gbrt::encode(2050, "BRA");
    CHECK(row.year == 2050.0);
    CHECK(row.country_code == 2.0);
}

TEST_CASE("fit_tree: constant targets produce a single leaf") {
    const auto rows = single_feature_rows({1.0, 2.0, 3.0});
    const auto tree = gbrt::fit_tree(rows, std::vector{5.0, 5.0, 5.0}, 4);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].feature_index == -1);
    CHECK(tree.nodes[0].value == 5.0);
}

TEST_CASE("fit_tree: two points split at the midpoint") {
    const auto rows = single_feature_rows({0.0, 1.0});
    const auto tree = gbrt::fit_tree(rows, std::vector{0.0, 10.0}, 1);
    REQUIRE(tree.nodes.size() == 3);
    CHECK(tree.nodes[0].feature_index == 0);
    CHECK(tree.nodes[0].threshold == 0.5);
    CHECK(tree.predict({0.0, 0.0}) == 0.0);
    CHECK(tree.predict({1.0, 0.0}) == 10.0);
}

TEST_CASE("fit_tree: 8 ordered points are isolated at depth 3") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 8; ++i) {
        xs.push_back(static_cast<double>(i));
        ys.push_back(10.0 * i);
    }
    const auto rows = single_feature_rows(xs);
    const auto tree = gbrt::fit_tree(rows, ys, 3);
    CHECK(tree.depth() <= 3);
    for (int i = 0; i < 8; ++i) {
        CHECK(tree.predict({static_cast<double>(i), 0.0}) == doctest::Approx(ys[i]));
    }
}

TEST_CASE("fit_tree tie-break prefers the lower feature index") {
    // Both features separate the two rows with identical gain.
    const std::vector<FeatureRow> rows = {{0.0, 0.0}, {1.0, 1.0}};
    const auto tree = gbrt::fit_tree(rows, std::vector{0.0, 10.0}, 1);
    REQUIRE(tree.nodes.size() == 3);
    CHECK(tree.nodes[0].feature_index == 0);
}

TEST_CASE("fit_tree rejects empty input") {
    CHECK_THROWS_AS(gbrt::fit_tree({}, {}, 3), InputError);
}

TEST_CASE("depth-1 single-tree ensemble equals the exhaustive best stump") {
    DeterministicRng rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        const auto inst = random_instance(rng, 50);
        const auto oracle = testsupport::exhaustive_best_stump(inst.rows, inst.targets);

        gbrt::Hyperparams hyper;
        hyper.n_estimators = 1;
        hyper.learning_rate = 1.0;
        hyper.max_depth = 1;
        const auto ensemble = gbrt::fit_ensemble(inst.rows, inst.targets, hyper);
        REQUIRE(ensemble.trees.size() == 1);
        const auto& tree = ensemble.trees[0];

        if (!oracle.found) {
            CHECK(tree.nodes.size() == 1);
            continue;
        }
        REQUIRE(tree.nodes.size() == 3);
        CHECK(tree.nodes[0].feature_index == oracle.feature);
        CHECK(tree.nodes[0].threshold == oracle.threshold);
        // The stump fits residuals from the mean; adding the base back must
        // reproduce the oracle's leaf means.
        const auto& left = tree.nodes[static_cast<std::size_t>(tree.nodes[0].left)];
        const auto& right = tree.nodes[static_cast<std::size_t>(tree.nodes[0].right)];
        CHECK(ensemble.base_prediction + left.value ==
              doctest::Approx(oracle.left_value).epsilon(1e-12));
        CHECK(ensemble.base_prediction + right.value ==
              doctest::Approx(oracle.right_value).epsilon(1e-12));
    }
}

TEST_CASE("single exact-fit tree reproduces the targets") {
    DeterministicRng rng(8);
    std::vector<FeatureRow> rows;
    std::vector<double> targets;
    for (int i = 0; i < 12; ++i) {
        rows.push_back({static_cast<double>(i), 0.0});
        targets.push_back(100.0 * rng.next_f64());
    }
    gbrt::Hyperparams hyper;
    hyper.n_estimators = 1;
    hyper.learning_rate = 1.0;
    hyper.max_depth = 12;
    const auto ensemble = gbrt::fit_ensemble(rows, targets, hyper);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(ensemble.predict(rows[i]) == doctest::Approx(targets[i]).epsilon(1e-9));
    }
}

TEST_CASE("constant targets are reproduced exactly for any M and nu") {
    const auto rows = single_feature_rows({1.0, 2.0, 3.0, 4.0});
    const std::vector<double> targets(4, 3.25);
    gbrt::Hyperparams hyper;
    hyper.n_estimators = 17;
    hyper.learning_rate = 0.3;
    const auto ensemble = gbrt::fit_ensemble(rows, targets, hyper);
    for (const auto& row : rows) CHECK(ensemble.predict(row) == 3.25);
}

TEST_CASE("training RMSE is non-increasing over boosting rounds") {
    DeterministicRng rng(55);
    const auto inst = random_instance(rng, 60);
    gbrt::Hyperparams hyper;
    hyper.n_estimators = 60;
    hyper.learning_rate = 0.1;
    hyper.max_depth = 3;
    gbrt::FitTrace trace;
    gbrt::fit_ensemble(inst.rows, inst.targets, hyper, &trace);
    REQUIRE(trace.train_rmse.size() == 60);
    for (std::size_t m = 1; m < trace.train_rmse.size(); ++m) {
        CHECK(trace.train_rmse[m] <= trace.train_rmse[m - 1] + 1e-12);
    }
}

TEST_CASE("predictions are piecewise constant between training thresholds") {
    // Thresholds only exist at midpoints of training values, so rows landing
    // between the same pair of neighbours share every leaf.
    const auto rows = single_feature_rows({0.0, 10.0, 20.0, 30.0});
    gbrt::Hyperparams hyper;
    hyper.n_estimators = 12;
    hyper.max_depth = 3;
    const auto ensemble =
        gbrt::fit_ensemble(rows, std::vector{1.0, 7.0, 4.0, 9.0}, hyper);
    CHECK(ensemble.predict({2.0, 0.0}) == ensemble.predict({4.9, 0.0}));
    CHECK(ensemble.predict({21.0, 0.0}) == ensemble.predict({24.0, 0.0}));
}

TEST_CASE("pre-fit ensemble predicts the base value") {
    gbrt::BoostedEnsemble ensemble;
    ensemble.base_prediction = 7.5;
    CHECK(ensemble.predict({2000.0, 3.0}) == 7.5);
}

TEST_CASE("fit is invariant under row permutation") {
    DeterministicRng rng(12);
    const auto inst = random_instance(rng, 40);
    gbrt::Hyperparams hyper;
    hyper.n_estimators = 10;
    hyper.max_depth = 4;
    const auto base = gbrt::fit_ensemble(inst.rows, inst.targets, hyper);

    auto order = shuffled_indices(inst.rows.size(), 999);
    std::vector<FeatureRow> rows2;
    std::vector<double> targets2;
    for (auto idx : order) {
        rows2.push_back(inst.rows[idx]);
        targets2.push_back(inst.targets[idx]);
    }
    const auto shuffled = gbrt::fit_ensemble(rows2, targets2, hyper);
    CHECK(base.to_json().dump() == shuffled.to_json().dump());
}

TEST_CASE("fit is deterministic (canonical serialization equality)") {
    DeterministicRng rng(13);
    const auto inst = random_instance(rng, 40);
    gbrt::Hyperparams hyper;
    hyper.n_estimators = 5;
    const auto a = gbrt::fit_ensemble(inst.rows, inst.targets, hyper);
    const auto b = gbrt::fit_ensemble(inst.rows, inst.targets, hyper);
    CHECK(a.to_json().dump() == b.to_json().dump());
}

TEST_CASE("ensemble json round-trips predictions") {
    DeterministicRng rng(14);
    const auto inst = random_instance(rng, 30);
    gbrt::Hyperparams hyper;
    hyper.n_estimators = 8;
    const auto ensemble = gbrt::fit_ensemble(inst.rows, inst.targets, hyper);
    const auto restored = gbrt::BoostedEnsemble::from_json(ensemble.to_json());
    for (const auto& row : inst.rows) {
        CHECK(restored.predict(row) == ensemble.predict(row));
    }
}

TEST_CASE("predict_year covers every requested country and clamps at zero") {
    // Fit on strongly negative targets so extrapolation goes below zero.
    std::vector<FeatureRow> rows;
    std::vector<double> targets;
    for (int i = 0; i < 10; ++i) {
        rows.push_back({2000.0 + i, static_cast<double>(i % 12)});
        targets.push_back(-50.0 - i);
    }
    gbrt::Hyperparams hyper;
    hyper.n_estimators = 5;
    const auto ensemble = gbrt::fit_ensemble(rows, targets, hyper);

    std::vector<std::string> countries(kSouthAmericaIso.begin(), kSouthAmericaIso.end());
    const auto out = gbrt::predict_year(ensemble, 2050, countries);
    CHECK(out.size() == 12);
    for (const auto& [iso, value] : out) CHECK(value == 0.0);

    const std::vector<std::string> unknown = {"MEX"};
    CHECK_THROWS_AS(gbrt::predict_year(ensemble, 2050, unknown), InputError);
}

TEST_CASE("in-range predictions stay within the additive-model bound") {
    DeterministicRng rng(21);
    const auto inst = random_instance(rng, 50);
    gbrt::Hyperparams hyper;
    hyper.n_estimators = 30;
    hyper.max_depth = 4;
    const auto ensemble = gbrt::fit_ensemble(inst.rows, inst.targets, hyper);
    const auto [lo_it, hi_it] =
        std::minmax_element(inst.targets.begin(), inst.targets.end());
    const double span = *hi_it - *lo_it;
    for (const auto& row : inst.rows) {
        const double pred = ensemble.predict(row);
        CHECK(pred >= *lo_it - span - 1e-9);
        CHECK(pred <= *hi_it + span + 1e-9);
    }
}
