#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "renecast/dataset.hpp"
#include "renecast/gbrt.hpp"
#include "renecast/trendcast.hpp"

#include "json.hpp"

namespace renecast::validation {

struct CvReport {
    int k = 5;
    std::vector<MetricReport> per_fold;
    double mean_mae = 0.0;
    double mean_rmse = 0.0;
    /// Mean of the per-fold R2 scores that are defined; folds where R2 is
    /// undefined (constant actuals) are skipped, and their count reported.
    std::optional<double> mean_r2;
    int r2_skipped = 0;

    nlohmann::json to_json() const;
};

/// K-fold cross-validation of the boosted regressor. Indices are shuffled
/// once with DeterministicRng(hyper.seed); fold f collects the shuffled
/// positions congruent to f mod k. Each fold is scored with the model fitted
/// on its complement.
CvReport kfold_cv(std::span<const gbrt::FeatureRow> rows, std::span<const double> targets,
                  int k, const gbrt::Hyperparams& hyper);

struct SourceMape {
    std::optional<double> mape;  // percent; absent when every actual is zero
    int excluded = 0;
};

struct BacktestReport {
    int cutoff_year = 2015;
    int test_first = 2016;
    int test_last = 2020;
    std::map<Source, SourceMape> per_source;
    std::optional<double> mape_min;
    std::optional<double> mape_max;

    nlohmann::json to_json() const;
};

/// Historical backtest of the trend forecaster: for each source the
/// continent-aggregated series is fitted on years <= cutoff_year and scored
/// with MAPE against the held-out window.
BacktestReport backtest(const Dataset& dataset, int cutoff_year, int test_first,
                        int test_last, const trend::TrendConfig& config);

/// Aligned text renderings for the CLI.
std::string format_cv_table(const CvReport& report);
std::string format_backtest_table(const BacktestReport& report);

}  // namespace renecast::validation
