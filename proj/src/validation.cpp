#include "renecast/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "renecast/error.hpp"
#include "renecast/metrics.hpp"
#include "renecast/rng.hpp"

namespace renecast::validation {

namespace {

std::string percent(std::optional<double> value) {
    if (!value) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", *value);
    return buf;
}

}  // namespace

nlohmann::json CvReport::to_json() const {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["k"] = k;
    doc["convention"] = "mean of fold scores";
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& fold : per_fold) {
        nlohmann::json entry;
        entry["mae"] = fold.mae;
        entry["rmse"] = fold.rmse;
        if (fold.r2) entry["r2"] = *fold.r2;
        else entry["r2"] = nullptr;
        if (fold.mape) entry["mape"] = *fold.mape;
        else entry["mape"] = nullptr;
        entry["mape_excluded"] = fold.mape_excluded;
        folds.push_back(std::move(entry));
    }
    doc["per_fold"] = std::move(folds);
    doc["mean_mae"] = mean_mae;
    doc["mean_rmse"] = mean_rmse;
    if (mean_r2) doc["mean_r2"] = *mean_r2;
    else doc["mean_r2"] = nullptr;
    doc["r2_skipped_folds"] = r2_skipped;
    return doc;
}

CvReport kfold_cv(std::span<const gbrt::FeatureRow> rows, std::span<const double> targets,
                  int k, const gbrt::Hyperparams& hyper) {
    if (rows.size() != targets.size()) throw InputError("rows/targets length mismatch");
    if (k < 2) throw InputError("k must be >= 2");
    if (static_cast<std::size_t>(k) > rows.size()) {
        throw InputError("k exceeds the sample count");
    }

    const auto order = shuffled_indices(rows.size(), hyper.seed);

    CvReport report;
    report.k = k;

    for (int fold = 0; fold < k; ++fold) {
        std::vector<gbrt::FeatureRow> train_rows, test_rows;
        std::vector<double> train_y, test_y;
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const std::size_t idx = order[pos];
            if (static_cast<int>(pos % static_cast<std::size_t>(k)) == fold) {
                test_rows.push_back(rows[idx]);
                test_y.push_back(targets[idx]);
            } else {
                train_rows.push_back(rows[idx]);
                train_y.push_back(targets[idx]);
            }
        }
        const auto model = gbrt::fit_ensemble(train_rows, train_y, hyper);
        std::vector<double> predicted;
        predicted.reserve(test_rows.size());
        for (const auto& row : test_rows) predicted.push_back(model.predict(row));
        report.per_fold.push_back(evaluate_metrics(test_y, predicted));
    }

    double mae_sum = 0.0, rmse_sum = 0.0, r2_sum = 0.0;
    int r2_count = 0;
    for (const auto& fold : report.per_fold) {
        mae_sum += fold.mae;
        rmse_sum += fold.rmse;
        if (fold.r2) {
            r2_sum += *fold.r2;
            ++r2_count;
        }
    }
    report.mean_mae = mae_sum / static_cast<double>(k);
    report.mean_rmse = rmse_sum / static_cast<double>(k);
    report.r2_skipped = k - r2_count;
    if (r2_count > 0) report.mean_r2 = r2_sum / static_cast<double>(r2_count);
    return report;
}

nlohmann::json BacktestReport::to_json() const {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["cutoff_year"] = cutoff_year;
    doc["test_years"] = {test_first, test_last};
    nlohmann::json sources;
    for (const auto& [source, entry] : per_source) {
        nlohmann::json item;
        if (entry.mape) item["mape"] = *entry.mape;
        else item["mape"] = nullptr;
        item["excluded"] = entry.excluded;
        sources[to_string(source)] = std::move(item);
    }
    doc["per_source"] = std::move(sources);
    if (mape_min) doc["mape_min"] = *mape_min;
    else doc["mape_min"] = nullptr;
    if (mape_max) doc["mape_max"] = *mape_max;
    else doc["mape_max"] = nullptr;
    return doc;
}

BacktestReport backtest(const Dataset& dataset, int cutoff_year, int test_first,
                        int test_last, const trend::TrendConfig& config) {
    if (test_first <= cutoff_year || test_last < test_first) {
        throw InputError("test window must follow the cutoff year");
    }
    if (dataset.first_year() > cutoff_year || dataset.last_year() < test_last) {
        throw InputError("dataset does not cover the backtest window");
    }

    BacktestReport report;
    report.cutoff_year = cutoff_year;
    report.test_first = test_first;
    report.test_last = test_last;

    const auto years = dataset.year_range();

    for (Source source : kAllSources) {
        const auto totals = dataset.continent_source_totals(source);

        EnergySeries train;
        train.country_iso = "ALL";
        train.source = source;
        std::vector<double> window_actual;
        for (std::size_t i = 0; i < years.size(); ++i) {
            if (years[i] <= cutoff_year) {
                train.years.push_back(years[i]);
                train.values.push_back(totals[i]);
                train.imputed.push_back(false);
            } else if (years[i] >= test_first && years[i] <= test_last) {
                window_actual.push_back(totals[i]);
            }
        }
        // Leakage guard: nothing after the cutoff may enter training.
        for (int y : train.years) {
            if (y > cutoff_year) throw ModelError("backtest leaked post-cutoff data");
        }

        const auto forecast = trend::forecast_source(train, test_last, config);
        std::vector<double> window_pred;
        for (std::size_t i = 0; i < forecast.years.size(); ++i) {
            if (forecast.years[i] >= test_first && forecast.years[i] <= test_last) {
                window_pred.push_back(forecast.point[i]);
            }
        }

        SourceMape entry;
        try {
            const MapeResult result = mape(window_actual, window_pred);
            entry.mape = result.percent;
            entry.excluded = result.excluded;
        } catch (const UndefinedMetricError&) {
            entry.excluded = static_cast<int>(window_actual.size());
        }
        report.per_source[source] = entry;
    }

    for (const auto& [source, entry] : report.per_source) {
        if (!entry.mape) continue;
        if (!report.mape_min || *entry.mape < *report.mape_min) report.mape_min = entry.mape;
        if (!report.mape_max || *entry.mape > *report.mape_max) report.mape_max = entry.mape;
    }
    return report;
}

std::string format_cv_table(const CvReport& report) {
    std::ostringstream out;
    out << report.k << "-fold cross-validation (mean of fold scores)\n";
    out << "fold   mae(TWh)   rmse(TWh)         r2\n";
    char buf[96];
    for (std::size_t i = 0; i < report.per_fold.size(); ++i) {
        const auto& fold = report.per_fold[i];
        if (fold.r2) {
            std::snprintf(buf, sizeof(buf), "%4zu %10.3f %11.3f %10.4f\n", i + 1, fold.mae,
                          fold.rmse, *fold.r2);
        } else {
            std::snprintf(buf, sizeof(buf), "%4zu %10.3f %11.3f %10s\n", i + 1, fold.mae,
                          fold.rmse, "skipped");
        }
        out << buf;
    }
    if (report.mean_r2) {
        std::snprintf(buf, sizeof(buf), "mean %10.3f %11.3f %10.4f\n", report.mean_mae,
                      report.mean_rmse, *report.mean_r2);
    } else {
        std::snprintf(buf, sizeof(buf), "mean %10.3f %11.3f %10s\n", report.mean_mae,
                      report.mean_rmse, "n/a");
    }
    out << buf;
    return out.str();
}

std::string format_backtest_table(const BacktestReport& report) {
    std::ostringstream out;
    out << "backtest: trained through " << report.cutoff_year << ", tested "
        << report.test_first << "-" << report.test_last << "\n";
    out << "source            mape   zero-actual years\n";
    char buf[96];
    for (const auto& [source, entry] : report.per_source) {
        std::snprintf(buf, sizeof(buf), "%-14s %7s %19d\n", to_string(source).c_str(),
                      percent(entry.mape).c_str(), entry.excluded);
        out << buf;
    }
    if (report.mape_min && report.mape_max) {
        std::snprintf(buf, sizeof(buf),
                      "MAPE between %.1f%% and %.1f%% across renewable energy sources\n",
                      *report.mape_min, *report.mape_max);
        out << buf;
    }
    return out.str();
}

}  // namespace renecast::validation
