#include "renecast/metrics.hpp"

#include <cmath>
#include <string>

#include "renecast/error.hpp"

namespace renecast {

namespace {

void require_paired(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.empty()) {
        throw InputError("metric input must not be empty");
    }
    if (actual.size() != predicted.size()) {
        throw InputError("metric input length mismatch: " + std::to_string(actual.size()) +
                         " vs " + std::to_string(predicted.size()));
    }
}

}  // namespace

double mae(std::span<const double> actual, std::span<const double> predicted) {
    require_paired(actual, predicted);
    double total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        total += std::abs(actual[i] - predicted[i]);
    }
    return total / static_cast<double>(actual.size());
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    require_paired(actual, predicted);
    double total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = actual[i] - predicted[i];
        total += d * d;
    }
    return std::sqrt(total / static_cast<double>(actual.size()));
}

double r_squared(std::span<const double> actual, std::span<const double> predicted) {
    require_paired(actual, predicted);
    if (actual.size() < 2) {
        throw InputError("r_squared needs at least 2 points");
    }
    double mean = 0.0;
    for (double v : actual) mean += v;
    mean /= static_cast<double>(actual.size());

    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double res = actual[i] - predicted[i];
        const double dev = actual[i] - mean;
        ss_res += res * res;
        ss_tot += dev * dev;
    }
    if (ss_tot == 0.0) {
        throw UndefinedMetricError("r_squared undefined: actual sequence is constant");
    }
    return 1.0 - ss_res / ss_tot;
}

MapeResult mape(std::span<const double> actual, std::span<const double> predicted) {
    require_paired(actual, predicted);
    double total = 0.0;
    int used = 0;
    int excluded = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) {
            ++excluded;
            continue;
        }
        total += 100.0 * std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
        ++used;
    }
    if (used == 0) {
        throw UndefinedMetricError("mape undefined: every actual value is zero");
    }
    return {total / static_cast<double>(used), excluded};
}

MetricReport evaluate_metrics(std::span<const double> actual,
                              std::span<const double> predicted) {
    MetricReport report;
    report.mae = mae(actual, predicted);
    report.rmse = rmse(actual, predicted);
    try {
        report.r2 = r_squared(actual, predicted);
    } catch (const UndefinedMetricError&) {
    } catch (const InputError&) {  // single-point fold
    }
    try {
        const MapeResult m = mape(actual, predicted);
        report.mape = m.percent;
        report.mape_excluded = m.excluded;
    } catch (const UndefinedMetricError&) {
        report.mape_excluded = static_cast<int>(actual.size());
    }
    return report;
}

}  // namespace renecast
