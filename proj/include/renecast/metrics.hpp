#pragma once

#include <span>

#include "renecast/types.hpp"

namespace renecast {

/// Mean absolute error, (1/n) * sum |y_i - yhat_i|.
double mae(std::span<const double> actual, std::span<const double> predicted);

/// Root mean squared error, sqrt((1/n) * sum (y_i - yhat_i)^2).
double rmse(std::span<const double> actual, std::span<const double> predicted);

/// Coefficient of determination, 1 - SS_res / SS_tot.
/// Throws UndefinedMetricError when the actual sequence is constant
/// (SS_tot == 0); never returns NaN.
double r_squared(std::span<const double> actual, std::span<const double> predicted);

struct MapeResult {
    double percent = 0.0;
    int excluded = 0;  // points skipped because the actual value is zero
};

/// Mean absolute percentage error over points with nonzero actuals.
/// Throws UndefinedMetricError when every actual is zero.
MapeResult mape(std::span<const double> actual, std::span<const double> predicted);

/// All four metrics at once; r2/mape left empty where undefined instead of
/// propagating the error (used by cross-validation fold scoring).
MetricReport evaluate_metrics(std::span<const double> actual,
                              std::span<const double> predicted);

}  // namespace renecast
