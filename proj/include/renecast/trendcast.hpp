#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "renecast/types.hpp"

#include "json.hpp"

namespace renecast::trend {

struct TrendConfig {
    /// Requested changepoint count; capped by the history length so every
    /// changepoint keeps observations on both sides.
    int n_changepoints = 25;
    /// Changepoints live in (0, changepoint_range] of standardized time.
    double changepoint_range = 0.8;
    /// L1 weight on the slope adjustments, in standardized units. Calibrated
    /// so a clean kink in ~60 annual points is recovered while 5%-level noise
    /// does not spawn spurious changepoints.
    double penalty = 0.02;
    /// Central interval mass (0.8 -> 10%/90% quantiles).
    double interval_level = 0.8;
    int n_simulations = 1000;
    std::uint64_t seed = 42;
};

void validate(const TrendConfig& config);

struct Scaler {
    double t_min = 0.0;
    double t_max = 1.0;
    double y_mean = 0.0;
    double y_std = 1.0;
};

struct Standardized {
    std::vector<double> t;  // in [0, 1]
    std::vector<double> y;  // z-scored
    Scaler scaler;
};

/// t' = (t - t_min)/(t_max - t_min); y' = (y - mean)/std, with unit scale
/// substituted when the (population) std collapses below 1e-12.
/// Needs at least 3 observations.
Standardized standardize(std::span<const int> years, std::span<const double> values);

/// S evenly spaced locations over (0, changepoint_range]:
/// s_j = j * range / (S + 1), j = 1..S. S is the configured count capped at
/// floor(range * n_obs) - 1 (and at 0 from below).
std::vector<double> place_changepoints(std::size_t n_obs, const TrendConfig& config);

/// Piecewise-linear trend:
///   g(t) = (k + sum_{j: s_j <= t} delta_j) * t + (m - sum_{j: s_j <= t} s_j * delta_j)
/// For t beyond the last changepoint this is a straight line with the
/// terminal effective slope, so extrapolation needs no special casing.
struct TrendModel {
    double k = 0.0;  // base slope, standardized units
    double m = 0.0;  // offset
    std::vector<double> changepoints;  // s, strictly increasing in (0, range]
    std::vector<double> deltas;        // slope adjustment at each changepoint
    Scaler scaler;

    double evaluate_std(double t) const;
    double terminal_slope_std() const;
    int nonzero_changepoints() const;
};

struct FitDiagnostics {
    std::vector<double> objective_per_sweep;
    int sweeps = 0;
    bool converged = false;
};

/// Minimizes (1/2) sum (y'_i - g(t'_i))^2 + penalty * sum |delta_j| by cyclic
/// coordinate descent: closed-form least-squares updates for k and m,
/// soft-threshold updates for each delta_j. k, m start from OLS on the whole
/// series, deltas from zero. Stops when the largest parameter change in a
/// sweep falls below 1e-9, or after 5000 sweeps.
TrendModel fit_trend(const EnergySeries& series, const TrendConfig& config,
                     FitDiagnostics* diag = nullptr);

/// Evaluates the trend at the given years, de-standardizes, clamps at 0.
std::vector<double> predict_point(const TrendModel& model, std::span<const int> years);

struct IntervalBand {
    std::vector<double> lo;
    std::vector<double> hi;
};

/// Monte-Carlo prediction band. Each trajectory keeps g(t) through the
/// history, then may gain a changepoint at each future year (Bernoulli with
/// per-unit-time rate S / changepoint_range, the historical density); slope
/// jumps are Laplace(0, b) with b = mean |delta_hat| (floored at 1e-8 when
/// the fit has no active changepoints). Bands are the empirical
/// (1-level)/2 and (1+level)/2 quantiles per year (linear interpolation),
/// clamped at 0. Years must lie strictly after the fitted history.
IntervalBand simulate_intervals(const TrendModel& model, std::span<const int> years,
                                const TrendConfig& config);

struct Forecast {
    std::string country_iso;
    Source source = Source::Hydro;
    double level = 0.8;
    std::vector<int> years;
    std::vector<double> point;  // TWh
    std::vector<double> lo;
    std::vector<double> hi;

    nlohmann::json to_json() const;
    static Forecast from_json(const nlohmann::json& doc);
};

/// fit_trend -> predict_point -> simulate_intervals for the years
/// (last observed year + 1) .. horizon_year. The simulation seed is
/// config.seed XOR fnv1a64("<iso>/<source>") so per-series results do not
/// depend on fit order.
Forecast forecast_source(const EnergySeries& series, int horizon_year,
                         const TrendConfig& config);

}  // namespace renecast::trend
