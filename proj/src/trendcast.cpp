#include "renecast/trendcast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "renecast/error.hpp"
#include "renecast/rng.hpp"

namespace renecast::trend {

namespace {

constexpr double kParamTol = 1e-9;
constexpr int kMaxSweeps = 5000;
constexpr double kLaplaceScaleFloor = 1e-8;

double soft_threshold(double value, double penalty) {
    if (value > penalty) return value - penalty;
    if (value < -penalty) return value + penalty;
    return 0.0;
}

double laplace_inverse_cdf(double u, double scale) {
    // u in [0, 1); keep the log argument positive at the extreme draws.
    const double centered = u - 0.5;
    const double inner = std::max(1.0 - 2.0 * std::abs(centered), 1e-300);
    const double magnitude = -scale * std::log(inner);
    return centered < 0.0 ? -magnitude : magnitude;
}

// Quantile with linear interpolation between order statistics (the
// (n-1)*q convention). `sorted` must be ascending.
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    const double h = static_cast<double>(n - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double destandardize(double y_std, const Scaler& scaler) {
    return y_std * scaler.y_std + scaler.y_mean;
}

double standardized_time(int year, const Scaler& scaler) {
    return (static_cast<double>(year) - scaler.t_min) / (scaler.t_max - scaler.t_min);
}

}  // namespace

void validate(const TrendConfig& config) {
    if (config.n_changepoints < 0) throw InputError("n_changepoints must be >= 0");
    if (!(config.changepoint_range > 0.0 && config.changepoint_range <= 1.0))
        throw InputError("changepoint_range must lie in (0, 1]");
    if (!(config.penalty > 0.0)) throw InputError("penalty must be > 0");
    if (!(config.interval_level > 0.0 && config.interval_level < 1.0))
        throw InputError("interval_level must lie in (0, 1)");
    if (config.n_simulations < 2) throw InputError("n_simulations must be >= 2");
}

Standardized standardize(std::span<const int> years, std::span<const double> values) {
    if (years.size() != values.size()) throw InputError("years/values length mismatch");
    if (years.size() < 3) throw InputError("standardize needs at least 3 observations");

    Standardized out;
    out.scaler.t_min = static_cast<double>(years.front());
    out.scaler.t_max = static_cast<double>(years.back());

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    double std_dev = std::sqrt(var);
    if (std_dev < 1e-12) std_dev = 1.0;  // degenerate scale: keep y' finite

    out.scaler.y_mean = mean;
    out.scaler.y_std = std_dev;
    out.t.reserve(years.size());
    out.y.reserve(values.size());
    for (std::size_t i = 0; i < years.size(); ++i) {
        out.t.push_back(standardized_time(years[i], out.scaler));
        out.y.push_back((values[i] - mean) / std_dev);
    }
    return out;
}

std::vector<double> place_changepoints(std::size_t n_obs, const TrendConfig& config) {
    if (n_obs < 3) throw InputError("changepoint placement needs at least 3 observations");
    const int cap = static_cast<int>(
        std::floor(config.changepoint_range * static_cast<double>(n_obs))) - 1;
    const int count = std::max(0, std::min(config.n_changepoints, cap));
    std::vector<double> locations;
    locations.reserve(static_cast<std::size_t>(count));
    for (int j = 1; j <= count; ++j) {
        locations.push_back(static_cast<double>(j) * config.changepoint_range /
                            static_cast<double>(count + 1));
    }
    return locations;
}

double TrendModel::evaluate_std(double t) const {
    double slope = k;
    double offset = m;
    for (std::size_t j = 0; j < changepoints.size(); ++j) {
        if (changepoints[j] <= t) {
            slope += deltas[j];
            offset -= changepoints[j] * deltas[j];
        }
    }
    return slope * t + offset;
}

double TrendModel::terminal_slope_std() const {
    double slope = k;
    for (double d : deltas) slope += d;
    return slope;
}

int TrendModel::nonzero_changepoints() const {
    return static_cast<int>(
        std::count_if(deltas.begin(), deltas.end(), [](double d) { return d != 0.0; }));
}

TrendModel fit_trend(const EnergySeries& series, const TrendConfig& config,
                     FitDiagnostics* diag) {
    validate(config);
    const auto std_data = standardize(series.years, series.values);
    const auto& t = std_data.t;
    const auto& y = std_data.y;
    const std::size_t n = t.size();

    TrendModel model;
    model.scaler = std_data.scaler;
    model.changepoints = place_changepoints(n, config);
    model.deltas.assign(model.changepoints.size(), 0.0);
    const std::size_t n_cp = model.changepoints.size();

    // Hinge design columns h_j(t) = max(0, t - s_j); equivalent to the
    // indicator form of g and convenient for coordinate updates.
    std::vector<std::vector<double>> hinge(n_cp, std::vector<double>(n, 0.0));
    std::vector<double> hinge_sq(n_cp, 0.0);
    for (std::size_t j = 0; j < n_cp; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double h = std::max(0.0, t[i] - model.changepoints[j]);
            hinge[j][i] = h;
            hinge_sq[j] += h * h;
        }
    }

    double t_sum = 0.0, t_sq = 0.0, y_sum = 0.0, ty_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t_sum += t[i];
        t_sq += t[i] * t[i];
        y_sum += y[i];
        ty_sum += t[i] * y[i];
    }

    // OLS initialization for (k, m) on the whole series.
    const double denom = static_cast<double>(n) * t_sq - t_sum * t_sum;
    if (std::abs(denom) < 1e-30) throw ModelError("degenerate time axis");
    model.k = (static_cast<double>(n) * ty_sum - t_sum * y_sum) / denom;
    model.m = (y_sum - model.k * t_sum) / static_cast<double>(n);

    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - (model.k * t[i] + model.m);

    if (diag) {
        diag->objective_per_sweep.clear();
        diag->sweeps = 0;
        diag->converged = false;
    }

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double max_change = 0.0;

        // k: exact least-squares update with everything else fixed.
        double rho_k = 0.0;
        for (std::size_t i = 0; i < n; ++i) rho_k += t[i] * (residual[i] + model.k * t[i]);
        const double k_new = rho_k / t_sq;
        if (k_new != model.k) {
            const double shift = k_new - model.k;
            for (std::size_t i = 0; i < n; ++i) residual[i] -= shift * t[i];
            max_change = std::max(max_change, std::abs(shift));
            model.k = k_new;
        }

        // m: mean of the residual with m removed.
        double rho_m = 0.0;
        for (std::size_t i = 0; i < n; ++i) rho_m += residual[i] + model.m;
        const double m_new = rho_m / static_cast<double>(n);
        if (m_new != model.m) {
            const double shift = m_new - model.m;
            for (std::size_t i = 0; i < n; ++i) residual[i] -= shift;
            max_change = std::max(max_change, std::abs(shift));
            model.m = m_new;
        }

        // Each delta_j: soft-thresholded least-squares update.
        for (std::size_t j = 0; j < n_cp; ++j) {
            if (hinge_sq[j] <= 0.0) continue;
            double rho = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                rho += hinge[j][i] * (residual[i] + model.deltas[j] * hinge[j][i]);
            }
            const double d_new = soft_threshold(rho, config.penalty) / hinge_sq[j];
            if (d_new != model.deltas[j]) {
                const double shift = d_new - model.deltas[j];
                for (std::size_t i = 0; i < n; ++i) residual[i] -= shift * hinge[j][i];
                max_change = std::max(max_change, std::abs(shift));
                model.deltas[j] = d_new;
            }
        }

        if (diag) {
            double sse = 0.0;
            for (double r : residual) sse += r * r;
            double l1 = 0.0;
            for (double d : model.deltas) l1 += std::abs(d);
            diag->objective_per_sweep.push_back(0.5 * sse + config.penalty * l1);
            diag->sweeps = sweep + 1;
        }

        if (max_change < kParamTol) {
            if (diag) diag->converged = true;
            break;
        }
    }
    return model;
}

std::vector<double> predict_point(const TrendModel& model, std::span<const int> years) {
    std::vector<double> out;
    out.reserve(years.size());
    for (int year : years) {
        const double t = standardized_time(year, model.scaler);
        out.push_back(std::max(0.0, destandardize(model.evaluate_std(t), model.scaler)));
    }
    return out;
}

IntervalBand simulate_intervals(const TrendModel& model, std::span<const int> years,
                                const TrendConfig& config) {
    validate(config);
    if (years.empty()) throw InputError("no years requested");
    for (std::size_t i = 0; i < years.size(); ++i) {
        if (static_cast<double>(years[i]) <= model.scaler.t_max) {
            throw InputError("interval simulation requires years strictly after the history");
        }
        if (i > 0 && years[i] <= years[i - 1]) {
            throw InputError("years must be strictly increasing");
        }
    }

    double abs_sum = 0.0;
    int active = 0;
    for (double d : model.deltas) {
        if (d != 0.0) {
            abs_sum += std::abs(d);
            ++active;
        }
    }
    const double laplace_scale =
        active > 0 ? abs_sum / static_cast<double>(active) : kLaplaceScaleFloor;

    // Future changepoints arrive at the historical density: S changepoints
    // over `changepoint_range` units of standardized time.
    const double cp_rate =
        model.changepoints.empty()
            ? 0.0
            : static_cast<double>(model.changepoints.size()) / config.changepoint_range;
    const double horizon_step = 1.0 / (model.scaler.t_max - model.scaler.t_min);

    const std::size_t n_years = years.size();
    const std::size_t n_sims = static_cast<std::size_t>(config.n_simulations);
    std::vector<std::vector<double>> samples(n_years, std::vector<double>(n_sims, 0.0));

    DeterministicRng rng(config.seed);
    const double jump_prob = std::min(1.0, cp_rate * horizon_step);

    for (std::size_t sim = 0; sim < n_sims; ++sim) {
        double extra_slope = 0.0;
        double extra_offset = 0.0;
        double t_prev = 1.0;  // end of history in standardized time
        for (std::size_t i = 0; i < n_years; ++i) {
            const double t = standardized_time(years[i], model.scaler);
            if (rng.next_f64() < jump_prob) {
                // Changepoint at the start of this step; affects this year on.
                extra_slope += laplace_inverse_cdf(rng.next_f64(), laplace_scale);
            }
            extra_offset += extra_slope * (t - t_prev);
            t_prev = t;
            samples[i][sim] = destandardize(model.evaluate_std(t) + extra_offset, model.scaler);
        }
    }

    IntervalBand band;
    band.lo.reserve(n_years);
    band.hi.reserve(n_years);
    const double q_lo = (1.0 - config.interval_level) / 2.0;
    const double q_hi = (1.0 + config.interval_level) / 2.0;
    for (std::size_t i = 0; i < n_years; ++i) {
        std::sort(samples[i].begin(), samples[i].end());
        band.lo.push_back(std::max(0.0, quantile_sorted(samples[i], q_lo)));
        band.hi.push_back(std::max(0.0, quantile_sorted(samples[i], q_hi)));
    }
    return band;
}

nlohmann::json Forecast::to_json() const {
    nlohmann::json doc;
    doc["country"] = country_iso;
    doc["source"] = to_string(source);
    doc["level"] = level;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < years.size(); ++i) {
        rows.push_back({{"year", years[i]},
                        {"point", point[i]},
                        {"lo", lo[i]},
                        {"hi", hi[i]}});
    }
    doc["rows"] = std::move(rows);
    return doc;
}

Forecast Forecast::from_json(const nlohmann::json& doc) {
    Forecast fc;
    fc.country_iso = doc.at("country").get<std::string>();
    const auto source = parse_source(doc.at("source").get<std::string>());
    if (!source) throw InputError("forecast names unknown source");
    fc.source = *source;
    fc.level = doc.at("level").get<double>();
    for (const auto& row : doc.at("rows")) {
        fc.years.push_back(row.at("year").get<int>());
        fc.point.push_back(row.at("point").get<double>());
        fc.lo.push_back(row.at("lo").get<double>());
        fc.hi.push_back(row.at("hi").get<double>());
    }
    return fc;
}

Forecast forecast_source(const EnergySeries& series, int horizon_year,
                         const TrendConfig& config) {
    if (series.years.empty() || horizon_year <= series.years.back()) {
        throw InputError("horizon year must lie after the last observed year");
    }
    const TrendModel model = fit_trend(series, config);

    Forecast fc;
    fc.country_iso = series.country_iso;
    fc.source = series.source;
    fc.level = config.interval_level;
    for (int y = series.years.back() + 1; y <= horizon_year; ++y) fc.years.push_back(y);

    fc.point = predict_point(model, fc.years);

    TrendConfig sim_config = config;
    sim_config.seed =
        config.seed ^ fnv1a64(series.country_iso + "/" + to_string(series.source));
    const IntervalBand band = simulate_intervals(model, fc.years, sim_config);
    fc.lo = band.lo;
    fc.hi = band.hi;
    // Quantile noise must not break lo <= point <= hi.
    for (std::size_t i = 0; i < fc.years.size(); ++i) {
        fc.lo[i] = std::min(fc.lo[i], fc.point[i]);
        fc.hi[i] = std::max(fc.hi[i], fc.point[i]);
    }
    return fc;
}

}  // namespace renecast::trend
