#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "renecast/charts.hpp"
#include "renecast/dataset.hpp"
#include "renecast/gbrt.hpp"
#include "renecast/trendcast.hpp"
#include "renecast/validation.hpp"

#include "json.hpp"

namespace renecast::pipeline {

// Files written under output_dir.
inline constexpr std::string_view kSnapshotFile = "dataset.json";
inline constexpr std::string_view kForecastFile = "forecast.json";
inline constexpr std::string_view kReportFile = "report.json";
inline constexpr std::string_view kCvFile = "cv_report.json";
inline constexpr std::string_view kBacktestFile = "backtest_report.json";
inline constexpr std::string_view kChoroplethFile = "choropleth.svg";
inline constexpr std::string_view kStackedFile = "stacked_generation.svg";
inline constexpr std::string_view kShareLinesFile = "share_lines.svg";

struct RunConfig {
    std::string data_path;
    std::string geojson_path;
    std::string output_dir = "out";
    int horizon_year = 2050;
    /// Trailing historical years averaged into the growth baseline.
    int baseline_window = 7;
    double split_ratio = 0.8;
    int cv_folds = 5;
    int backtest_cutoff = 2015;
    int backtest_end = 2020;
    bool strict_geo = false;
    /// When set, the stacked chart forecast comes from one model per source
    /// fitted on continent-aggregated series instead of summing the
    /// per-country forecasts.
    bool continent_fit = false;
    std::uint64_t seed = 42;
    gbrt::Hyperparams gbrt;
    trend::TrendConfig trend;
    charts::ColorRamp ramp;
    charts::FigureSize map_size{900, 900};
    charts::FigureSize chart_size{1000, 620};

    static RunConfig from_json(const nlohmann::json& doc);
    static RunConfig load(const std::filesystem::path& path);
};

struct IngestSummary {
    std::size_t record_count = 0;
    std::size_t series_count = 0;
    std::size_t country_count = 0;
    std::size_t imputed_count = 0;
    int first_year = 0;
    int last_year = 0;

    std::string to_string() const;
};

/// Headline quantities computed from the forecast: continent total at the
/// horizon, the recent-history baseline, and their ratio.
struct Report {
    int horizon_year = 2050;
    int baseline_first = 0;
    int baseline_last = 0;
    double baseline_twh = 0.0;
    double total_horizon_twh = 0.0;
    double growth_ratio = 0.0;
    std::map<std::string, double> per_country;  // iso -> TWh at horizon
    std::map<std::string, double> per_source;   // source name -> TWh at horizon

    nlohmann::json to_json() const;
    static Report from_json(const nlohmann::json& doc);
};

/// Parse, filter to South America, impute, and write the dataset snapshot.
IngestSummary cmd_ingest(const RunConfig& config);

/// Fit per-(country, source) trend forecasts to the horizon plus the GBRT
/// cross-check, write forecast.json and report.json.
void cmd_forecast(const RunConfig& config);

/// Run the 5-fold CV and the historical backtest; write both reports and
/// return the rendered text tables.
std::string cmd_validate(const RunConfig& config);

/// Render the choropleth, stacked history/forecast chart, and share-lines
/// chart from the written artifacts.
void cmd_render(const RunConfig& config);

/// Human-readable summary of report.json.
std::string cmd_report(const RunConfig& config);

}  // namespace renecast::pipeline
