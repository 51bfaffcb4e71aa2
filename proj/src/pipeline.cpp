#include "renecast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "renecast/error.hpp"
#include "renecast/metrics.hpp"

namespace renecast::pipeline {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (!in.good() && !in.eof()) throw IoError("failed reading '" + path.string() + "'");
    return buffer.str();
}

void write_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

nlohmann::json read_json(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw InputError("invalid JSON in '" + path.string() + "': " + e.what());
    }
}

fs::path prepare_output_dir(const RunConfig& config) {
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

Dataset load_snapshot(const RunConfig& config) {
    const fs::path path = fs::path(config.output_dir) / kSnapshotFile;
    if (!fs::exists(path)) {
        throw InputError("dataset snapshot '" + path.string() +
                         "' not found; run `ingest` first");
    }
    return Dataset::load(path);
}

charts::FigureSize size_from_json(const nlohmann::json& doc, charts::FigureSize fallback) {
    if (!doc.is_array() || doc.size() != 2) return fallback;
    return {doc.at(0).get<int>(), doc.at(1).get<int>()};
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
    RunConfig config;
    config.data_path = doc.value("data_path", config.data_path);
    config.geojson_path = doc.value("geojson_path", config.geojson_path);
    config.output_dir = doc.value("output_dir", config.output_dir);
    config.horizon_year = doc.value("horizon_year", config.horizon_year);
    config.baseline_window = doc.value("baseline_window", config.baseline_window);
    config.split_ratio = doc.value("split_ratio", config.split_ratio);
    config.cv_folds = doc.value("cv_folds", config.cv_folds);
    config.backtest_cutoff = doc.value("backtest_cutoff", config.backtest_cutoff);
    config.backtest_end = doc.value("backtest_end", config.backtest_end);
    config.strict_geo = doc.value("strict_geo", config.strict_geo);
    config.continent_fit = doc.value("continent_fit", config.continent_fit);
    config.seed = doc.value("seed", config.seed);

    // One seed drives the whole run unless a section pins its own.
    config.gbrt.seed = config.seed;
    config.trend.seed = config.seed;

    if (doc.contains("gbrt")) {
        const auto& g = doc.at("gbrt");
        config.gbrt.n_estimators = g.value("n_estimators", config.gbrt.n_estimators);
        config.gbrt.learning_rate = g.value("learning_rate", config.gbrt.learning_rate);
        config.gbrt.max_depth = g.value("max_depth", config.gbrt.max_depth);
        config.gbrt.min_samples_split =
            g.value("min_samples_split", config.gbrt.min_samples_split);
        config.gbrt.seed = g.value("seed", config.gbrt.seed);
    }
    if (doc.contains("trend")) {
        const auto& t = doc.at("trend");
        config.trend.n_changepoints = t.value("n_changepoints", config.trend.n_changepoints);
        config.trend.changepoint_range =
            t.value("changepoint_range", config.trend.changepoint_range);
        config.trend.penalty = t.value("penalty", config.trend.penalty);
        config.trend.interval_level = t.value("interval_level", config.trend.interval_level);
        config.trend.n_simulations = t.value("n_simulations", config.trend.n_simulations);
        config.trend.seed = t.value("seed", config.trend.seed);
    }
    if (doc.contains("ramp")) {
        const auto& r = doc.at("ramp");
        config.ramp.low = r.value("low", config.ramp.low);
        config.ramp.high = r.value("high", config.ramp.high);
        config.ramp.missing = r.value("missing", config.ramp.missing);
    }
    if (doc.contains("figures")) {
        const auto& f = doc.at("figures");
        if (f.contains("map")) config.map_size = size_from_json(f.at("map"), config.map_size);
        if (f.contains("chart"))
            config.chart_size = size_from_json(f.at("chart"), config.chart_size);
    }

    if (config.data_path.empty()) throw InputError("config: data_path must not be empty");
    if (config.output_dir.empty()) throw InputError("config: output_dir must not be empty");
    if (config.baseline_window < 1) throw InputError("config: baseline_window must be >= 1");
    gbrt::validate(config.gbrt);
    trend::validate(config.trend);
    charts::validate(config.ramp);
    return config;
}

RunConfig RunConfig::load(const fs::path& path) {
    return from_json(read_json(path));
}

std::string IngestSummary::to_string() const {
    std::ostringstream out;
    out << "records: " << record_count << "\n"
        << "countries: " << country_count << "\n"
        << "series: " << series_count << "\n"
        << "years: " << first_year << "-" << last_year << "\n"
        << "imputed values: " << imputed_count << "\n";
    return out.str();
}

nlohmann::json Report::to_json() const {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["horizon_year"] = horizon_year;
    doc["baseline_years"] = {baseline_first, baseline_last};
    doc["baseline_twh"] = baseline_twh;
    doc["total_horizon_twh"] = total_horizon_twh;
    doc["growth_ratio"] = growth_ratio;
    doc["per_country"] = per_country;
    doc["per_source"] = per_source;
    return doc;
}

Report Report::from_json(const nlohmann::json& doc) {
    Report report;
    report.horizon_year = doc.at("horizon_year").get<int>();
    report.baseline_first = doc.at("baseline_years").at(0).get<int>();
    report.baseline_last = doc.at("baseline_years").at(1).get<int>();
    report.baseline_twh = doc.at("baseline_twh").get<double>();
    report.total_horizon_twh = doc.at("total_horizon_twh").get<double>();
    report.growth_ratio = doc.at("growth_ratio").get<double>();
    report.per_country = doc.at("per_country").get<std::map<std::string, double>>();
    report.per_source = doc.at("per_source").get<std::map<std::string, double>>();
    return report;
}

IngestSummary cmd_ingest(const RunConfig& config) {
    const std::string csv = read_file(config.data_path);
    auto records = filter_south_america(parse_csv(csv));
    if (records.empty()) {
        throw InputError("no South American records in '" + config.data_path + "'");
    }
    const Dataset dataset = Dataset::build(std::move(records));

    const fs::path dir = prepare_output_dir(config);
    dataset.save(dir / kSnapshotFile);

    IngestSummary summary;
    summary.record_count = dataset.records().size();
    summary.series_count = dataset.series().size();
    summary.country_count = dataset.countries().size();
    summary.imputed_count = dataset.imputed_count();
    summary.first_year = dataset.first_year();
    summary.last_year = dataset.last_year();
    return summary;
}

void cmd_forecast(const RunConfig& config) {
    const Dataset dataset = load_snapshot(config);
    if (config.horizon_year <= dataset.last_year()) {
        throw InputError("horizon_year must lie after the last historical year " +
                         std::to_string(dataset.last_year()));
    }

    nlohmann::json forecasts = nlohmann::json::array();
    std::map<std::string, double> per_country;
    std::map<std::string, double> per_source;
    for (const auto& [key, series] : dataset.series()) {
        const trend::Forecast fc =
            trend::forecast_source(series, config.horizon_year, config.trend);
        forecasts.push_back(fc.to_json());
        per_country[key.first] += fc.point.back();
        per_source[to_string(key.second)] += fc.point.back();
    }

    // Continent-level fits per source (the alternative reading of the
    // aggregate forecast); written alongside when requested.
    if (config.continent_fit) {
        const auto years = dataset.year_range();
        for (Source source : kAllSources) {
            EnergySeries aggregate;
            aggregate.country_iso = "ALL";
            aggregate.source = source;
            aggregate.years = years;
            aggregate.values = dataset.continent_source_totals(source);
            aggregate.imputed.assign(years.size(), false);
            forecasts.push_back(
                trend::forecast_source(aggregate, config.horizon_year, config.trend)
                    .to_json());
        }
    }

    // GBRT cross-check, following the 80-20 protocol: fit on the train split,
    // score the holdout, then predict the horizon year.
    const gbrt::RegressionTable table = gbrt::build_table(dataset);
    const SplitPlan plan = split(table.rows.size(), config.split_ratio, config.gbrt.seed);
    std::vector<gbrt::FeatureRow> train_rows, test_rows;
    std::vector<double> train_y, test_y;
    for (std::size_t idx : plan.train_indices) {
        train_rows.push_back(table.rows[idx]);
        train_y.push_back(table.targets[idx]);
    }
    for (std::size_t idx : plan.test_indices) {
        test_rows.push_back(table.rows[idx]);
        test_y.push_back(table.targets[idx]);
    }
    const auto ensemble = gbrt::fit_ensemble(train_rows, train_y, config.gbrt);
    std::vector<double> test_pred;
    test_pred.reserve(test_rows.size());
    for (const auto& row : test_rows) test_pred.push_back(ensemble.predict(row));
    const MetricReport holdout = evaluate_metrics(test_y, test_pred);
    const auto gbrt_horizon =
        gbrt::predict_year(ensemble, config.horizon_year, dataset.countries());

    Report report;
    report.horizon_year = config.horizon_year;
    report.baseline_last = dataset.last_year();
    report.baseline_first =
        std::max(dataset.first_year(), dataset.last_year() - config.baseline_window + 1);
    const auto totals = dataset.continent_totals();
    const auto years = dataset.year_range();
    double baseline_sum = 0.0;
    int baseline_n = 0;
    for (std::size_t i = 0; i < years.size(); ++i) {
        if (years[i] >= report.baseline_first && years[i] <= report.baseline_last) {
            baseline_sum += totals[i];
            ++baseline_n;
        }
    }
    report.baseline_twh = baseline_sum / baseline_n;
    report.per_country = per_country;
    report.per_source = per_source;
    for (const auto& [iso, value] : per_country) report.total_horizon_twh += value;
    if (report.baseline_twh <= 0.0) {
        throw ModelError("baseline generation is zero; growth ratio undefined");
    }
    report.growth_ratio = report.total_horizon_twh / report.baseline_twh;

    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["horizon_year"] = config.horizon_year;
    doc["interval_level"] = config.trend.interval_level;
    doc["forecasts"] = std::move(forecasts);
    nlohmann::json gbrt_doc;
    gbrt_doc["per_country_horizon"] = gbrt_horizon;
    gbrt_doc["holdout"] = {{"mae", holdout.mae},
                           {"rmse", holdout.rmse},
                           {"r2", holdout.r2 ? nlohmann::json(*holdout.r2)
                                             : nlohmann::json(nullptr)}};
    gbrt_doc["model"] = ensemble.to_json();
    doc["gbrt"] = std::move(gbrt_doc);

    const fs::path dir = prepare_output_dir(config);
    write_file(dir / kForecastFile, doc.dump(2) + "\n");
    write_file(dir / kReportFile, report.to_json().dump(2) + "\n");
}

std::string cmd_validate(const RunConfig& config) {
    const Dataset dataset = load_snapshot(config);
    if (dataset.last_year() < config.backtest_end) {
        throw InputError("history ends " + std::to_string(dataset.last_year()) +
                         ", backtest window needs " + std::to_string(config.backtest_end));
    }

    const gbrt::RegressionTable table = gbrt::build_table(dataset);
    const validation::CvReport cv =
        validation::kfold_cv(table.rows, table.targets, config.cv_folds, config.gbrt);
    const validation::BacktestReport bt =
        validation::backtest(dataset, config.backtest_cutoff, config.backtest_cutoff + 1,
                             config.backtest_end, config.trend);

    const fs::path dir = prepare_output_dir(config);
    write_file(dir / kCvFile, cv.to_json().dump(2) + "\n");
    write_file(dir / kBacktestFile, bt.to_json().dump(2) + "\n");

    return validation::format_cv_table(cv) + "\n" + validation::format_backtest_table(bt);
}

void cmd_render(const RunConfig& config) {
    const Dataset dataset = load_snapshot(config);
    const fs::path dir(config.output_dir);
    const fs::path forecast_path = dir / kForecastFile;
    const fs::path report_path = dir / kReportFile;
    if (!fs::exists(forecast_path) || !fs::exists(report_path)) {
        throw InputError("forecast artifacts not found; run `forecast` first");
    }
    if (config.geojson_path.empty()) {
        throw InputError("config: geojson_path must not be empty");
    }

    const nlohmann::json forecast_doc = read_json(forecast_path);
    const Report report = Report::from_json(read_json(report_path));

    const auto geo_result =
        geo::parse_geojson(read_file(config.geojson_path), config.strict_geo);
    if (geo_result.countries.empty()) {
        throw InputError("no South American geometries in '" + config.geojson_path + "'");
    }

    // Choropleth of the horizon-year totals.
    const std::string map_title =
        "Projected renewable generation, " + std::to_string(report.horizon_year);
    const std::string choropleth = charts::render_choropleth(
        geo_result.countries, report.per_country, config.ramp, config.map_size, map_title,
        "TWh");
    write_file(dir / kChoroplethFile, choropleth);

    // Stacked history + forecast, continent aggregate.
    charts::StackedChartData stacked;
    stacked.history_years = dataset.year_range();
    for (Source source : kAllSources) {
        stacked.history[source] = dataset.continent_source_totals(source);
    }
    for (int y = dataset.last_year() + 1; y <= report.horizon_year; ++y) {
        stacked.forecast_years.push_back(y);
    }
    for (Source source : kAllSources) {
        stacked.forecast[source].assign(stacked.forecast_years.size(), 0.0);
    }
    bool have_continent_fit = false;
    for (const auto& entry : forecast_doc.at("forecasts")) {
        if (entry.at("country").get<std::string>() == "ALL") have_continent_fit = true;
    }
    const bool use_continent = config.continent_fit && have_continent_fit;
    for (const auto& entry : forecast_doc.at("forecasts")) {
        const trend::Forecast fc = trend::Forecast::from_json(entry);
        const bool aggregate_row = fc.country_iso == "ALL";
        if (use_continent != aggregate_row) continue;
        auto& accum = stacked.forecast[fc.source];
        for (std::size_t i = 0; i < fc.years.size(); ++i) {
            const auto offset = static_cast<std::size_t>(fc.years[i] -
                                                         stacked.forecast_years.front());
            if (offset < accum.size()) accum[offset] += fc.point[i];
        }
    }
    const std::string stacked_svg = charts::render_stacked_chart(
        stacked, config.chart_size, "Renewable generation, history and forecast");
    write_file(dir / kStackedFile, stacked_svg);

    // Historical shares: per-source percent of total renewable generation,
    // plus the total indexed to its final-year level.
    charts::ShareLinesData shares;
    shares.years = dataset.year_range();
    const auto totals = dataset.continent_totals();
    const auto hydro = dataset.continent_source_totals(Source::Hydro);
    const auto wind = dataset.continent_source_totals(Source::Wind);
    const auto solar = dataset.continent_source_totals(Source::Solar);
    const double total_peak = *std::max_element(totals.begin(), totals.end());
    // Ratio first: (100 * h) / t can land one ulp above 100 when h == t.
    for (std::size_t i = 0; i < totals.size(); ++i) {
        const double denom = totals[i] > 0.0 ? totals[i] : 1.0;
        shares.total.push_back(total_peak > 0.0 ? 100.0 * (totals[i] / total_peak) : 0.0);
        shares.hydro.push_back(100.0 * (hydro[i] / denom));
        shares.wind.push_back(100.0 * (wind[i] / denom));
        shares.solar.push_back(100.0 * (solar[i] / denom));
    }
    const std::string shares_svg = charts::render_share_lines(
        shares, config.chart_size, "Source shares of renewable generation");
    write_file(dir / kShareLinesFile, shares_svg);
}

std::string cmd_report(const RunConfig& config) {
    const fs::path report_path = fs::path(config.output_dir) / kReportFile;
    if (!fs::exists(report_path)) {
        throw InputError("report '" + report_path.string() + "' not found; run `forecast` first");
    }
    const Report report = Report::from_json(read_json(report_path));

    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "Projected renewable generation in %d: %.0f TWh per year\n",
                  report.horizon_year, report.total_horizon_twh);
    out << buf;
    std::snprintf(buf, sizeof(buf), "Baseline (%d-%d mean): %.0f TWh per year\n",
                  report.baseline_first, report.baseline_last, report.baseline_twh);
    out << buf;
    std::snprintf(buf, sizeof(buf), "Growth ratio: %.2fx (%+.0f%%)\n", report.growth_ratio,
                  (report.growth_ratio - 1.0) * 100.0);
    out << buf;

    out << "\nPer country (TWh at horizon):\n";
    std::vector<std::pair<std::string, double>> ranked(report.per_country.begin(),
                                                       report.per_country.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    for (const auto& [iso, value] : ranked) {
        std::snprintf(buf, sizeof(buf), "  %s %10.1f\n", iso.c_str(), value);
        out << buf;
    }
    out << "\nPer source (TWh at horizon):\n";
    for (const auto& [name, value] : report.per_source) {
        std::snprintf(buf, sizeof(buf), "  %-15s %10.1f\n", name.c_str(), value);
        out << buf;
    }
    return out.str();
}

}  // namespace renecast::pipeline
