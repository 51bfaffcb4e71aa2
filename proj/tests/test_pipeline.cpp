#include "doctest.h"

#include "renecast/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "renecast/error.hpp"
#include "support.hpp"

using namespace renecast;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spit(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// Small but complete dataset: 3 countries, 2 sources, 1990..2021.
std::string mini_csv() {
    std::ostringstream out;
    out << "country,iso_code,year,source,generation_twh\n";
    const struct {
        const char* name;
        const char* iso;
        double hydro0, hydro_slope, wind0;
        int wind_start;
    } rows[] = {
        {"Brazil", "BRA", 200.0, 3.0, 0.5, 1998},
        {"Chile", "CHL", 12.0, 0.25, 0.2, 2002},
        {"Argentina", "ARG", 20.0, 0.4, 0.3, 2000},
    };
    for (const auto& c : rows) {
        for (int year = 1990; year <= 2021; ++year) {
            out << c.name << "," << c.iso << "," << year << ",hydro,"
                << c.hydro0 + c.hydro_slope * (year - 1990) << "\n";
            if (year >= c.wind_start) {
                out << c.name << "," << c.iso << "," << year << ",wind,"
                    << c.wind0 * (year - c.wind_start + 1) << "\n";
            }
        }
    }
    return out.str();
}

std::string mini_geojson() {
    return R"({"type":"FeatureCollection","features":[
      {"type":"Feature","properties":{"ISO_A3":"BRA"},"geometry":{"type":"Polygon",
        "coordinates":[[[-60,-20],[-40,-20],[-40,0],[-60,0],[-60,-20]]]}},
      {"type":"Feature","properties":{"ISO_A3":"CHL"},"geometry":{"type":"Polygon",
        "coordinates":[[[-72,-50],[-69,-50],[-69,-20],[-72,-20],[-72,-50]]]}},
      {"type":"Feature","properties":{"ISO_A3":"ARG"},"geometry":{"type":"Polygon",
        "coordinates":[[[-69,-50],[-60,-50],[-60,-25],[-69,-25],[-69,-50]]]}}
    ]})";
}

pipeline::RunConfig mini_config(const fs::path& dir) {
    spit(dir / "energy.csv", mini_csv());
    spit(dir / "sa.geojson", mini_geojson());
    nlohmann::json doc = {
        {"data_path", (dir / "energy.csv").string()},
        {"geojson_path", (dir / "sa.geojson").string()},
        {"output_dir", (dir / "out").string()},
        {"horizon_year", 2050},
        {"seed", 42},
        {"gbrt", {{"n_estimators", 30}, {"max_depth", 3}}},
        {"trend", {{"n_simulations", 300}}},
    };
    return pipeline::RunConfig::from_json(doc);
}

}  // namespace

TEST_CASE("config parses with overrides and validates") {
    testsupport::TempDir dir;
    const auto config = mini_config(dir.path());
    CHECK(config.gbrt.n_estimators == 30);
    CHECK(config.gbrt.seed == 42);   // inherited from the run seed
    CHECK(config.trend.seed == 42);
    CHECK(config.horizon_year == 2050);

    nlohmann::json bad = {{"data_path", ""}};
    CHECK_THROWS_AS(pipeline::RunConfig::from_json(bad), InputError);
}

TEST_CASE("ingest summarizes and snapshots the dataset") {
    testsupport::TempDir dir;
    const auto config = mini_config(dir.path());
    const auto summary = pipeline::cmd_ingest(config);
    CHECK(summary.country_count == 3);
    CHECK(summary.series_count == 6);
    CHECK(summary.first_year == 1990);
    CHECK(summary.last_year == 2021);
    CHECK(fs::exists(fs::path(config.output_dir) / pipeline::kSnapshotFile));

    // rerun on unchanged input is byte-identical
    const auto first = slurp(fs::path(config.output_dir) / pipeline::kSnapshotFile);
    pipeline::cmd_ingest(config);
    const auto second = slurp(fs::path(config.output_dir) / pipeline::kSnapshotFile);
    CHECK(first == second);
}

TEST_CASE("ingest rejects data without South American rows") {
    testsupport::TempDir dir;
    auto config = mini_config(dir.path());
    spit(dir.path() / "energy.csv",
         "country,iso_code,year,source,generation_twh\nMexico,MEX,2000,hydro,1\n");
    CHECK_THROWS_AS(pipeline::cmd_ingest(config), InputError);
}

TEST_CASE("forecast writes consistent report and forecast documents") {
    testsupport::TempDir dir;
    const auto config = mini_config(dir.path());
    pipeline::cmd_ingest(config);
    pipeline::cmd_forecast(config);

    const auto report_doc =
        nlohmann::json::parse(slurp(fs::path(config.output_dir) / pipeline::kReportFile));
    const auto report = pipeline::Report::from_json(report_doc);
    CHECK(report.horizon_year == 2050);
    CHECK(report.growth_ratio ==
          doctest::Approx(report.total_horizon_twh / report.baseline_twh).epsilon(1e-12));

    double country_sum = 0.0;
    for (const auto& [iso, v] : report.per_country) country_sum += v;
    CHECK(country_sum == doctest::Approx(report.total_horizon_twh).epsilon(1e-9));
    double source_sum = 0.0;
    for (const auto& [name, v] : report.per_source) source_sum += v;
    CHECK(source_sum == doctest::Approx(report.total_horizon_twh).epsilon(1e-9));

    const auto forecast_doc =
        nlohmann::json::parse(slurp(fs::path(config.output_dir) / pipeline::kForecastFile));
    CHECK(forecast_doc.at("forecasts").size() == 6);  // 3 countries x 2 sources
    CHECK(forecast_doc.at("gbrt").at("per_country_horizon").size() == 3);
    for (const auto& entry : forecast_doc.at("forecasts")) {
        const auto fc = trend::Forecast::from_json(entry);
        REQUIRE(!fc.years.empty());
        CHECK(fc.years.front() == 2022);
        CHECK(fc.years.back() == 2050);
    }
}

TEST_CASE("forecast without a snapshot is an input error") {
    testsupport::TempDir dir;
    const auto config = mini_config(dir.path());
    CHECK_THROWS_AS(pipeline::cmd_forecast(config), InputError);
}

TEST_CASE("validate writes both reports") {
    testsupport::TempDir dir;
    auto config = mini_config(dir.path());
    config.gbrt.n_estimators = 10;  // keep the 5-fold loop quick
    pipeline::cmd_ingest(config);
    const auto tables = pipeline::cmd_validate(config);
    CHECK(tables.find("5-fold") != std::string::npos);
    CHECK(tables.find("MAPE") != std::string::npos);
    CHECK(fs::exists(fs::path(config.output_dir) / pipeline::kCvFile));
    CHECK(fs::exists(fs::path(config.output_dir) / pipeline::kBacktestFile));

    const auto cv_doc =
        nlohmann::json::parse(slurp(fs::path(config.output_dir) / pipeline::kCvFile));
    CHECK(cv_doc.at("k") == 5);
}

TEST_CASE("render produces three well-formed SVG files") {
    testsupport::TempDir dir;
    const auto config = mini_config(dir.path());
    pipeline::cmd_ingest(config);
    pipeline::cmd_forecast(config);
    pipeline::cmd_render(config);

    for (const auto name : {pipeline::kChoroplethFile, pipeline::kStackedFile,
                            pipeline::kShareLinesFile}) {
        const auto path = fs::path(config.output_dir) / name;
        REQUIRE_MESSAGE(fs::exists(path), path.string());
        std::string error;
        CHECK_MESSAGE(testsupport::xml_well_formed(slurp(path), &error),
                      path.string(), ": ", error);
    }

    // The darkest country is the argmax of the per-country totals.
    const auto report = pipeline::Report::from_json(
        nlohmann::json::parse(slurp(fs::path(config.output_dir) / pipeline::kReportFile)));
    const auto argmax =
        std::max_element(report.per_country.begin(), report.per_country.end(),
                         [](const auto& a, const auto& b) { return a.second < b.second; });
    const auto svg = slurp(fs::path(config.output_dir) / pipeline::kChoroplethFile);
    const auto pos = svg.find("data-iso=\"" + argmax->first + "\"");
    REQUIRE(pos != std::string::npos);
    CHECK(svg.substr(pos, 400).find("fill=\"#00441B\"") != std::string::npos);
}

TEST_CASE("render requires forecast artifacts") {
    testsupport::TempDir dir;
    const auto config = mini_config(dir.path());
    pipeline::cmd_ingest(config);
    CHECK_THROWS_AS(pipeline::cmd_render(config), InputError);
}

TEST_CASE("report summarizes the growth ratio") {
    testsupport::TempDir dir;
    const auto config = mini_config(dir.path());
    pipeline::cmd_ingest(config);
    pipeline::cmd_forecast(config);
    const auto text = pipeline::cmd_report(config);
    CHECK(text.find("Growth ratio") != std::string::npos);
    CHECK(text.find("BRA") != std::string::npos);
}

TEST_CASE("the full pipeline is byte-deterministic") {
    testsupport::TempDir dir_a, dir_b;
    auto config_a = mini_config(dir_a.path());
    auto config_b = mini_config(dir_b.path());
    for (auto* config : {&config_a, &config_b}) {
        config->gbrt.n_estimators = 10;
        pipeline::cmd_ingest(*config);
        pipeline::cmd_forecast(*config);
        pipeline::cmd_validate(*config);
        pipeline::cmd_render(*config);
    }
    for (const auto name :
         {pipeline::kSnapshotFile, pipeline::kForecastFile, pipeline::kReportFile,
          pipeline::kCvFile, pipeline::kBacktestFile,
          pipeline::kChoroplethFile, pipeline::kStackedFile, pipeline::kShareLinesFile}) {
        CHECK_MESSAGE(slurp(fs::path(config_a.output_dir) / name) ==
                          slurp(fs::path(config_b.output_dir) / name),
                      name);
    }
}

TEST_CASE("continent_fit mode adds aggregate forecasts") {
    testsupport::TempDir dir;
    auto config = mini_config(dir.path());
    config.continent_fit = true;
    pipeline::cmd_ingest(config);
    pipeline::cmd_forecast(config);
    const auto doc =
        nlohmann::json::parse(slurp(fs::path(config.output_dir) / pipeline::kForecastFile));
    int aggregates = 0;
    for (const auto& entry : doc.at("forecasts")) {
        if (entry.at("country") == "ALL") ++aggregates;
    }
    CHECK(aggregates == static_cast<int>(kAllSources.size()));
    pipeline::cmd_render(config);  // stacked chart uses the aggregate rows
    CHECK(fs::exists(fs::path(config.output_dir) / pipeline::kStackedFile));
}
