#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "renecast/charts.hpp"
#include "renecast/dataset.hpp"
#include "renecast/error.hpp"
#include "renecast/gbrt.hpp"
#include "renecast/geojson.hpp"
#include "renecast/metrics.hpp"
#include "renecast/pipeline.hpp"
#include "renecast/rng.hpp"
#include "renecast/trendcast.hpp"
#include "renecast/validation.hpp"

namespace py = pybind11;
using namespace renecast;

namespace {

gbrt::FeatureRow row_from_pair(const std::pair<double, double>& pair) {
    return {pair.first, pair.second};
}

std::vector<gbrt::FeatureRow> rows_from_pairs(
    const std::vector<std::pair<double, double>>& pairs) {
    std::vector<gbrt::FeatureRow> rows;
    rows.reserve(pairs.size());
    for (const auto& p : pairs) rows.push_back(row_from_pair(p));
    return rows;
}

}  // namespace

PYBIND11_MODULE(_renecast, m) {
    m.doc() = "Renewable generation forecasting: deterministic GBRT + changepoint trends";

    // Translators run newest-first: register derived exceptions last.
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<ModelError>(m, "ModelError", PyExc_RuntimeError);
    py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError",
                                                 PyExc_ArithmeticError);

    // core
    py::class_<DeterministicRng>(m, "DeterministicRng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("next_u64", &DeterministicRng::next_u64)
        .def("next_f64", &DeterministicRng::next_f64);

    m.def("fnv1a64", [](const std::string& s) { return fnv1a64(s); }, py::arg("text"));
    m.def("shuffled_indices", &shuffled_indices, py::arg("n"), py::arg("seed"));

    py::enum_<Source>(m, "Source")
        .value("Hydro", Source::Hydro)
        .value("Wind", Source::Wind)
        .value("Solar", Source::Solar)
        .value("Biomass", Source::Biomass)
        .value("Geothermal", Source::Geothermal)
        .value("OtherRenewable", Source::OtherRenewable);

    m.def("mae", [](const std::vector<double>& a, const std::vector<double>& p) {
        return mae(a, p);
    }, py::arg("actual"), py::arg("predicted"));
    m.def("rmse", [](const std::vector<double>& a, const std::vector<double>& p) {
        return rmse(a, p);
    }, py::arg("actual"), py::arg("predicted"));
    m.def("r_squared", [](const std::vector<double>& a, const std::vector<double>& p) {
        return r_squared(a, p);
    }, py::arg("actual"), py::arg("predicted"));
    m.def("mape", [](const std::vector<double>& a, const std::vector<double>& p) {
        const MapeResult r = mape(a, p);
        return py::make_tuple(r.percent, r.excluded);
    }, py::arg("actual"), py::arg("predicted"),
       "Returns (percent, excluded_zero_actual_count).");

    // dataset
    py::class_<EnergyRecord>(m, "EnergyRecord")
        .def(py::init<>())
        .def_readwrite("country_name", &EnergyRecord::country_name)
        .def_readwrite("country_iso", &EnergyRecord::country_iso)
        .def_readwrite("year", &EnergyRecord::year)
        .def_readwrite("source", &EnergyRecord::source)
        .def_readwrite("generation_twh", &EnergyRecord::generation_twh);

    py::class_<EnergySeries>(m, "EnergySeries")
        .def(py::init<>())
        .def_readwrite("country_iso", &EnergySeries::country_iso)
        .def_readwrite("source", &EnergySeries::source)
        .def_readwrite("years", &EnergySeries::years)
        .def_readwrite("values", &EnergySeries::values)
        .def_readwrite("imputed", &EnergySeries::imputed);

    m.def("parse_csv", [](const std::string& text) { return parse_csv(text); },
          py::arg("text"));
    m.def("write_csv", [](const std::vector<EnergyRecord>& records) {
        return write_csv(records);
    }, py::arg("records"));
    m.def("filter_south_america", &filter_south_america, py::arg("records"));
    m.def("impute_series",
          [](const std::string& iso, Source source, const std::vector<int>& years,
             const std::vector<std::optional<double>>& values) {
              RawSeries raw{iso, source, years, values};
              return impute_series(raw);
          },
          py::arg("country_iso"), py::arg("source"), py::arg("years"), py::arg("values"));

    py::class_<SplitPlan>(m, "SplitPlan")
        .def_readonly("train_indices", &SplitPlan::train_indices)
        .def_readonly("test_indices", &SplitPlan::test_indices)
        .def_readonly("ratio", &SplitPlan::ratio)
        .def_readonly("seed", &SplitPlan::seed);
    m.def("split", &split, py::arg("n"), py::arg("ratio"), py::arg("seed"));

    py::class_<Dataset>(m, "Dataset")
        .def_static("build", &Dataset::build, py::arg("records"))
        .def_static("load", &Dataset::load, py::arg("path"))
        .def("save", &Dataset::save, py::arg("path"))
        .def_property_readonly("countries", &Dataset::countries)
        .def_property_readonly("first_year", &Dataset::first_year)
        .def_property_readonly("last_year", &Dataset::last_year)
        .def("year_range", &Dataset::year_range)
        .def("imputed_count", &Dataset::imputed_count)
        .def("country_totals", &Dataset::country_totals, py::arg("iso"))
        .def("continent_source_totals", &Dataset::continent_source_totals, py::arg("source"))
        .def("continent_totals", &Dataset::continent_totals)
        .def("series",
             [](const Dataset& ds, const std::string& iso, Source source) {
                 const EnergySeries* s = ds.find_series(iso, source);
                 return s ? std::optional<EnergySeries>(*s) : std::nullopt;
             },
             py::arg("iso"), py::arg("source"));

    // gbrt
    py::class_<gbrt::Hyperparams>(m, "Hyperparams")
        .def(py::init<>())
        .def_readwrite("n_estimators", &gbrt::Hyperparams::n_estimators)
        .def_readwrite("learning_rate", &gbrt::Hyperparams::learning_rate)
        .def_readwrite("max_depth", &gbrt::Hyperparams::max_depth)
        .def_readwrite("min_samples_split", &gbrt::Hyperparams::min_samples_split)
        .def_readwrite("seed", &gbrt::Hyperparams::seed);

    py::class_<gbrt::BoostedEnsemble>(m, "BoostedEnsemble")
        .def_readonly("base_prediction", &gbrt::BoostedEnsemble::base_prediction)
        .def_property_readonly("n_trees", [](const gbrt::BoostedEnsemble& e) {
            return e.trees.size();
        })
        .def("predict",
             [](const gbrt::BoostedEnsemble& e, double year, double country_code) {
                 return e.predict({year, country_code});
             },
             py::arg("year"), py::arg("country_code"))
        .def("to_json", [](const gbrt::BoostedEnsemble& e) { return e.to_json().dump(); })
        .def_static("from_json", [](const std::string& text) {
            return gbrt::BoostedEnsemble::from_json(nlohmann::json::parse(text));
        });

    m.def("country_ordinal", &gbrt::country_ordinal, py::arg("iso"));
    m.def("fit_ensemble",
          [](const std::vector<std::pair<double, double>>& rows,
             const std::vector<double>& targets, const gbrt::Hyperparams& hyper) {
              return gbrt::fit_ensemble(rows_from_pairs(rows), targets, hyper);
          },
          py::arg("rows"), py::arg("targets"), py::arg("hyper") = gbrt::Hyperparams{},
          "rows: list of (year, country_code) pairs.");
    m.def("predict_year",
          [](const gbrt::BoostedEnsemble& e, int year, const std::vector<std::string>& countries) {
              return gbrt::predict_year(e, year, countries);
          },
          py::arg("ensemble"), py::arg("year"), py::arg("countries"));

    // trendcast
    py::class_<trend::TrendConfig>(m, "TrendConfig")
        .def(py::init<>())
        .def_readwrite("n_changepoints", &trend::TrendConfig::n_changepoints)
        .def_readwrite("changepoint_range", &trend::TrendConfig::changepoint_range)
        .def_readwrite("penalty", &trend::TrendConfig::penalty)
        .def_readwrite("interval_level", &trend::TrendConfig::interval_level)
        .def_readwrite("n_simulations", &trend::TrendConfig::n_simulations)
        .def_readwrite("seed", &trend::TrendConfig::seed);

    py::class_<trend::TrendModel>(m, "TrendModel")
        .def_readonly("k", &trend::TrendModel::k)
        .def_readonly("m", &trend::TrendModel::m)
        .def_readonly("changepoints", &trend::TrendModel::changepoints)
        .def_readonly("deltas", &trend::TrendModel::deltas)
        .def("nonzero_changepoints", &trend::TrendModel::nonzero_changepoints);

    py::class_<trend::Forecast>(m, "Forecast")
        .def_readonly("country_iso", &trend::Forecast::country_iso)
        .def_readonly("source", &trend::Forecast::source)
        .def_readonly("level", &trend::Forecast::level)
        .def_readonly("years", &trend::Forecast::years)
        .def_readonly("point", &trend::Forecast::point)
        .def_readonly("lo", &trend::Forecast::lo)
        .def_readonly("hi", &trend::Forecast::hi)
        .def("to_json", [](const trend::Forecast& f) { return f.to_json().dump(); });

    m.def("fit_trend",
          [](const EnergySeries& series, const trend::TrendConfig& config) {
              return trend::fit_trend(series, config);
          },
          py::arg("series"), py::arg("config") = trend::TrendConfig{});
    m.def("predict_point",
          [](const trend::TrendModel& model, const std::vector<int>& years) {
              return trend::predict_point(model, years);
          },
          py::arg("model"), py::arg("years"));
    m.def("forecast_source", &trend::forecast_source, py::arg("series"),
          py::arg("horizon_year"), py::arg("config") = trend::TrendConfig{});

    // validation
    py::class_<validation::CvReport>(m, "CvReport")
        .def_readonly("k", &validation::CvReport::k)
        .def_readonly("mean_mae", &validation::CvReport::mean_mae)
        .def_readonly("mean_rmse", &validation::CvReport::mean_rmse)
        .def_readonly("mean_r2", &validation::CvReport::mean_r2)
        .def_readonly("r2_skipped", &validation::CvReport::r2_skipped)
        .def("to_json", [](const validation::CvReport& r) { return r.to_json().dump(); });

    py::class_<validation::BacktestReport>(m, "BacktestReport")
        .def_readonly("cutoff_year", &validation::BacktestReport::cutoff_year)
        .def_readonly("mape_min", &validation::BacktestReport::mape_min)
        .def_readonly("mape_max", &validation::BacktestReport::mape_max)
        .def("to_json", [](const validation::BacktestReport& r) { return r.to_json().dump(); });

    m.def("kfold_cv",
          [](const std::vector<std::pair<double, double>>& rows,
             const std::vector<double>& targets, int k, const gbrt::Hyperparams& hyper) {
              return validation::kfold_cv(rows_from_pairs(rows), targets, k, hyper);
          },
          py::arg("rows"), py::arg("targets"), py::arg("k") = 5,
          py::arg("hyper") = gbrt::Hyperparams{});
    m.def("backtest", &validation::backtest, py::arg("dataset"), py::arg("cutoff_year"),
          py::arg("test_first"), py::arg("test_last"),
          py::arg("config") = trend::TrendConfig{});

    // geoviz
    py::class_<geo::CountryGeometry>(m, "CountryGeometry")
        .def_readonly("iso", &geo::CountryGeometry::iso)
        .def_property_readonly("centroid", [](const geo::CountryGeometry& g) {
            return py::make_tuple(g.centroid.lon, g.centroid.lat);
        });

    m.def("parse_geojson",
          [](const std::string& text, bool strict) {
              const auto result = geo::parse_geojson(text, strict);
              return py::make_tuple(result.countries, result.dropped);
          },
          py::arg("text"), py::arg("strict") = false,
          "Returns (countries, dropped_feature_count).");
    m.def("polygon_centroid",
          [](const std::vector<std::vector<std::pair<double, double>>>& rings) {
              geo::CountryGeometry g;
              g.iso = "ANY";
              geo::PolygonGeom poly;
              for (std::size_t i = 0; i < rings.size(); ++i) {
                  geo::Ring ring;
                  for (const auto& [lon, lat] : rings[i]) ring.points.push_back({lon, lat});
                  if (i == 0) poly.exterior = std::move(ring);
                  else poly.holes.push_back(std::move(ring));
              }
              g.polygons.push_back(std::move(poly));
              const auto c = geo::centroid(g);
              return py::make_tuple(c.lon, c.lat);
          },
          py::arg("rings"),
          "Centroid of one polygon given as [exterior, hole, ...] point lists.");

    py::class_<charts::ColorRamp>(m, "ColorRamp")
        .def(py::init<>())
        .def_readwrite("low", &charts::ColorRamp::low)
        .def_readwrite("high", &charts::ColorRamp::high)
        .def_readwrite("missing", &charts::ColorRamp::missing);

    m.def("interpolate_color", &charts::interpolate_color, py::arg("low"), py::arg("high"),
          py::arg("t"));
    m.def("render_choropleth",
          [](const std::vector<geo::CountryGeometry>& geometries,
             const std::map<std::string, double>& values, const charts::ColorRamp& ramp,
             int width, int height, const std::string& title, const std::string& legend) {
              return charts::render_choropleth(geometries, values, ramp, {width, height},
                                               title, legend);
          },
          py::arg("geometries"), py::arg("values"), py::arg("ramp") = charts::ColorRamp{},
          py::arg("width") = 900, py::arg("height") = 900,
          py::arg("title") = "Projected renewable generation",
          py::arg("legend") = "TWh");

    // pipeline
    py::class_<pipeline::RunConfig>(m, "RunConfig")
        .def_static("load", &pipeline::RunConfig::load, py::arg("path"))
        .def_static("from_json_text", [](const std::string& text) {
            return pipeline::RunConfig::from_json(nlohmann::json::parse(text));
        })
        .def_readwrite("data_path", &pipeline::RunConfig::data_path)
        .def_readwrite("geojson_path", &pipeline::RunConfig::geojson_path)
        .def_readwrite("output_dir", &pipeline::RunConfig::output_dir)
        .def_readwrite("horizon_year", &pipeline::RunConfig::horizon_year)
        .def_readwrite("seed", &pipeline::RunConfig::seed);

    m.def("cmd_ingest", [](const pipeline::RunConfig& c) {
        return pipeline::cmd_ingest(c).to_string();
    }, py::arg("config"));
    m.def("cmd_forecast", &pipeline::cmd_forecast, py::arg("config"));
    m.def("cmd_validate", &pipeline::cmd_validate, py::arg("config"));
    m.def("cmd_render", &pipeline::cmd_render, py::arg("config"));
    m.def("cmd_report", &pipeline::cmd_report, py::arg("config"));
}
