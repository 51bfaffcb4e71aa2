#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "renecast/geojson.hpp"
#include "renecast/types.hpp"

namespace renecast::charts {

struct FigureSize {
    int width = 1000;
    int height = 620;
};

struct ColorRamp {
    std::string low = "#E5F5E0";
    std::string high = "#00441B";
    std::string missing = "#F0F0F0";
};

void validate(const ColorRamp& ramp);

/// Linear RGB interpolation between two #RRGGBB values at t in [0, 1].
std::string interpolate_color(const std::string& low, const std::string& high, double t);

/// Per-source line/stack colors (hydro red, wind blue, solar green per the
/// historical-share figure; the rest documented here).
const std::string& source_color(Source source);

/// Choropleth over an equirectangular projection (linear lon -> x,
/// lat -> y inverted, uniform scale). Countries carrying a value are filled
/// with the ramp at (v - v_min)/(v_max - v_min); a collapsed range paints all
/// valued countries ramp.high; countries without a value get ramp.missing.
/// Every country path carries a data-iso attribute. Throws when `values` is
/// empty.
std::string render_choropleth(std::span<const geo::CountryGeometry> geometries,
                              const std::map<std::string, double>& values,
                              const ColorRamp& ramp, FigureSize size,
                              std::string_view title, std::string_view legend_label);

/// Input for the stacked history/forecast chart. Vectors inside the maps are
/// aligned with the year vectors; missing sources stack as zero.
struct StackedChartData {
    std::vector<int> history_years;
    std::map<Source, std::vector<double>> history;   // TWh per year
    std::vector<int> forecast_years;
    std::map<Source, std::vector<double>> forecast;  // TWh per year
};

/// Stacked bars in fixed source order (Hydro, Wind, Solar, Biomass,
/// Geothermal, OtherRenewable). History bars are opaque, forecast bars have
/// opacity 0.5, and a vertical divider marks the boundary when a forecast is
/// present. Throws when the year ranges overlap or are out of order.
std::string render_stacked_chart(const StackedChartData& data, FigureSize size,
                                 std::string_view title);

/// Percent series for the dual-axis share chart.
struct ShareLinesData {
    std::vector<int> years;
    std::vector<double> total;  // left axis, black
    std::vector<double> hydro;  // left axis, red
    std::vector<double> wind;   // right axis, blue
    std::vector<double> solar;  // right axis, green
};

/// Dual-axis line chart; axes scale independently to their series maxima
/// rounded up to a tick. All values must lie in [0, 100].
std::string render_share_lines(const ShareLinesData& data, FigureSize size,
                               std::string_view title);

}  // namespace renecast::charts
