#include "renecast/charts.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "renecast/error.hpp"

namespace renecast::charts {

namespace {

const std::map<Source, std::string> kSourceColors = {
    {Source::Hydro, "#CC3311"},         {Source::Wind, "#0077BB"},
    {Source::Solar, "#117733"},         {Source::Biomass, "#DDAA33"},
    {Source::Geothermal, "#AA4499"},    {Source::OtherRenewable, "#BBBBBB"},
};

// Locale-independent fixed formatting; snprintf("%.2f") would follow
// LC_NUMERIC and could emit decimal commas inside SVG attributes.
std::string fmt(double value) {
    char buf[48];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::fixed, 2);
    return std::string(buf, ptr);
}

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct Rgb {
    int r = 0, g = 0, b = 0;
};

Rgb parse_hex(const std::string& hex) {
    if (hex.size() != 7 || hex[0] != '#' ||
        hex.find_first_not_of("0123456789abcdefABCDEF", 1) != std::string::npos) {
        throw InputError("invalid color '" + hex + "', expected #RRGGBB");
    }
    const auto channel = [&](std::size_t offset) {
        return static_cast<int>(std::stoul(hex.substr(offset, 2), nullptr, 16));
    };
    return {channel(1), channel(3), channel(5)};
}

std::string format_hex(const Rgb& rgb) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02X%02X%02X", rgb.r, rgb.g, rgb.b);
    return buf;
}

/// Smallest "nice" value (1, 2, 2.5, 5 times a power of ten) >= x.
double nice_ceiling(double x) {
    if (x <= 0.0) return 1.0;
    const double mag = std::pow(10.0, std::floor(std::log10(x)));
    for (double mult : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (mult * mag >= x - 1e-9 * mag) return mult * mag;
    }
    return 10.0 * mag;
}

std::string svg_open(FigureSize size) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(size.width) + "\" height=\"" + std::to_string(size.height) +
           "\" viewBox=\"0 0 " + std::to_string(size.width) + " " +
           std::to_string(size.height) + "\">\n";
    return out;
}

void add_title(std::string& svg, FigureSize size, std::string_view title) {
    svg += "<text x=\"" + fmt(size.width / 2.0) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"18\">" +
           xml_escape(title) + "</text>\n";
}

struct PlotBox {
    double x0, y0, x1, y1;  // drawing area, y grows downward
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

void add_y_axis(std::string& svg, const PlotBox& box, double max_value, int ticks,
                bool right, std::string_view label, const std::string& color) {
    const double x = right ? box.x1 : box.x0;
    svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(box.y0) + "\" x2=\"" + fmt(x) +
           "\" y2=\"" + fmt(box.y1) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= ticks; ++i) {
        const double value = max_value * i / ticks;
        const double y = box.y1 - box.height() * i / ticks;
        const double tick_x = right ? x + 5 : x - 5;
        svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(tick_x) +
               "\" y2=\"" + fmt(y) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt(right ? x + 8 : x - 8) + "\" y=\"" + fmt(y + 4) +
               "\" text-anchor=\"" + (right ? "start" : "end") +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(value) + "</text>\n";
    }
    const double label_x = right ? x + 44 : x - 48;
    const double label_y = (box.y0 + box.y1) / 2.0;
    svg += "<text x=\"" + fmt(label_x) + "\" y=\"" + fmt(label_y) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" +
           color + "\" transform=\"rotate(" + (right ? "90" : "-90") + " " + fmt(label_x) +
           " " + fmt(label_y) + ")\">" + xml_escape(label) + "</text>\n";
}

void add_x_year_axis(std::string& svg, const PlotBox& box,
                     const std::vector<int>& years,
                     const std::vector<double>& positions) {
    svg += "<line x1=\"" + fmt(box.x0) + "\" y1=\"" + fmt(box.y1) + "\" x2=\"" +
           fmt(box.x1) + "\" y2=\"" + fmt(box.y1) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    if (years.empty()) return;
    const int span = years.back() - years.front();
    const int step = span > 80 ? 20 : span > 30 ? 10 : span > 12 ? 5 : 1;
    for (std::size_t i = 0; i < years.size(); ++i) {
        if (years[i] % step != 0) continue;
        svg += "<line x1=\"" + fmt(positions[i]) + "\" y1=\"" + fmt(box.y1) + "\" x2=\"" +
               fmt(positions[i]) + "\" y2=\"" + fmt(box.y1 + 5) +
               "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt(positions[i]) + "\" y=\"" + fmt(box.y1 + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               std::to_string(years[i]) + "</text>\n";
    }
}

}  // namespace

void validate(const ColorRamp& ramp) {
    parse_hex(ramp.low);
    parse_hex(ramp.high);
    parse_hex(ramp.missing);
}

std::string interpolate_color(const std::string& low, const std::string& high, double t) {
    const Rgb a = parse_hex(low);
    const Rgb b = parse_hex(high);
    t = std::clamp(t, 0.0, 1.0);
    const auto mix = [t](int lo, int hi) {
        return static_cast<int>(std::lround(lo + t * (hi - lo)));
    };
    return format_hex({mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)});
}

const std::string& source_color(Source source) { return kSourceColors.at(source); }

std::string render_choropleth(std::span<const geo::CountryGeometry> geometries,
                              const std::map<std::string, double>& values,
                              const ColorRamp& ramp, FigureSize size,
                              std::string_view title, std::string_view legend_label) {
    validate(ramp);
    if (values.empty()) throw InputError("choropleth needs at least one value");
    if (geometries.empty()) throw InputError("choropleth needs at least one geometry");

    double v_min = std::numeric_limits<double>::infinity();
    double v_max = -std::numeric_limits<double>::infinity();
    for (const auto& [iso, value] : values) {
        v_min = std::min(v_min, value);
        v_max = std::max(v_max, value);
    }
    const bool degenerate = v_max - v_min <= 0.0;

    double lon_min = 180.0, lon_max = -180.0, lat_min = 90.0, lat_max = -90.0;
    for (const auto& country : geometries) {
        for (const auto& poly : country.polygons) {
            for (const auto& pt : poly.exterior.points) {
                lon_min = std::min(lon_min, pt.lon);
                lon_max = std::max(lon_max, pt.lon);
                lat_min = std::min(lat_min, pt.lat);
                lat_max = std::max(lat_max, pt.lat);
            }
        }
    }

    const PlotBox box{16.0, 40.0, size.width - 120.0, size.height - 16.0};
    // Uniform degree scale keeps country shapes undistorted.
    const double scale = std::min(box.width() / (lon_max - lon_min),
                                  box.height() / (lat_max - lat_min));
    const double x_off = box.x0 + (box.width() - scale * (lon_max - lon_min)) / 2.0;
    const double y_off = box.y0 + (box.height() - scale * (lat_max - lat_min)) / 2.0;
    const auto project_x = [&](double lon) { return x_off + scale * (lon - lon_min); };
    const auto project_y = [&](double lat) { return y_off + scale * (lat_max - lat); };

    std::string svg = svg_open(size);
    add_title(svg, size, title);

    for (const auto& country : geometries) {
        std::string path;
        for (const auto& poly : country.polygons) {
            const auto add_ring = [&](const geo::Ring& ring) {
                for (std::size_t i = 0; i + 1 < ring.points.size(); ++i) {
                    path += (i == 0 ? "M" : "L");
                    path += fmt(project_x(ring.points[i].lon)) + "," +
                            fmt(project_y(ring.points[i].lat));
                }
                path += "Z";
            };
            add_ring(poly.exterior);
            for (const auto& hole : poly.holes) add_ring(hole);
        }
        std::string fill = ramp.missing;
        const auto it = values.find(country.iso);
        if (it != values.end()) {
            fill = degenerate ? ramp.high
                              : interpolate_color(ramp.low, ramp.high,
                                                  (it->second - v_min) / (v_max - v_min));
        }
        svg += "<path data-iso=\"" + country.iso + "\" d=\"" + path + "\" fill=\"" + fill +
               "\" fill-rule=\"evenodd\" stroke=\"#FFFFFF\" stroke-width=\"0.8\"/>\n";
    }

    // Legend: vertical ramp with min/max labels.
    const double legend_x = size.width - 96.0;
    const double legend_y0 = 60.0;
    const double legend_h = 180.0;
    const int steps = 10;
    svg += "<g data-role=\"legend\">\n";
    for (int i = 0; i < steps; ++i) {
        const double frac_hi = 1.0 - static_cast<double>(i) / steps;
        const std::string color =
            degenerate ? ramp.high
                       : interpolate_color(ramp.low, ramp.high, frac_hi);
        svg += "<rect x=\"" + fmt(legend_x) + "\" y=\"" +
               fmt(legend_y0 + legend_h * i / steps) + "\" width=\"16\" height=\"" +
               fmt(legend_h / steps) + "\" fill=\"" + color + "\"/>\n";
    }
    svg += "<text x=\"" + fmt(legend_x + 22) + "\" y=\"" + fmt(legend_y0 + 10) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(v_max) + "</text>\n";
    svg += "<text x=\"" + fmt(legend_x + 22) + "\" y=\"" + fmt(legend_y0 + legend_h) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(v_min) + "</text>\n";
    svg += "<text x=\"" + fmt(legend_x + 8) + "\" y=\"" + fmt(legend_y0 + legend_h + 24) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + xml_escape(legend_label) +
           "</text>\n";
    svg += "</g>\n";
    svg += "</svg>\n";
    return svg;
}

std::string render_stacked_chart(const StackedChartData& data, FigureSize size,
                                 std::string_view title) {
    if (data.history_years.empty()) throw InputError("stacked chart needs history years");
    if (!data.forecast_years.empty() &&
        data.forecast_years.front() <= data.history_years.back()) {
        throw InputError("forecast years must lie strictly after the history");
    }
    const auto check_lengths = [](const std::map<Source, std::vector<double>>& values,
                                  std::size_t n, const char* which) {
        for (const auto& [source, series] : values) {
            if (series.size() != n) {
                throw InputError(std::string(which) + " series length mismatch for " +
                                 to_string(source));
            }
        }
    };
    check_lengths(data.history, data.history_years.size(), "history");
    check_lengths(data.forecast, data.forecast_years.size(), "forecast");

    std::vector<int> years = data.history_years;
    years.insert(years.end(), data.forecast_years.begin(), data.forecast_years.end());

    const auto stack_total = [](const std::map<Source, std::vector<double>>& values,
                                std::size_t i) {
        double total = 0.0;
        for (const auto& [source, series] : values) total += series[i];
        return total;
    };
    double max_total = 0.0;
    for (std::size_t i = 0; i < data.history_years.size(); ++i) {
        max_total = std::max(max_total, stack_total(data.history, i));
    }
    for (std::size_t i = 0; i < data.forecast_years.size(); ++i) {
        max_total = std::max(max_total, stack_total(data.forecast, i));
    }
    const double y_max = nice_ceiling(max_total);

    const PlotBox box{70.0, 44.0, size.width - 150.0, size.height - 40.0};
    const double slot = box.width() / static_cast<double>(years.size());
    const double bar_w = slot * 0.85;
    const auto y_of = [&](double value) { return box.y1 - box.height() * value / y_max; };

    std::string svg = svg_open(size);
    add_title(svg, size, title);

    std::vector<double> positions(years.size());
    for (std::size_t i = 0; i < years.size(); ++i) {
        positions[i] = box.x0 + slot * (static_cast<double>(i) + 0.5);
    }

    const auto draw_bars = [&](const std::vector<int>& bar_years,
                               const std::map<Source, std::vector<double>>& values,
                               std::size_t offset, bool forecast) {
        for (std::size_t i = 0; i < bar_years.size(); ++i) {
            double cumulative = 0.0;
            for (Source source : kAllSources) {
                const auto it = values.find(source);
                if (it == values.end()) continue;
                const double value = it->second[i];
                if (value <= 0.0) continue;
                const double y_top = y_of(cumulative + value);
                const double height = y_of(cumulative) - y_top;
                svg += "<rect data-year=\"" + std::to_string(bar_years[i]) +
                       "\" data-source=\"" + to_string(source) + "\" data-role=\"" +
                       (forecast ? "forecast" : "history") + "\" x=\"" +
                       fmt(positions[offset + i] - bar_w / 2.0) + "\" y=\"" + fmt(y_top) +
                       "\" width=\"" + fmt(bar_w) + "\" height=\"" + fmt(height) +
                       "\" fill=\"" + source_color(source) + "\"" +
                       (forecast ? " opacity=\"0.5\"" : "") + "/>\n";
                cumulative += value;
            }
        }
    };
    draw_bars(data.history_years, data.history, 0, false);
    draw_bars(data.forecast_years, data.forecast, data.history_years.size(), true);

    if (!data.forecast_years.empty()) {
        const double divider_x = box.x0 + slot * static_cast<double>(data.history_years.size());
        svg += "<line data-role=\"divider\" x1=\"" + fmt(divider_x) + "\" y1=\"" +
               fmt(box.y0) + "\" x2=\"" + fmt(divider_x) + "\" y2=\"" + fmt(box.y1) +
               "\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>\n";
    }

    add_y_axis(svg, box, y_max, 5, false, "TWh", "#333333");
    add_x_year_axis(svg, box, years, positions);

    // Source legend on the right.
    double legend_y = 60.0;
    svg += "<g data-role=\"legend\">\n";
    for (Source source : kAllSources) {
        svg += "<rect x=\"" + fmt(size.width - 136.0) + "\" y=\"" + fmt(legend_y) +
               "\" width=\"14\" height=\"14\" fill=\"" + source_color(source) + "\"/>\n";
        svg += "<text x=\"" + fmt(size.width - 116.0) + "\" y=\"" + fmt(legend_y + 11) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + to_string(source) +
               "</text>\n";
        legend_y += 22.0;
    }
    svg += "</g>\n";
    svg += "</svg>\n";
    return svg;
}

std::string render_share_lines(const ShareLinesData& data, FigureSize size,
                               std::string_view title) {
    const std::size_t n = data.years.size();
    if (n < 2) throw InputError("share chart needs at least 2 years");
    const auto check = [n](const std::vector<double>& series, const char* name) {
        if (series.size() != n) {
            throw InputError(std::string(name) + " series length mismatch");
        }
        for (double v : series) {
            if (!(v >= 0.0 && v <= 100.0)) {
                throw InputError(std::string(name) + " share outside [0, 100]");
            }
        }
    };
    check(data.total, "total");
    check(data.hydro, "hydro");
    check(data.wind, "wind");
    check(data.solar, "solar");

    const auto max_of = [](std::initializer_list<const std::vector<double>*> seriess) {
        double m = 0.0;
        for (const auto* s : seriess)
            for (double v : *s) m = std::max(m, v);
        return m;
    };
    const double left_max = nice_ceiling(max_of({&data.total, &data.hydro}));
    const double right_max = nice_ceiling(max_of({&data.wind, &data.solar}));

    const PlotBox box{70.0, 44.0, size.width - 80.0, size.height - 40.0};
    std::vector<double> positions(n);
    for (std::size_t i = 0; i < n; ++i) {
        positions[i] = box.x0 + box.width() * (data.years[i] - data.years.front()) /
                                    static_cast<double>(data.years.back() - data.years.front());
    }

    std::string svg = svg_open(size);
    add_title(svg, size, title);

    const auto polyline = [&](const std::vector<double>& series, double axis_max,
                              const std::string& color, const char* axis,
                              const char* name) {
        std::string pts;
        for (std::size_t i = 0; i < n; ++i) {
            if (i) pts.push_back(' ');
            pts += fmt(positions[i]) + "," +
                   fmt(box.y1 - box.height() * series[i] / axis_max);
        }
        svg += "<polyline data-series=\"" + std::string(name) + "\" data-axis=\"" + axis +
               "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" +
               pts + "\"/>\n";
    };
    polyline(data.total, left_max, "#000000", "left", "total");
    polyline(data.hydro, left_max, source_color(Source::Hydro), "left", "hydro");
    polyline(data.wind, right_max, source_color(Source::Wind), "right", "wind");
    polyline(data.solar, right_max, source_color(Source::Solar), "right", "solar");

    add_y_axis(svg, box, left_max, 5, false, "share of renewables (%)", "#000000");
    add_y_axis(svg, box, right_max, 5, true, "wind / solar share (%)", "#555555");
    add_x_year_axis(svg, box, data.years, positions);

    double legend_y = 56.0;
    svg += "<g data-role=\"legend\">\n";
    const auto legend_entry = [&](const std::string& color, std::string_view name) {
        svg += "<line x1=\"" + fmt(box.x0 + 12) + "\" y1=\"" + fmt(legend_y + 6) +
               "\" x2=\"" + fmt(box.x0 + 36) + "\" y2=\"" + fmt(legend_y + 6) +
               "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt(box.x0 + 42) + "\" y=\"" + fmt(legend_y + 10) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + xml_escape(name) +
               "</text>\n";
        legend_y += 18.0;
    };
    legend_entry("#000000", "total");
    legend_entry(source_color(Source::Hydro), "hydro (left)");
    legend_entry(source_color(Source::Wind), "wind (right)");
    legend_entry(source_color(Source::Solar), "solar (right)");
    svg += "</g>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace renecast::charts
