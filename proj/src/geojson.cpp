#include "renecast/geojson.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "renecast/error.hpp"
#include "renecast/types.hpp"

#include "json.hpp"

namespace renecast::geo {

namespace {

constexpr double kMinArea = 1e-12;

Ring ring_from_json(const nlohmann::json& coords) {
    Ring ring;
    if (!coords.is_array() || coords.size() < 4) {
        throw InputError("ring must be an array of at least 4 positions");
    }
    for (const auto& position : coords) {
        if (!position.is_array() || position.size() < 2) {
            throw InputError("position must be [lon, lat]");
        }
        LonLat pt{position.at(0).get<double>(), position.at(1).get<double>()};
        if (pt.lon < -180.0 || pt.lon > 180.0 || pt.lat < -90.0 || pt.lat > 90.0) {
            throw InputError("coordinate outside lon [-180,180] / lat [-90,90]");
        }
        ring.points.push_back(pt);
    }
    const LonLat& first = ring.points.front();
    const LonLat& last = ring.points.back();
    if (first.lon != last.lon || first.lat != last.lat) {
        throw InputError("ring is not closed (first point != last point)");
    }
    return ring;
}

void orient(Ring& ring, bool counterclockwise) {
    const double area = signed_area(ring);
    if ((counterclockwise && area < 0.0) || (!counterclockwise && area > 0.0)) {
        std::reverse(ring.points.begin(), ring.points.end());
    }
}

PolygonGeom polygon_from_json(const nlohmann::json& coords) {
    if (!coords.is_array() || coords.empty()) {
        throw InputError("polygon must carry at least an exterior ring");
    }
    PolygonGeom poly;
    poly.exterior = ring_from_json(coords.at(0));
    orient(poly.exterior, true);
    for (std::size_t i = 1; i < coords.size(); ++i) {
        Ring hole = ring_from_json(coords.at(i));
        orient(hole, false);
        poly.holes.push_back(std::move(hole));
    }
    return poly;
}

std::string iso_property(const nlohmann::json& feature) {
    if (!feature.contains("properties") || !feature.at("properties").is_object()) return {};
    const auto& props = feature.at("properties");
    for (const char* key : {"ISO_A3", "ADM0_A3", "iso_a3"}) {
        if (props.contains(key) && props.at(key).is_string()) {
            return props.at(key).get<std::string>();
        }
    }
    return {};
}

// Signed-area accumulation of one ring into the combined centroid sums.
void accumulate(const Ring& ring, double& area2, double& cx, double& cy) {
    const auto& pts = ring.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double cross = pts[i].lon * pts[i + 1].lat - pts[i + 1].lon * pts[i].lat;
        area2 += cross;
        cx += (pts[i].lon + pts[i + 1].lon) * cross;
        cy += (pts[i].lat + pts[i + 1].lat) * cross;
    }
}

}  // namespace

double signed_area(const Ring& ring) {
    double area2 = 0.0;
    const auto& pts = ring.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        area2 += pts[i].lon * pts[i + 1].lat - pts[i + 1].lon * pts[i].lat;
    }
    return 0.5 * area2;
}

LonLat centroid(const CountryGeometry& geometry) {
    double area2 = 0.0, cx = 0.0, cy = 0.0;
    for (const PolygonGeom& poly : geometry.polygons) {
        accumulate(poly.exterior, area2, cx, cy);
        for (const Ring& hole : poly.holes) accumulate(hole, area2, cx, cy);
    }
    const double area = 0.5 * area2;
    if (std::abs(area) <= kMinArea) {
        throw InputError("zero-area geometry for '" + geometry.iso + "'");
    }
    return {cx / (6.0 * area), cy / (6.0 * area)};
}

GeoParseResult parse_geojson(std::string_view text, bool strict) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed GeoJSON: " + std::string(e.what()));
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
        !doc.contains("features") || !doc.at("features").is_array()) {
        throw InputError("GeoJSON root must be a FeatureCollection");
    }

    GeoParseResult result;
    std::set<std::string> seen;
    for (const auto& feature : doc.at("features")) {
        const std::string iso = iso_property(feature);
        if (iso.empty()) {
            if (strict) throw InputError("feature without a usable ISO code property");
            ++result.dropped;
            continue;
        }
        if (!is_south_america(iso)) {
            ++result.dropped;
            continue;
        }
        if (!feature.contains("geometry") || !feature.at("geometry").is_object()) {
            throw InputError("feature '" + iso + "' has no geometry");
        }
        const auto& geometry = feature.at("geometry");
        const std::string type = geometry.value("type", "");

        CountryGeometry country;
        country.iso = iso;
        if (type == "Polygon") {
            country.polygons.push_back(polygon_from_json(geometry.at("coordinates")));
        } else if (type == "MultiPolygon") {
            for (const auto& poly : geometry.at("coordinates")) {
                country.polygons.push_back(polygon_from_json(poly));
            }
        } else {
            throw InputError("feature '" + iso + "' has unsupported geometry type '" +
                             type + "'");
        }
        if (!seen.insert(iso).second) {
            throw InputError("duplicate ISO code '" + iso + "' in GeoJSON");
        }
        country.centroid = centroid(country);
        result.countries.push_back(std::move(country));
    }

    std::sort(result.countries.begin(), result.countries.end(),
              [](const CountryGeometry& a, const CountryGeometry& b) { return a.iso < b.iso; });
    return result;
}

}  // namespace renecast::geo
