#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace renecast::geo {

struct LonLat {
    double lon = 0.0;
    double lat = 0.0;
};

/// Closed ring: first point equals the last.
struct Ring {
    std::vector<LonLat> points;
};

struct PolygonGeom {
    Ring exterior;               // counterclockwise after normalization
    std::vector<Ring> holes;     // clockwise after normalization
};

struct CountryGeometry {
    std::string iso;
    std::vector<PolygonGeom> polygons;
    LonLat centroid;  // derived at parse time
};

struct GeoParseResult {
    std::vector<CountryGeometry> countries;
    int dropped = 0;  // features without a South American ISO match
};

/// Parses an RFC 7946 FeatureCollection of Polygon/MultiPolygon features.
/// The ISO code is read from the first present property among ISO_A3,
/// ADM0_A3, iso_a3. Non South American codes are dropped (counted); features
/// without a usable ISO property are dropped too unless `strict`, in which
/// case they are an error. Point or other geometry types, duplicate ISO
/// codes, unclosed rings and out-of-range coordinates are always errors.
/// Ring orientation is normalized (exterior CCW, holes CW).
GeoParseResult parse_geojson(std::string_view text, bool strict = false);

/// Signed shoelace area in degree units; positive for counterclockwise rings.
double signed_area(const Ring& ring);

/// Area-weighted planar centroid over all polygons; holes subtract through
/// their negative signed area. Throws on |total area| <= 1e-12.
LonLat centroid(const CountryGeometry& geometry);

}  // namespace renecast::geo
