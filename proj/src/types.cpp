#include "renecast/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "renecast/error.hpp"

namespace renecast {

namespace {

const std::array<std::string, 6> kSourceNames = {
    "Hydro", "Wind", "Solar", "Biomass", "Geothermal", "OtherRenewable",
};

std::string lowered(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

const std::string& to_string(Source source) {
    return kSourceNames[static_cast<std::size_t>(source)];
}

std::optional<Source> parse_source(std::string_view label) {
    std::string key = lowered(label);
    if (key == "hydro") return Source::Hydro;
    if (key == "wind") return Source::Wind;
    if (key == "solar") return Source::Solar;
    if (key == "biomass") return Source::Biomass;
    if (key == "geothermal") return Source::Geothermal;
    if (key == "otherrenewable" || key == "other_renewable" || key == "other renewable")
        return Source::OtherRenewable;
    return std::nullopt;
}

bool is_south_america(std::string_view iso) {
    return std::find(kSouthAmericaIso.begin(), kSouthAmericaIso.end(), iso) !=
           kSouthAmericaIso.end();
}

void validate(const EnergyRecord& record) {
    if (record.country_iso.size() != 3 ||
        !std::all_of(record.country_iso.begin(), record.country_iso.end(),
                     [](unsigned char c) { return std::isupper(c); })) {
        throw InputError("country_iso must be exactly 3 uppercase letters, got '" +
                         record.country_iso + "'");
    }
    if (record.year < 1900 || record.year > 2100) {
        throw InputError("year " + std::to_string(record.year) +
                         " outside the supported range [1900, 2100]");
    }
    if (record.generation_twh) {
        if (!std::isfinite(*record.generation_twh)) {
            throw InputError("generation must be finite");
        }
        if (*record.generation_twh < 0.0) {
            throw InputError("generation must be non-negative, got " +
                             std::to_string(*record.generation_twh));
        }
    }
}

void validate(const EnergySeries& series) {
    if (series.values.size() != series.years.size() ||
        series.imputed.size() != series.years.size()) {
        throw InputError("series field lengths differ");
    }
    for (std::size_t i = 1; i < series.years.size(); ++i) {
        if (series.years[i] <= series.years[i - 1]) {
            throw InputError("series years must be strictly increasing");
        }
    }
    for (double v : series.values) {
        if (!std::isfinite(v) || v < 0.0) {
            throw InputError("series values must be finite and non-negative");
        }
    }
}

}  // namespace renecast
