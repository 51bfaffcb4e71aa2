#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace renecast {

enum class Source { Hydro, Wind, Solar, Biomass, Geothermal, OtherRenewable };

inline constexpr std::array<Source, 6> kAllSources = {
    Source::Hydro,      Source::Wind,       Source::Solar,
    Source::Biomass,    Source::Geothermal, Source::OtherRenewable,
};

const std::string& to_string(Source source);

/// Case-insensitive label match; accepts "other_renewable" and
/// "other renewable" spellings for the last category.
std::optional<Source> parse_source(std::string_view label);

/// The 12 sovereign South American states, ascending ISO 3166-1 alpha-3 order.
inline constexpr std::array<std::string_view, 12> kSouthAmericaIso = {
    "ARG", "BOL", "BRA", "CHL", "COL", "ECU",
    "GUY", "PER", "PRY", "SUR", "URY", "VEN",
};

bool is_south_america(std::string_view iso);

/// One observation from the input data. A row that carries an empty
/// generation cell is kept as a missing observation (nullopt), not a zero.
struct EnergyRecord {
    std::string country_name;
    std::string country_iso;  // exactly 3 uppercase letters
    int year = 0;             // [1900, 2100]
    Source source = Source::Hydro;
    std::optional<double> generation_twh;  // >= 0 when present

    friend bool operator==(const EnergyRecord&, const EnergyRecord&) = default;
};

/// Throws InputError when a field violates its invariant.
void validate(const EnergyRecord& record);

/// One complete (country, source) annual series in TWh. Produced by
/// imputation, so there are no gaps; `imputed[i]` marks filled years.
struct EnergySeries {
    std::string country_iso;
    Source source = Source::Hydro;
    std::vector<int> years;      // strictly increasing
    std::vector<double> values;  // TWh, >= 0
    std::vector<bool> imputed;

    std::size_t size() const { return years.size(); }
};

void validate(const EnergySeries& series);

/// Holdout evaluation summary. r2 and mape are absent where the metric is
/// undefined on the evaluated data (constant actuals / all-zero actuals);
/// mape_excluded counts zero-actual points skipped by the MAPE mean.
struct MetricReport {
    double mae = 0.0;   // TWh
    double rmse = 0.0;  // TWh
    std::optional<double> r2;
    std::optional<double> mape;  // percent
    int mape_excluded = 0;
};

}  // namespace renecast
