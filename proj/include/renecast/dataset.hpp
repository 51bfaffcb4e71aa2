#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "renecast/types.hpp"

#include "json.hpp"

namespace renecast {

/// Parses long-format CSV with header `country,iso_code,year,source,generation_twh`.
/// Empty generation cells become missing observations. Quoted fields are
/// supported. Throws InputError on a bad header, unknown source label, or an
/// unparseable year/value.
std::vector<EnergyRecord> parse_csv(std::string_view text);

/// Canonical CSV form of a record collection; parse(write_csv(r)) == r.
std::string write_csv(std::span<const EnergyRecord> records);

/// Keeps exactly the 12 sovereign South American ISO codes.
std::vector<EnergyRecord> filter_south_america(std::vector<EnergyRecord> records);

/// A (country, source) series before imputation; values may be missing.
struct RawSeries {
    std::string country_iso;
    Source source = Source::Hydro;
    std::vector<int> years;  // strictly increasing
    std::vector<std::optional<double>> values;
};

/// Fills gaps: internal gaps by linear interpolation between the nearest
/// observed neighbours, leading gaps with 0 (sources genuinely start at zero
/// deployment), trailing gaps by holding the last observed value. Throws
/// InputError when the series has no observed value at all.
EnergySeries impute_series(const RawSeries& raw);

struct SplitPlan {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    double ratio = 0.8;
    std::uint64_t seed = 0;
};

/// Seeded train/test split: Fisher-Yates shuffle of 0..n-1, the first
/// floor(ratio * n) of the shuffled order are train.
SplitPlan split(std::size_t n, double ratio, std::uint64_t seed);

/// Filtered, aligned, imputed energy data. Every series spans the same
/// [first_year, last_year] range (the span of the filtered records), so
/// aggregations and the regression table are rectangular.
class Dataset {
public:
    static Dataset build(std::vector<EnergyRecord> records);

    const std::vector<EnergyRecord>& records() const { return records_; }
    const std::map<std::pair<std::string, Source>, EnergySeries>& series() const {
        return series_;
    }
    const std::vector<std::string>& countries() const { return countries_; }
    int first_year() const { return first_year_; }
    int last_year() const { return last_year_; }
    std::vector<int> year_range() const;
    std::size_t imputed_count() const;

    const EnergySeries* find_series(std::string_view iso, Source source) const;

    /// Sum over this country's sources, one value per year of the span.
    std::vector<double> country_totals(std::string_view iso) const;
    /// Sum over all countries for one source, one value per year of the span.
    std::vector<double> continent_source_totals(Source source) const;
    /// Sum over everything, one value per year of the span.
    std::vector<double> continent_totals() const;

    nlohmann::json to_json() const;
    static Dataset from_json(const nlohmann::json& doc);

    void save(const std::filesystem::path& path) const;
    static Dataset load(const std::filesystem::path& path);

private:
    std::vector<EnergyRecord> records_;
    std::map<std::pair<std::string, Source>, EnergySeries> series_;
    std::vector<std::string> countries_;
    int first_year_ = 0;
    int last_year_ = 0;
};

}  // namespace renecast
