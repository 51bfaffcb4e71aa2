#pragma once

// Test-only helpers and independent oracles. Everything here must stay
// independent of the implementation paths it checks: metrics are re-derived
// with direct formula evaluation, the stump search is exhaustive, the least
// squares solve is a dense normal-equation elimination, and the centroid
// oracle is Monte-Carlo sampling.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "renecast/gbrt.hpp"
#include "renecast/geojson.hpp"
#include "renecast/types.hpp"

namespace testsupport {

// ---- independent metric formulas ----
double naive_mae(const std::vector<double>& actual, const std::vector<double>& predicted);
double naive_rmse(const std::vector<double>& actual, const std::vector<double>& predicted);
double naive_r_squared(const std::vector<double>& actual, const std::vector<double>& predicted);
// (percent, excluded); nullopt percent when all actuals are zero
std::pair<std::optional<double>, int> naive_mape(const std::vector<double>& actual,
                                                 const std::vector<double>& predicted);

// ---- independent splitmix64 (different arithmetic path) ----
std::vector<std::uint64_t> reference_splitmix64(std::uint64_t seed, std::size_t count);

// ---- exhaustive depth-1 stump search ----
struct StumpOracle {
    bool found = false;
    int feature = 0;
    double threshold = 0.0;
    double left_value = 0.0;
    double right_value = 0.0;
};
StumpOracle exhaustive_best_stump(const std::vector<renecast::gbrt::FeatureRow>& rows,
                                  const std::vector<double>& targets);

// ---- dense least squares: minimizes ||X b - y||^2, returns fitted values ----
std::vector<double> dense_ls_fitted(const std::vector<std::vector<double>>& design,
                                    const std::vector<double>& y);

// ---- Monte-Carlo centroid oracle (uniform rejection sampling) ----
renecast::geo::LonLat mc_centroid(const renecast::geo::CountryGeometry& geometry,
                                  std::size_t samples, std::uint64_t seed);

// ---- minimal XML well-formedness check ----
bool xml_well_formed(const std::string& text, std::string* error = nullptr);

// ---- synthetic data ----
renecast::EnergySeries two_segment_series(int first_year, int n, double kink_frac,
                                          double slope1, double slope2, double start_value);

// Temporary directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testsupport
