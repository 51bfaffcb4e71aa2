#include "support.hpp"

#include <unistd.h>

#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

namespace testsupport {

using renecast::gbrt::FeatureRow;

double naive_mae(const std::vector<double>& actual, const std::vector<double>& predicted) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        total += std::fabs((long double)actual[i] - (long double)predicted[i]);
    }
    return static_cast<double>(total / (long double)actual.size());
}

double naive_rmse(const std::vector<double>& actual, const std::vector<double>& predicted) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const long double d = (long double)actual[i] - (long double)predicted[i];
        total += d * d;
    }
    return static_cast<double>(std::sqrt(total / (long double)actual.size()));
}

double naive_r_squared(const std::vector<double>& actual,
                       const std::vector<double>& predicted) {
    long double mean = 0.0L;
    for (double v : actual) mean += v;
    mean /= (long double)actual.size();
    long double ss_res = 0.0L, ss_tot = 0.0L;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const long double r = (long double)actual[i] - (long double)predicted[i];
        const long double d = (long double)actual[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    return static_cast<double>(1.0L - ss_res / ss_tot);
}

std::pair<std::optional<double>, int> naive_mape(const std::vector<double>& actual,
                                                 const std::vector<double>& predicted) {
    long double total = 0.0L;
    int used = 0, excluded = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) {
            ++excluded;
            continue;
        }
        total += 100.0L * std::fabs((long double)actual[i] - (long double)predicted[i]) /
                 std::fabs((long double)actual[i]);
        ++used;
    }
    if (used == 0) return {std::nullopt, excluded};
    return {static_cast<double>(total / used), excluded};
}

std::vector<std::uint64_t> reference_splitmix64(std::uint64_t seed, std::size_t count) {
    // Same algorithm, deliberately different code path: 128-bit multiplies
    // reduced mod 2^64 and explicit masking throughout.
    const auto mask = [](unsigned __int128 v) {
        return static_cast<std::uint64_t>(v & 0xFFFFFFFFFFFFFFFFull);
    };
    std::vector<std::uint64_t> out;
    out.reserve(count);
    unsigned __int128 state = seed;
    for (std::size_t i = 0; i < count; ++i) {
        state = state + (unsigned __int128)0x9E3779B97F4A7C15ull;
        std::uint64_t z = mask(state);
        z = mask((unsigned __int128)(z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull);
        z = mask((unsigned __int128)(z ^ (z >> 27)) * 0x94D049BB133111EBull);
        out.push_back(z ^ (z >> 31));
    }
    return out;
}

StumpOracle exhaustive_best_stump(const std::vector<FeatureRow>& rows,
                                  const std::vector<double>& targets) {
    const auto feature = [](const FeatureRow& r, int f) {
        return f == 0 ? r.year : r.country_code;
    };
    const auto sse_around_mean = [](const std::vector<double>& ys) {
        if (ys.empty()) return 0.0;
        double mean = 0.0;
        for (double y : ys) mean += y;
        mean /= static_cast<double>(ys.size());
        double sse = 0.0;
        for (double y : ys) sse += (y - mean) * (y - mean);
        return sse;
    };
    const double parent = sse_around_mean(targets);

    StumpOracle best;
    double best_gain = 0.0;
    for (int f = 0; f < 2; ++f) {
        std::vector<double> values;
        for (const auto& r : rows) values.push_back(feature(r, f));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            const double threshold = 0.5 * (values[i] + values[i + 1]);
            std::vector<double> left, right;
            for (std::size_t j = 0; j < rows.size(); ++j) {
                (feature(rows[j], f) <= threshold ? left : right).push_back(targets[j]);
            }
            const double gain = parent - sse_around_mean(left) - sse_around_mean(right);
            if (!best.found || gain > best_gain) {
                double lmean = 0.0, rmean = 0.0;
                for (double y : left) lmean += y;
                for (double y : right) rmean += y;
                best = {true, f, threshold, lmean / left.size(), rmean / right.size()};
                best_gain = gain;
            }
        }
    }
    if (best.found && best_gain <= 1e-12) best.found = false;
    return best;
}

std::vector<double> dense_ls_fitted(const std::vector<std::vector<double>>& design,
                                    const std::vector<double>& y) {
    const std::size_t n = design.size();
    const std::size_t p = design.front().size();
    // normal equations A b = c with A = X'X, c = X'y
    std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < p; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += design[i][j] * design[i][k];
            a[j][k] = s;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += design[i][j] * y[i];
        a[j][p] = s;
    }
    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        if (std::fabs(a[col][col]) < 1e-12) {
            throw std::runtime_error("dense_ls_fitted: singular design");
        }
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double factor = a[r][col] / a[col][col];
            for (std::size_t k = col; k <= p; ++k) a[r][k] -= factor * a[col][k];
        }
    }
    std::vector<double> beta(p);
    for (std::size_t j = 0; j < p; ++j) beta[j] = a[j][p] / a[j][j];

    std::vector<double> fitted(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) fitted[i] += design[i][j] * beta[j];
    }
    return fitted;
}

namespace {

bool point_in_ring(const renecast::geo::Ring& ring, double x, double y) {
    bool inside = false;
    const auto& pts = ring.points;
    for (std::size_t i = 0, j = pts.size() - 2; i + 1 < pts.size(); j = i++) {
        const double xi = pts[i].lon, yi = pts[i].lat;
        const double xj = pts[j].lon, yj = pts[j].lat;
        if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) {
            inside = !inside;
        }
    }
    return inside;
}

bool point_in_geometry(const renecast::geo::CountryGeometry& geometry, double x, double y) {
    for (const auto& poly : geometry.polygons) {
        if (!point_in_ring(poly.exterior, x, y)) continue;
        bool in_hole = false;
        for (const auto& hole : poly.holes) {
            if (point_in_ring(hole, x, y)) {
                in_hole = true;
                break;
            }
        }
        if (!in_hole) return true;
    }
    return false;
}

}  // namespace

renecast::geo::LonLat mc_centroid(const renecast::geo::CountryGeometry& geometry,
                                  std::size_t samples, std::uint64_t seed) {
    double x0 = 1e30, x1 = -1e30, y0 = 1e30, y1 = -1e30;
    for (const auto& poly : geometry.polygons) {
        for (const auto& pt : poly.exterior.points) {
            x0 = std::min(x0, pt.lon);
            x1 = std::max(x1, pt.lon);
            y0 = std::min(y0, pt.lat);
            y1 = std::max(y1, pt.lat);
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    double sx = 0.0, sy = 0.0;
    std::size_t hits = 0;
    while (hits < samples) {
        const double x = ux(rng), y = uy(rng);
        if (point_in_geometry(geometry, x, y)) {
            sx += x;
            sy += y;
            ++hits;
        }
    }
    return {sx / static_cast<double>(hits), sy / static_cast<double>(hits)};
}

bool xml_well_formed(const std::string& text, std::string* error) {
    const auto fail = [&](const std::string& message) {
        if (error) *error = message;
        return false;
    };
    std::vector<std::string> stack;
    std::size_t i = 0;
    const std::size_t n = text.size();
    bool seen_root = false;
    while (i < n) {
        if (text[i] != '<') {
            if (text[i] == '>') return fail("stray '>'");
            ++i;
            continue;
        }
        if (text.compare(i, 2, "<?") == 0) {
            const auto end = text.find("?>", i);
            if (end == std::string::npos) return fail("unterminated prolog");
            i = end + 2;
            continue;
        }
        if (text.compare(i, 2, "</") == 0) {
            const auto end = text.find('>', i);
            if (end == std::string::npos) return fail("unterminated closing tag");
            const std::string name = text.substr(i + 2, end - i - 2);
            if (stack.empty() || stack.back() != name) {
                return fail("mismatched closing tag: " + name);
            }
            stack.pop_back();
            i = end + 1;
            continue;
        }
        // opening tag: read name, then attributes
        std::size_t j = i + 1;
        while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                         text[j] == ':' || text[j] == '-' || text[j] == '_')) {
            ++j;
        }
        if (j == i + 1) return fail("empty tag name");
        const std::string name = text.substr(i + 1, j - i - 1);
        // attributes until '>' or '/>'; quotes must balance
        bool self_closing = false;
        while (j < n) {
            if (text[j] == '"') {
                const auto endq = text.find('"', j + 1);
                if (endq == std::string::npos) return fail("unterminated attribute value");
                j = endq + 1;
            } else if (text[j] == '>') {
                break;
            } else if (text.compare(j, 2, "/>") == 0) {
                self_closing = true;
                ++j;
                break;
            } else if (text[j] == '<') {
                return fail("'<' inside tag");
            } else {
                ++j;
            }
        }
        if (j >= n) return fail("unterminated tag: " + name);
        if (seen_root && stack.empty()) return fail("content after root element");
        if (!self_closing) stack.push_back(name);
        seen_root = true;
        i = j + 1;
    }
    if (!stack.empty()) return fail("unclosed element: " + stack.back());
    if (!seen_root) return fail("no root element");
    return true;
}

renecast::EnergySeries two_segment_series(int first_year, int n, double kink_frac,
                                          double slope1, double slope2,
                                          double start_value) {
    renecast::EnergySeries series;
    series.country_iso = "SYN";
    series.source = renecast::Source::Hydro;
    const double kink = kink_frac * (n - 1);
    for (int i = 0; i < n; ++i) {
        series.years.push_back(first_year + i);
        const double x = static_cast<double>(i);
        const double v = x <= kink ? start_value + slope1 * x
                                   : start_value + slope1 * kink + slope2 * (x - kink);
        series.values.push_back(v);
        series.imputed.push_back(false);
    }
    return series;
}

TempDir::TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("renecast_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

}  // namespace testsupport
