#include "renecast/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "renecast/error.hpp"
#include "renecast/rng.hpp"

namespace renecast {

namespace {

constexpr std::string_view kCsvHeader = "country,iso_code,year,source,generation_twh";

// RFC 4180 style field splitting for one line (no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (quoted) {
        throw InputError("line " + std::to_string(line_no) + ": unterminated quote");
    }
    fields.push_back(std::move(current));
    return fields;
}

std::string_view trimmed(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t' || text.front() == '\r'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    return text;
}

std::string upper(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

bool needs_quoting(std::string_view field) {
    return field.find_first_of(",\"\n") != std::string_view::npos;
}

std::string csv_field(std::string_view field) {
    if (!needs_quoting(field)) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace

std::vector<EnergyRecord> parse_csv(std::string_view text) {
    std::vector<EnergyRecord> records;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (trimmed(line).empty()) continue;

        if (!saw_header) {
            if (trimmed(line) != kCsvHeader) {
                throw InputError("missing or unexpected CSV header; expected '" +
                                 std::string(kCsvHeader) + "'");
            }
            saw_header = true;
            continue;
        }

        auto fields = split_csv_line(line, line_no);
        if (fields.size() != 5) {
            throw InputError("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                             std::to_string(fields.size()));
        }
        EnergyRecord record;
        record.country_name = std::string(trimmed(fields[0]));
        record.country_iso = upper(trimmed(fields[1]));

        const std::string_view year_text = trimmed(fields[2]);
        int year = 0;
        auto [yp, yec] = std::from_chars(year_text.data(), year_text.data() + year_text.size(), year);
        if (yec != std::errc{} || yp != year_text.data() + year_text.size()) {
            throw InputError("line " + std::to_string(line_no) + ": unparseable year '" +
                             std::string(year_text) + "'");
        }
        record.year = year;

        const std::string_view source_text = trimmed(fields[3]);
        const auto source = parse_source(source_text);
        if (!source) {
            throw InputError("line " + std::to_string(line_no) + ": unknown source '" +
                             std::string(source_text) + "'");
        }
        record.source = *source;

        const std::string_view value_text = trimmed(fields[4]);
        if (!value_text.empty()) {
            double value = 0.0;
            auto [vp, vec] =
                std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
            if (vec != std::errc{} || vp != value_text.data() + value_text.size()) {
                throw InputError("line " + std::to_string(line_no) + ": unparseable value '" +
                                 std::string(value_text) + "'");
            }
            record.generation_twh = value;
        }

        try {
            validate(record);
        } catch (const InputError& e) {
            throw InputError("line " + std::to_string(line_no) + ": " + e.what());
        }
        records.push_back(std::move(record));
    }
    if (!saw_header) {
        throw InputError("missing or unexpected CSV header; expected '" +
                         std::string(kCsvHeader) + "'");
    }
    return records;
}

std::string write_csv(std::span<const EnergyRecord> records) {
    std::string out(kCsvHeader);
    out.push_back('\n');
    for (const auto& r : records) {
        out += csv_field(r.country_name);
        out.push_back(',');
        out += r.country_iso;
        out.push_back(',');
        out += std::to_string(r.year);
        out.push_back(',');
        out += to_string(r.source);
        out.push_back(',');
        if (r.generation_twh) out += format_double(*r.generation_twh);
        out.push_back('\n');
    }
    return out;
}

std::vector<EnergyRecord> filter_south_america(std::vector<EnergyRecord> records) {
    std::erase_if(records,
                  [](const EnergyRecord& r) { return !is_south_america(r.country_iso); });
    return records;
}

EnergySeries impute_series(const RawSeries& raw) {
    if (raw.years.size() != raw.values.size()) {
        throw InputError("raw series years/values length mismatch");
    }
    const std::size_t n = raw.years.size();
    std::size_t first_obs = n;
    std::size_t last_obs = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (raw.values[i]) {
            if (first_obs == n) first_obs = i;
            last_obs = i;
        }
    }
    if (first_obs == n) {
        throw InputError("series (" + raw.country_iso + ", " + to_string(raw.source) +
                         ") has no observed value");
    }

    EnergySeries out;
    out.country_iso = raw.country_iso;
    out.source = raw.source;
    out.years = raw.years;
    out.values.assign(n, 0.0);
    out.imputed.assign(n, false);

    for (std::size_t i = 0; i < n; ++i) {
        if (raw.values[i]) {
            out.values[i] = *raw.values[i];
            continue;
        }
        out.imputed[i] = true;
        if (i < first_obs) {
            out.values[i] = 0.0;  // leading gap: source not yet deployed
        } else if (i > last_obs) {
            out.values[i] = *raw.values[last_obs];  // trailing gap: hold last
        } else {
            // Internal gap: interpolate between nearest observed neighbours,
            // linear in the year axis.
            std::size_t lo = i;
            while (!raw.values[lo]) --lo;
            std::size_t hi = i;
            while (!raw.values[hi]) ++hi;
            const double t = static_cast<double>(raw.years[i] - raw.years[lo]) /
                             static_cast<double>(raw.years[hi] - raw.years[lo]);
            out.values[i] = *raw.values[lo] + t * (*raw.values[hi] - *raw.values[lo]);
        }
    }
    validate(out);
    return out;
}

SplitPlan split(std::size_t n, double ratio, std::uint64_t seed) {
    if (n < 2) {
        throw InputError("split needs at least 2 samples");
    }
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw InputError("split ratio must lie in (0, 1)");
    }
    SplitPlan plan;
    plan.ratio = ratio;
    plan.seed = seed;
    const auto order = shuffled_indices(n, seed);
    const auto n_train =
        static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
    plan.train_indices.assign(order.begin(), order.begin() + n_train);
    plan.test_indices.assign(order.begin() + n_train, order.end());
    return plan;
}

Dataset Dataset::build(std::vector<EnergyRecord> records) {
    Dataset ds;
    if (records.empty()) {
        throw InputError("cannot build a dataset from zero records");
    }
    for (const auto& r : records) validate(r);

    std::set<std::tuple<std::string, Source, int>> seen;
    for (const auto& r : records) {
        if (!seen.emplace(r.country_iso, r.source, r.year).second) {
            throw InputError("duplicate observation for (" + r.country_iso + ", " +
                             to_string(r.source) + ", " + std::to_string(r.year) + ")");
        }
    }

    ds.first_year_ = records.front().year;
    ds.last_year_ = records.front().year;
    for (const auto& r : records) {
        ds.first_year_ = std::min(ds.first_year_, r.year);
        ds.last_year_ = std::max(ds.last_year_, r.year);
    }

    std::map<std::pair<std::string, Source>, std::map<int, std::optional<double>>> grouped;
    std::set<std::string> countries;
    for (const auto& r : records) {
        grouped[{r.country_iso, r.source}][r.year] = r.generation_twh;
        countries.insert(r.country_iso);
    }

    for (const auto& [key, by_year] : grouped) {
        RawSeries raw;
        raw.country_iso = key.first;
        raw.source = key.second;
        for (int y = ds.first_year_; y <= ds.last_year_; ++y) {
            raw.years.push_back(y);
            const auto it = by_year.find(y);
            raw.values.push_back(it == by_year.end() ? std::nullopt : it->second);
        }
        ds.series_.emplace(key, impute_series(raw));
    }

    ds.countries_.assign(countries.begin(), countries.end());
    ds.records_ = std::move(records);
    return ds;
}

std::vector<int> Dataset::year_range() const {
    std::vector<int> years;
    years.reserve(static_cast<std::size_t>(last_year_ - first_year_ + 1));
    for (int y = first_year_; y <= last_year_; ++y) years.push_back(y);
    return years;
}

std::size_t Dataset::imputed_count() const {
    std::size_t count = 0;
    for (const auto& [key, series] : series_) {
        count += static_cast<std::size_t>(
            std::count(series.imputed.begin(), series.imputed.end(), true));
    }
    return count;
}

const EnergySeries* Dataset::find_series(std::string_view iso, Source source) const {
    const auto it = series_.find({std::string(iso), source});
    return it == series_.end() ? nullptr : &it->second;
}

std::vector<double> Dataset::country_totals(std::string_view iso) const {
    std::vector<double> totals(static_cast<std::size_t>(last_year_ - first_year_ + 1), 0.0);
    for (const auto& [key, series] : series_) {
        if (key.first != iso) continue;
        for (std::size_t i = 0; i < series.values.size(); ++i) totals[i] += series.values[i];
    }
    return totals;
}

std::vector<double> Dataset::continent_source_totals(Source source) const {
    std::vector<double> totals(static_cast<std::size_t>(last_year_ - first_year_ + 1), 0.0);
    for (const auto& [key, series] : series_) {
        if (key.second != source) continue;
        for (std::size_t i = 0; i < series.values.size(); ++i) totals[i] += series.values[i];
    }
    return totals;
}

std::vector<double> Dataset::continent_totals() const {
    std::vector<double> totals(static_cast<std::size_t>(last_year_ - first_year_ + 1), 0.0);
    for (const auto& [key, series] : series_) {
        for (std::size_t i = 0; i < series.values.size(); ++i) totals[i] += series.values[i];
    }
    return totals;
}

nlohmann::json Dataset::to_json() const {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["first_year"] = first_year_;
    doc["last_year"] = last_year_;
    doc["countries"] = countries_;

    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : records_) {
        nlohmann::json row = nlohmann::json::array();
        row.push_back(r.country_name);
        row.push_back(r.country_iso);
        row.push_back(r.year);
        row.push_back(to_string(r.source));
        if (r.generation_twh) row.push_back(*r.generation_twh);
        else row.push_back(nullptr);
        records.push_back(std::move(row));
    }
    doc["records"] = std::move(records);

    nlohmann::json series = nlohmann::json::array();
    for (const auto& [key, s] : series_) {
        nlohmann::json entry;
        entry["country"] = key.first;
        entry["source"] = to_string(key.second);
        entry["values"] = s.values;
        entry["imputed"] = s.imputed;
        series.push_back(std::move(entry));
    }
    doc["series"] = std::move(series);
    return doc;
}

Dataset Dataset::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || doc.value("format_version", 0) != 1) {
        throw InputError("unsupported dataset snapshot format");
    }
    Dataset ds;
    ds.first_year_ = doc.at("first_year").get<int>();
    ds.last_year_ = doc.at("last_year").get<int>();
    ds.countries_ = doc.at("countries").get<std::vector<std::string>>();

    for (const auto& row : doc.at("records")) {
        EnergyRecord r;
        r.country_name = row.at(0).get<std::string>();
        r.country_iso = row.at(1).get<std::string>();
        r.year = row.at(2).get<int>();
        const auto source = parse_source(row.at(3).get<std::string>());
        if (!source) throw InputError("snapshot names unknown source");
        r.source = *source;
        if (!row.at(4).is_null()) r.generation_twh = row.at(4).get<double>();
        ds.records_.push_back(std::move(r));
    }

    const auto years = ds.year_range();
    for (const auto& entry : doc.at("series")) {
        EnergySeries s;
        s.country_iso = entry.at("country").get<std::string>();
        const auto source = parse_source(entry.at("source").get<std::string>());
        if (!source) throw InputError("snapshot names unknown source");
        s.source = *source;
        s.years = years;
        s.values = entry.at("values").get<std::vector<double>>();
        s.imputed = entry.at("imputed").get<std::vector<bool>>();
        validate(s);
        ds.series_.emplace(std::make_pair(s.country_iso, s.source), std::move(s));
    }
    return ds;
}

void Dataset::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << to_json().dump(2) << '\n';
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

Dataset Dataset::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("invalid dataset snapshot: " + std::string(e.what()));
    }
    return from_json(doc);
}

}  // namespace renecast
