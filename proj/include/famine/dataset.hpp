#pragma once

#include <algorithm>
#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "famine/catalog.hpp"
#include "famine/csv.hpp"
#include "famine/error.hpp"
#include "famine/numeric.hpp"

namespace famine {

/// ISO 8601 calendar date.
struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  auto operator<=>(const Date&) const = default;

  static std::optional<Date> parse(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto digits = [&](std::size_t pos, std::size_t len, int& out) {
      out = 0;
      for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        out = out * 10 + (s[i] - '0');
      }
      return true;
    };
    int y = 0, m = 0, d = 0;
    if (!digits(0, 4, y) || !digits(5, 2, m) || !digits(8, 2, d)) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{y, static_cast<unsigned>(m), static_cast<unsigned>(d)};
  }

  std::string to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
    return buf;
  }
};

inline bool is_iso3(std::string_view code) {
  return code.size() == 3 && std::all_of(code.begin(), code.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

/// One dated row. `values` is aligned with the owning dataset's catalog;
/// NaN marks a missing value.
struct Observation {
  std::string country;
  std::string admin1;
  Date date;
  double target = 0.0;
  std::vector<double> values;

  friend bool operator==(const Observation& a, const Observation& b) {
    if (a.country != b.country || a.admin1 != b.admin1 || a.date != b.date || a.target != b.target ||
        a.values.size() != b.values.size())
      return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      const double x = a.values[i], y = b.values[i];
      if (!(x == y || (is_missing(x) && is_missing(y)))) return false;
    }
    return true;
  }
};

/// Immutable panel of observations. The catalog may extend the input catalog
/// with auto-registered columns (category Other).
class PanelDataset {
 public:
  PanelDataset(FeatureCatalog catalog, std::vector<std::size_t> columns, std::vector<Observation> observations,
               std::vector<std::string> warnings = {})
      : catalog_(std::move(catalog)),
        columns_(std::move(columns)),
        observations_(std::move(observations)),
        warnings_(std::move(warnings)) {
    if (observations_.empty()) throw DataError("dataset: at least one observation is required");
    for (const auto& o : observations_) {
      if (o.values.size() != catalog_.size()) throw DataError("dataset: observation width does not match catalog");
    }
    for (std::size_t i = 0; i < observations_.size(); ++i) by_country_[observations_[i].country].push_back(i);
    countries_.reserve(by_country_.size());
    for (const auto& [code, _] : by_country_) countries_.push_back(code);
    std::sort(countries_.begin(), countries_.end());
  }

  const FeatureCatalog& catalog() const noexcept { return catalog_; }
  /// Catalog indices of the feature columns present in the source file, in file order.
  const std::vector<std::size_t>& columns() const noexcept { return columns_; }
  const std::vector<Observation>& observations() const noexcept { return observations_; }
  /// Distinct country codes, sorted.
  const std::vector<std::string>& countries() const noexcept { return countries_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  bool has_country(std::string_view code) const { return by_country_.contains(std::string(code)); }

  /// Observation indices for one country, in input order.
  const std::vector<std::size_t>& rows_of(std::string_view code) const {
    auto it = by_country_.find(std::string(code));
    if (it == by_country_.end()) throw DataError("dataset: unknown country code '" + std::string(code) + "'");
    return it->second;
  }

  std::optional<double> value(std::size_t row, std::string_view feature) const {
    auto idx = catalog_.index_of(feature);
    if (!idx) return std::nullopt;
    const double v = observations_.at(row).values[*idx];
    if (is_missing(v)) return std::nullopt;
    return v;
  }

  std::size_t missing_count() const {
    std::size_t n = 0;
    for (const auto& o : observations_)
      for (std::size_t c : columns_) n += is_missing(o.values[c]) ? 1 : 0;
    return n;
  }

  friend bool operator==(const PanelDataset& a, const PanelDataset& b) {
    return a.catalog_ == b.catalog_ && a.columns_ == b.columns_ && a.observations_ == b.observations_;
  }

 private:
  FeatureCatalog catalog_;
  std::vector<std::size_t> columns_;
  std::vector<Observation> observations_;
  std::vector<std::string> warnings_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_country_;
  std::vector<std::string> countries_;
};

/// Parses the comma-delimited panel. Header must name `country`, `date` and
/// `target`; `admin1` is optional; every other column is a feature.
inline PanelDataset parse_dataset(std::istream& in, const FeatureCatalog& input_catalog) {
  csv::Reader reader(in);
  csv::Record header;
  if (!reader.next(header)) throw DataError("dataset: empty input (no header row)");
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  FeatureCatalog catalog = input_catalog;
  std::vector<std::string> warnings;
  std::optional<std::size_t> country_col, admin_col, date_col, target_col;
  std::vector<std::pair<std::size_t, std::size_t>> feature_cols;  // (field index, catalog index)
  std::unordered_map<std::string, std::size_t> seen;

  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& name = header[i];
    if (name.empty()) throw DataError("dataset: header column " + std::to_string(i + 1) + " is empty");
    if (!seen.emplace(name, i).second) throw DataError("dataset: duplicate header column '" + name + "'");
    if (name == "country") country_col = i;
    else if (name == "admin1") admin_col = i;
    else if (name == "date") date_col = i;
    else if (name == "target") target_col = i;
    else {
      if (!catalog.contains(name)) {
        warnings.push_back("feature column '" + name + "' is not in the catalog; registered under category Other");
        catalog.add(FeatureSpec{name, FamineCategory::Other, "auto-registered from dataset header", {}, {}, {}});
      }
      feature_cols.emplace_back(i, *catalog.index_of(name));
    }
  }
  for (auto [col, label] : {std::pair{country_col, "country"}, std::pair{date_col, "date"}, std::pair{target_col, "target"}})
    if (!col) throw DataError(std::string("dataset: missing required column '") + label + "'");

  std::vector<std::size_t> columns;
  columns.reserve(feature_cols.size());
  for (auto [_, c] : feature_cols) columns.push_back(c);

  std::vector<Observation> observations;
  csv::Record rec;
  while (true) {
    const std::size_t line = reader.line();
    if (!reader.next(rec)) break;
    const std::size_t row = observations.size();
    const std::string where = "dataset: row " + std::to_string(row) + " (line " + std::to_string(line) + ")";
    if (rec.size() != header.size())
      throw DataError(where + " has " + std::to_string(rec.size()) + " fields, header has " + std::to_string(header.size()));

    Observation obs;
    obs.country = rec[*country_col];
    if (!is_iso3(obs.country)) throw DataError(where + ": country '" + obs.country + "' is not an ISO 3166-1 alpha-3 code");
    if (admin_col) obs.admin1 = rec[*admin_col];
    auto date = Date::parse(rec[*date_col]);
    if (!date) throw DataError(where + ", column 'date': '" + rec[*date_col] + "' is not an ISO 8601 calendar date");
    obs.date = *date;
    auto target = parse_double(rec[*target_col]);
    if (!target) throw DataError(where + ", column 'target': unparseable number '" + rec[*target_col] + "'");
    obs.target = *target;

    obs.values.assign(catalog.size(), kMissing);
    for (auto [field, cat_idx] : feature_cols) {
      const std::string& cell = rec[field];
      if (cell.find_first_not_of(" \t") == std::string::npos) continue;
      auto v = parse_double(cell);
      if (!v) throw DataError(where + ", column '" + header[field] + "': unparseable number '" + cell + "'");
      obs.values[cat_idx] = *v;
    }
    observations.push_back(std::move(obs));
  }
  if (observations.empty()) throw DataError("dataset: no data rows");
  return PanelDataset(std::move(catalog), std::move(columns), std::move(observations), std::move(warnings));
}

inline PanelDataset parse_dataset(std::string_view raw, const FeatureCatalog& catalog) {
  std::istringstream in{std::string(raw)};
  return parse_dataset(in, catalog);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline PanelDataset load_dataset(const std::string& path, const FeatureCatalog& catalog) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file '" + path + "'");
  return parse_dataset(in, catalog);
}

inline FeatureCatalog load_catalog(const std::string& path) { return parse_catalog(read_text_file(path)); }

/// Writes the dataset back in the delimited format it was parsed from.
inline void write_dataset(std::ostream& out, const PanelDataset& ds) {
  csv::Record header = {"country", "admin1", "date", "target"};
  for (std::size_t c : ds.columns()) header.push_back(ds.catalog()[c].name);
  csv::write_record(out, header);
  csv::Record rec;
  for (const auto& o : ds.observations()) {
    rec = {o.country, o.admin1, o.date.to_string(), format_double(o.target)};
    for (std::size_t c : ds.columns()) rec.push_back(is_missing(o.values[c]) ? std::string() : format_double(o.values[c]));
    csv::write_record(out, rec);
  }
}

}  // namespace famine
