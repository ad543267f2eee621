#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "famine/catalog.hpp"
#include "famine/csv.hpp"
#include "famine/dataset.hpp"
#include "famine/error.hpp"
#include "famine/rng.hpp"

namespace famine {

enum class SignalShape { Linear, Nonlinear };

inline std::string_view to_string(SignalShape s) { return s == SignalShape::Linear ? "linear" : "nonlinear"; }

/// Planted-signal fixture description. Each country's target is
/// 50 + sum of `signal_weight * g(u)` over `signal_features` standardized
/// drivers from its planted category, plus N(0, noise^2). g is the identity
/// (Linear) or a steep smooth step 1.5*tanh(4u) (Nonlinear).
struct SyntheticSpec {
  std::size_t natural = 4;
  std::size_t economic = 4;
  std::size_t conflict = 4;
  std::size_t rows_per_country = 600;
  double noise = 3.0;
  std::uint64_t seed = 0;
  SignalShape shape = SignalShape::Nonlinear;
  std::size_t signal_features = 2;
  double signal_weight = 9.0;
  std::size_t admin_units = 10;
  // Non-signal features per country observed in only ~35% of rows.
  std::size_t sparse_features = 2;
  // Probability that any non-signal cell is missing.
  double missing_rate = 0.02;
  // Correlation between features that share a latent driver (same quantity,
  // different aggregation window).
  double group_correlation = 0.8;

  void check() const {
    if (natural == 0 || economic == 0 || conflict == 0)
      throw UsageError("synthetic spec needs at least one country per planted category");
    if (rows_per_country < 2) throw UsageError("synthetic spec needs at least 2 rows per country");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw UsageError("synthetic noise must be a finite value >= 0");
    if (signal_features == 0) throw UsageError("synthetic spec needs at least one signal feature");
    if (admin_units == 0) throw UsageError("synthetic spec needs at least one admin unit");
    if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw UsageError("missing_rate must lie in [0, 1)");
    if (!(group_correlation >= 0.0 && group_correlation <= 1.0)) throw UsageError("group_correlation must lie in [0, 1]");
  }
};

struct SyntheticTruth {
  std::string country;
  FamineCategory category;
  std::vector<std::string> signal_features;
};

struct SyntheticData {
  FeatureCatalog catalog;
  PanelDataset dataset;
  std::vector<SyntheticTruth> truth;  // sorted by country
};

namespace detail {

struct FeatureScale {
  double center;
  double scale;
};

// Plausible units per default-catalog feature; all stay inside catalog bounds
// for |u| <= 1.4 * sqrt(3).
inline FeatureScale synthetic_scale(std::string_view name) {
  if (name == "pop_density") return {150.0, 40.0};
  if (name.starts_with("rainfall_value")) return {80.0, 20.0};
  if (name.starts_with("rainfall_")) return {100.0, 15.0};
  if (name.starts_with("ndvi_value")) return {0.4, 0.1};
  if (name.starts_with("ndvi_anomaly")) return {100.0, 10.0};
  if (name.starts_with("single_pewi")) return {20.0, 5.0};
  if (name.find("inflation") != std::string_view::npos) return {8.0, 4.0};
  if (name.starts_with("ce_variation")) return {0.0, 3.0};
  return {40.0, 10.0};  // fatality counts
}

// Features measuring the same quantity over different windows share a latent
// driver; each gets its own group otherwise.
inline std::string synthetic_group(std::string_view name) {
  if (name.starts_with("rainfall_value")) return "rain";
  if (name.starts_with("rainfall_")) return "rain_anomaly";
  if (name.starts_with("ndvi_value")) return "ndvi";
  if (name.starts_with("ndvi_anomaly")) return "ndvi_anomaly";
  if (name.starts_with("single_pewi")) return "pewi";
  if (name.find("inflation") != std::string_view::npos) return "inflation";
  if (name.starts_with("ce_variation")) return "exchange";
  return std::string(name);
}

inline std::vector<std::string> country_codes(std::size_t n) {
  static const std::vector<std::string> pool = {
      "AFG", "BDI", "BFA", "CAF", "COD", "ETH", "HTI", "KEN", "MLI", "MOZ", "MMR", "NER", "NGA", "NPL", "PAK", "SDN",
      "SOM", "SSD", "SYR", "TCD", "UGA", "UKR", "YEM", "ZWE", "IDN", "BGD", "LBN", "MWI", "MDG", "ZMB", "CMR", "GTM"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < pool.size()) {
      out.push_back(pool[i]);
    } else {
      const std::size_t k = i - pool.size();
      out.push_back(std::string{'X', static_cast<char>('A' + (k / 26) % 26), static_cast<char>('A' + k % 26)});
    }
  }
  return out;
}

}  // namespace detail

/// Builds the planted-category fixture over the default catalog. Conflict
/// aggregates (combined and total fatality counts) are sums of their drawn
/// components, so the fixture is conflict-consistent.
inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.check();
  const FeatureCatalog& catalog = default_catalog();
  const std::size_t p = catalog.size();
  const double root3 = std::sqrt(3.0);

  auto idx = [&](std::string_view name) { return *catalog.index_of(name); };
  const std::size_t battles = idx("num_fatalities_battles_90days_difference");
  const std::size_t remote = idx("num_fatalities_remote_violence_90days_difference");
  const std::size_t vac = idx("num_fatalities_vac_90days_difference");
  const std::size_t battles_remote = idx("num_fatalities_battles_remote_violence_90days_difference");
  const std::size_t vac_remote = idx("num_fatalities_vac_remote_violence_90days_difference");
  const std::size_t total = idx("num_fatalities_total_90days_difference");
  auto derived = [&](std::size_t c) { return c == battles_remote || c == vac_remote || c == total; };

  std::vector<std::size_t> group_of(p);
  std::size_t n_groups = 0;
  {
    std::map<std::string, std::size_t> ids;
    for (std::size_t c = 0; c < p; ++c) {
      auto [it, inserted] = ids.emplace(detail::synthetic_group(catalog[c].name), n_groups);
      if (inserted) ++n_groups;
      group_of[c] = it->second;
    }
  }

  std::vector<FamineCategory> planted;
  planted.insert(planted.end(), spec.economic, FamineCategory::Economic);
  planted.insert(planted.end(), spec.natural, FamineCategory::Natural);
  planted.insert(planted.end(), spec.conflict, FamineCategory::Conflict);
  const auto codes = detail::country_codes(planted.size());

  std::vector<Observation> observations;
  observations.reserve(planted.size() * spec.rows_per_country);
  std::vector<SyntheticTruth> truth;

  for (std::size_t ci = 0; ci < planted.size(); ++ci) {
    RngStream rng(derive_seed(spec.seed, codes[ci]));
    const auto category = planted[ci];

    std::vector<std::size_t> drivers;
    for (std::size_t c = 0; c < p; ++c)
      if (catalog[c].category == category && !derived(c)) drivers.push_back(c);
    const auto picks = rng.sample_without_replacement(drivers.size(), std::min(spec.signal_features, drivers.size()));
    std::vector<std::size_t> signal;
    std::vector<double> weight;
    for (std::size_t k : picks) {
      signal.push_back(drivers[k]);
      weight.push_back(rng.uniform() < 0.5 ? -spec.signal_weight : spec.signal_weight);
    }
    auto is_signal = [&](std::size_t c) { return std::find(signal.begin(), signal.end(), c) != signal.end(); };

    std::vector<std::size_t> others;
    for (std::size_t c = 0; c < p; ++c)
      if (!is_signal(c) && !derived(c)) others.push_back(c);
    std::vector<std::size_t> sparse;
    for (std::size_t k : rng.sample_without_replacement(others.size(), std::min(spec.sparse_features, others.size())))
      sparse.push_back(others[k]);

    SyntheticTruth t{codes[ci], category, {}};
    for (std::size_t c : signal) t.signal_features.push_back(catalog[c].name);
    truth.push_back(std::move(t));

    std::vector<double> u(p), latent(n_groups);
    for (std::size_t r = 0; r < spec.rows_per_country; ++r) {
      Observation o;
      o.country = codes[ci];
      const std::size_t unit = r % spec.admin_units + 1;
      o.admin1 = (unit < 10 ? "ADM-0" : "ADM-") + std::to_string(unit);
      const std::size_t month = r / spec.admin_units;
      o.date = Date{2012 + static_cast<int>(month / 12), static_cast<unsigned>(month % 12 + 1), 1};

      for (auto& v : latent) v = rng.uniform(-root3, root3);
      for (std::size_t c = 0; c < p; ++c) u[c] = spec.group_correlation * latent[group_of[c]] +
                                                 std::sqrt(1.0 - spec.group_correlation * spec.group_correlation) *
                                                     rng.uniform(-root3, root3);
      o.values.assign(p, kMissing);
      for (std::size_t c = 0; c < p; ++c) {
        if (derived(c)) continue;
        const auto s = detail::synthetic_scale(catalog[c].name);
        o.values[c] = s.center + s.scale * u[c];
      }
      o.values[battles_remote] = o.values[battles] + o.values[remote];
      o.values[vac_remote] = o.values[vac] + o.values[remote];
      o.values[total] = o.values[battles] + o.values[remote] + o.values[vac];

      double y = 50.0;
      for (std::size_t k = 0; k < signal.size(); ++k) {
        const double z = u[signal[k]];
        y += weight[k] * (spec.shape == SignalShape::Linear ? z : 1.5 * std::tanh(4.0 * z));
      }
      y += spec.noise * rng.normal();
      o.target = std::clamp(y, 0.0, 112.0);

      // Drop cells after the target is fixed so missingness is independent of it.
      for (std::size_t c = 0; c < p; ++c) {
        if (is_signal(c)) continue;
        const bool is_sparse = std::find(sparse.begin(), sparse.end(), c) != sparse.end();
        const double rate = is_sparse ? 0.65 : spec.missing_rate;
        if (rng.uniform() < rate) o.values[c] = kMissing;
      }
      observations.push_back(std::move(o));
    }
  }

  std::sort(truth.begin(), truth.end(), [](const auto& a, const auto& b) { return a.country < b.country; });
  std::vector<std::size_t> columns(p);
  for (std::size_t c = 0; c < p; ++c) columns[c] = c;
  return SyntheticData{catalog, PanelDataset(catalog, std::move(columns), std::move(observations)), std::move(truth)};
}

struct SyntheticPaths {
  std::string data;
  std::string catalog;
  std::string truth;
};

/// Writes data.csv, catalog.json and truth.csv into `dir`.
inline SyntheticPaths write_synthetic(const SyntheticData& data, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory '" + dir.string() + "': " + ec.message());
  SyntheticPaths paths{(dir / "data.csv").string(), (dir / "catalog.json").string(), (dir / "truth.csv").string()};

  auto open = [](const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    return out;
  };
  {
    auto out = open(paths.data);
    write_dataset(out, data.dataset);
  }
  {
    auto out = open(paths.catalog);
    out << catalog_to_json(data.catalog).dump(2) << '\n';
  }
  {
    auto out = open(paths.truth);
    csv::write_record(out, {"country", "category", "signal_features"});
    for (const auto& t : data.truth) {
      std::string joined;
      for (const auto& s : t.signal_features) joined += (joined.empty() ? "" : ";") + s;
      csv::write_record(out, {t.country, std::string(to_string(t.category)), joined});
    }
  }
  return paths;
}

}  // namespace famine
