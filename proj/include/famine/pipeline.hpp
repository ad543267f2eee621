#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "famine/catalog.hpp"
#include "famine/categorize.hpp"
#include "famine/config.hpp"
#include "famine/dataset.hpp"
#include "famine/evaluate.hpp"
#include "famine/parallel.hpp"
#include "famine/prepare.hpp"
#include "famine/report.hpp"
#include "famine/rng.hpp"
#include "famine/validate.hpp"

namespace famine {

using CountryOutcome = std::variant<CountryEvaluation, Skip>;

/// prepare + evaluate for every country of `ds`, fanned out over `threads`
/// workers. Results come back in country-code order.
inline std::vector<CountryOutcome> evaluate_countries(const PanelDataset& ds, const RunConfig& config) {
  const auto countries = ds.countries();
  const std::size_t threads = resolve_threads(config.threads);
  // Spare workers go to the forest when there are fewer countries than threads.
  const std::size_t inner = countries.empty() ? 1 : std::max<std::size_t>(1, threads / countries.size());

  std::vector<std::optional<CountryOutcome>> slots(countries.size());
  parallel_for(countries.size(), threads, [&](std::size_t i) {
    const auto& code = countries[i];
    auto prepared = prepare_country(ds, code, config.prepare);
    if (auto* skip = std::get_if<Skip>(&prepared)) {
      slots[i] = *skip;
      return;
    }
    try {
      slots[i] = evaluate_country(std::get<PreparedCountry>(prepared), config.models, derive_seed(config.prepare.seed, code),
                                  config.dump_models, inner);
    } catch (const DataError& e) {
      slots[i] = Skip{code, e.what()};
    }
  });

  std::vector<CountryOutcome> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// In-memory part of a run: validate, evaluate, aggregate, categorize.
inline std::pair<GlobalReport, ValidationReport> analyze(const PanelDataset& ds, const RunConfig& config) {
  config.check();
  auto validation = validate(ds, config.target);
  std::vector<CountryEvaluation> evaluations;
  std::vector<Skip> skipped;
  for (auto& o : evaluate_countries(ds, config)) {
    if (auto* ev = std::get_if<CountryEvaluation>(&o)) evaluations.push_back(std::move(*ev));
    else skipped.push_back(std::get<Skip>(std::move(o)));
  }
  auto report = aggregate(std::move(evaluations), std::move(skipped));
  categorize(report, ds.catalog(), config.category_scoring);
  return {std::move(report), std::move(validation)};
}

/// parse -> validate -> per-country prepare/evaluate -> categorize -> aggregate -> emit.
inline ReportBundle run(const RunConfig& config, const std::string& data_path,
                        const std::optional<std::string>& catalog_path = std::nullopt) {
  config.check();
  const FeatureCatalog catalog = catalog_path ? load_catalog(*catalog_path) : default_catalog();
  const PanelDataset ds = load_dataset(data_path, catalog);
  auto [report, validation] = analyze(ds, config);
  return emit_reports(report, validation, ds.catalog(), config, config.out_dir);
}

}  // namespace famine
