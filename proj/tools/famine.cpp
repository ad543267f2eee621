#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "famine.hpp"

namespace {

struct Common {
  std::string data;
  std::string catalog;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

famine::RunConfig resolve_config(const Common& c) {
  famine::RunConfig cfg;
  if (!c.config.empty()) cfg = famine::load_config(c.config, cfg);
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (c.seed) cfg.prepare.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  return cfg;
}

famine::FeatureCatalog resolve_catalog(const Common& c) {
  return c.catalog.empty() ? famine::default_catalog() : famine::load_catalog(c.catalog);
}

int cmd_validate(const Common& c, bool strict) {
  const auto cfg = resolve_config(c);
  const auto catalog = resolve_catalog(c);
  const auto ds = famine::load_dataset(c.data, catalog);
  const auto rep = famine::validate(ds, cfg.target);

  for (const auto& w : ds.warnings()) std::cerr << "warning: " << w << '\n';
  std::cout << "countries: " << rep.row_counts_per_country.size() << '\n';
  for (const auto& [country, n] : rep.row_counts_per_country) std::cout << "  " << country << ' ' << n << '\n';
  std::cout << "target range violations: " << rep.target_range_violations.size() << '\n';
  for (const auto& v : rep.target_range_violations)
    std::cout << "  row " << v.row << ": " << famine::format_double(v.value) << '\n';
  std::cout << "bound violations: " << rep.bound_violations.size() << '\n';
  for (const auto& v : rep.bound_violations)
    std::cout << "  row " << v.row << ' ' << v.feature << ": " << famine::format_double(v.value) << '\n';
  std::cout << "duplicate keys: " << rep.duplicate_keys.size() << '\n';
  for (const auto& d : rep.duplicate_keys)
    std::cout << "  " << d.country << ' ' << d.admin1 << ' ' << d.date.to_string() << " x" << d.occurrences << '\n';
  std::cout << "conflict consistency warnings: " << rep.conflict_consistency_warnings.size() << '\n';
  for (const auto& w : rep.conflict_consistency_warnings)
    std::cout << "  row " << w.row << ' ' << w.total_feature << '=' << famine::format_double(w.total) << " < "
              << w.component_feature << '=' << famine::format_double(w.component) << '\n';

  if (strict && !rep.clean()) return static_cast<int>(famine::ExitCode::Data);
  return 0;
}

int cmd_run(const Common& c) {
  const auto cfg = resolve_config(c);
  std::optional<std::string> catalog;
  if (!c.catalog.empty()) catalog = c.catalog;
  const auto bundle = famine::run(cfg, c.data, catalog);

  const auto& r = bundle.report;
  std::cout << "evaluated " << r.evaluations.size() << " countries, skipped " << r.skipped.size() << '\n';
  for (const auto& s : r.skipped) std::cout << "  skipped " << s.country << ": " << s.reason << '\n';
  std::cout << "average random forest MAE: " << famine::format_fixed(r.average_rf_mae, 3) << '\n';
  for (const auto& [cat, share] : r.category_proportions)
    std::cout << "  " << famine::to_string(cat) << ": " << famine::format_fixed(100.0 * share, 1) << "%\n";
  std::cout << "reports written to " << bundle.out_dir.string() << '\n';
  return 0;
}

int cmd_synth(const famine::SyntheticSpec& spec, const std::string& out, const std::string& shape) {
  auto s = spec;
  if (shape == "linear") s.shape = famine::SignalShape::Linear;
  else if (shape == "nonlinear") s.shape = famine::SignalShape::Nonlinear;
  else throw famine::UsageError("--shape must be linear or nonlinear");
  const auto data = famine::generate_synthetic(s);
  const auto paths = famine::write_synthetic(data, out);
  std::cout << "wrote " << data.dataset.observations().size() << " rows for " << data.truth.size() << " countries\n"
            << "  " << paths.data << "\n  " << paths.catalog << "\n  " << paths.truth << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"famine: per-country food-security forecasting and famine-category analysis"};
  app.require_subcommand(1);

  Common common;
  bool strict = false;

  auto* validate = app.add_subcommand("validate", "parse a panel dataset and report data-quality findings");
  validate->add_option("--data", common.data, "panel CSV")->required();
  validate->add_option("--catalog", common.catalog, "feature catalog JSON (default: built-in)");
  validate->add_option("--config", common.config, "run config JSON (target range)");
  validate->add_flag("--strict", strict, "exit 2 when any finding is reported");

  auto* run = app.add_subcommand("run", "evaluate models per country and write reports");
  run->add_option("--data", common.data, "panel CSV")->required();
  run->add_option("--catalog", common.catalog, "feature catalog JSON (default: built-in)");
  run->add_option("--config", common.config, "run config JSON");
  run->add_option("--out", common.out, "output directory (default: out)");
  run->add_option("--seed", common.seed, "master seed");
  run->add_option("--threads", common.threads, "worker threads, 0 = all cores");

  famine::SyntheticSpec spec;
  std::string synth_out = "synthetic";
  std::string shape = "nonlinear";
  auto* synth = app.add_subcommand("synth", "write a planted-category synthetic dataset");
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--seed", spec.seed, "generator seed");
  synth->add_option("--natural", spec.natural, "countries with a natural signal");
  synth->add_option("--economic", spec.economic, "countries with an economic signal");
  synth->add_option("--conflict", spec.conflict, "countries with a conflict signal");
  synth->add_option("--rows", spec.rows_per_country, "rows per country");
  synth->add_option("--noise", spec.noise, "noise standard deviation");
  synth->add_option("--shape", shape, "linear or nonlinear");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(famine::ExitCode::Usage);
  }

  try {
    if (*validate) return cmd_validate(common, strict);
    if (*run) return cmd_run(common);
    return cmd_synth(spec, synth_out, shape);
  } catch (const famine::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return static_cast<int>(famine::ExitCode::Internal);
  }
}
