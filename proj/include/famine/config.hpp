#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "famine/categorize.hpp"
#include "famine/dataset.hpp"
#include "famine/error.hpp"
#include "famine/evaluate.hpp"
#include "famine/prepare.hpp"
#include "famine/validate.hpp"

namespace famine {

struct RunConfig {
  PrepareConfig prepare;
  TargetRange target;
  ModelConfig models;
  ScoringMode category_scoring = ScoringMode::Importance;
  std::string out_dir = "out";
  std::size_t threads = 0;  // 0 = hardware concurrency
  bool dump_models = false;

  void check() const {
    prepare.check();
    if (!(target.min < target.max)) throw UsageError("target_min must be below target_max");
    if (models.forest.n_trees == 0) throw UsageError("forest.n_trees must be > 0");
    if (models.forest.min_samples_leaf == 0) throw UsageError("forest.min_samples_leaf must be >= 1");
    if (models.forest.mtry && *models.forest.mtry == 0) throw UsageError("forest.mtry must be >= 1 or \"auto\"");
    if (models.boosting.tree.min_samples_leaf == 0) throw UsageError("boosting.min_samples_leaf must be >= 1");
    if (!(models.boosting.learning_rate > 0.0 && models.boosting.learning_rate <= 1.0))
      throw UsageError("boosting.learning_rate must lie in (0, 1]");
    if (out_dir.empty()) throw UsageError("output directory must not be empty");
  }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<std::string_view> known, std::string_view where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto k : known) ok = ok || it.key() == k;
    if (!ok) throw UsageError("config: unknown key '" + std::string(where) + it.key() + "'");
  }
}

template <typename T>
T get_as(const nlohmann::json& obj, const char* key, std::string_view where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError("config: '" + std::string(where) + key + "' has the wrong type");
  }
}

inline std::size_t get_count(const nlohmann::json& obj, const char* key, std::string_view where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw UsageError("config: '" + std::string(where) + key + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

inline std::optional<std::size_t> get_optional_count(const nlohmann::json& obj, const char* key, std::string_view where) {
  if (obj.at(key).is_null()) return std::nullopt;
  return get_count(obj, key, where);
}

}  // namespace detail

/// Applies a JSON config document on top of `base`. Unknown keys are errors.
inline RunConfig apply_config(RunConfig cfg, const nlohmann::json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw UsageError("config: document must be a JSON object");
  reject_unknown(doc,
                 {"availability_threshold", "test_fraction", "split_mode", "min_rows", "seed", "target_min", "target_max",
                  "forest", "boosting", "category_scoring", "out", "threads", "dump_models"},
                 "");
  if (doc.contains("availability_threshold")) cfg.prepare.availability_threshold = get_as<double>(doc, "availability_threshold", "");
  if (doc.contains("test_fraction")) cfg.prepare.test_fraction = get_as<double>(doc, "test_fraction", "");
  if (doc.contains("split_mode")) {
    const auto s = get_as<std::string>(doc, "split_mode", "");
    if (s == "random") cfg.prepare.split_mode = SplitMode::Random;
    else if (s == "chronological") cfg.prepare.split_mode = SplitMode::Chronological;
    else throw UsageError("config: split_mode must be \"random\" or \"chronological\"");
  }
  if (doc.contains("min_rows")) cfg.prepare.min_rows = get_count(doc, "min_rows", "");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || (doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned()))
      throw UsageError("config: 'seed' must be an unsigned 64-bit integer");
    cfg.prepare.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("target_min")) cfg.target.min = get_as<double>(doc, "target_min", "");
  if (doc.contains("target_max")) cfg.target.max = get_as<double>(doc, "target_max", "");
  if (doc.contains("category_scoring")) {
    auto m = parse_scoring_mode(get_as<std::string>(doc, "category_scoring", ""));
    if (!m) throw UsageError("config: category_scoring must be \"importance\" or \"rank\"");
    cfg.category_scoring = *m;
  }
  if (doc.contains("out")) cfg.out_dir = get_as<std::string>(doc, "out", "");
  if (doc.contains("threads")) cfg.threads = get_count(doc, "threads", "");
  if (doc.contains("dump_models")) cfg.dump_models = get_as<bool>(doc, "dump_models", "");

  if (doc.contains("forest")) {
    const auto& f = doc["forest"];
    if (!f.is_object()) throw UsageError("config: 'forest' must be an object");
    reject_unknown(f, {"n_trees", "mtry", "min_samples_leaf", "max_depth"}, "forest.");
    auto& fp = cfg.models.forest;
    if (f.contains("n_trees")) fp.n_trees = get_count(f, "n_trees", "forest.");
    if (f.contains("min_samples_leaf")) fp.min_samples_leaf = get_count(f, "min_samples_leaf", "forest.");
    if (f.contains("max_depth")) fp.max_depth = get_optional_count(f, "max_depth", "forest.");
    if (f.contains("mtry")) {
      if (f["mtry"].is_string() && f["mtry"] == "auto") fp.mtry.reset();
      else fp.mtry = get_count(f, "mtry", "forest.");
    }
  }
  if (doc.contains("boosting")) {
    const auto& b = doc["boosting"];
    if (!b.is_object()) throw UsageError("config: 'boosting' must be an object");
    reject_unknown(b, {"rounds", "learning_rate", "max_depth", "min_samples_leaf"}, "boosting.");
    auto& bp = cfg.models.boosting;
    if (b.contains("rounds")) bp.rounds = get_count(b, "rounds", "boosting.");
    if (b.contains("learning_rate")) bp.learning_rate = get_as<double>(b, "learning_rate", "boosting.");
    if (b.contains("max_depth")) bp.tree.max_depth = get_optional_count(b, "max_depth", "boosting.");
    if (b.contains("min_samples_leaf")) bp.tree.min_samples_leaf = get_count(b, "min_samples_leaf", "boosting.");
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError&) {
    throw UsageError("cannot open config file '" + path + "'");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config: malformed document: " + std::string(e.what()));
  }
  return apply_config(std::move(base), doc);
}

/// Result-affecting settings only; thread count and output location are
/// excluded so reports stay byte-identical across machines and runs.
inline nlohmann::ordered_json config_echo(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["availability_threshold"] = cfg.prepare.availability_threshold;
  j["test_fraction"] = cfg.prepare.test_fraction;
  j["split_mode"] = cfg.prepare.split_mode == SplitMode::Random ? "random" : "chronological";
  j["min_rows"] = cfg.prepare.min_rows;
  j["target_min"] = cfg.target.min;
  j["target_max"] = cfg.target.max;
  const auto& f = cfg.models.forest;
  j["forest"]["n_trees"] = f.n_trees;
  j["forest"]["mtry"] = f.mtry ? nlohmann::ordered_json(*f.mtry) : nlohmann::ordered_json("auto");
  j["forest"]["min_samples_leaf"] = f.min_samples_leaf;
  j["forest"]["max_depth"] = f.max_depth ? nlohmann::ordered_json(*f.max_depth) : nlohmann::ordered_json(nullptr);
  const auto& b = cfg.models.boosting;
  j["boosting"]["rounds"] = b.rounds;
  j["boosting"]["learning_rate"] = b.learning_rate;
  j["boosting"]["max_depth"] = b.tree.max_depth ? nlohmann::ordered_json(*b.tree.max_depth) : nlohmann::ordered_json(nullptr);
  j["boosting"]["min_samples_leaf"] = b.tree.min_samples_leaf;
  j["category_scoring"] = std::string(to_string(cfg.category_scoring));
  return j;
}

}  // namespace famine
