#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sampler.hpp"

namespace vlol {

inline constexpr std::string_view kGeneratorName = "vlol-trains";
inline constexpr std::string_view kGeneratorVersion = "1.0.0";

inline nlohmann::ordered_json to_json(const SampleRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["split"] = to_string(r.split);
  j["true_label"] = to_string(r.true_label);
  j["observed_label"] = to_string(r.observed_label);
  j["noise"] = r.noise;
  if (r.fold >= 0)
    j["fold"] = r.fold;
  else
    j["fold"] = nullptr;
  j["train"] = to_json(r.train);
  return j;
}

inline SampleRecord record_from_json(const nlohmann::json& j) {
  SampleRecord r;
  r.id = j.at("id").get<std::uint64_t>();
  r.split = split_from_string(j.at("split").get<std::string>());
  r.true_label = direction_from_string(j.at("true_label").get<std::string>());
  r.observed_label = direction_from_string(j.at("observed_label").get<std::string>());
  r.noise = j.at("noise").get<bool>();
  r.fold = j.at("fold").is_null() ? -1 : j.at("fold").get<int>();
  r.train = train_from_json(j.at("train"));
  return r;
}

inline nlohmann::ordered_json spec_to_json(const DatasetSpec& s) {
  nlohmann::ordered_json j;
  j["rule"] = s.rule;
  j["distribution"] = to_string(s.distribution.kind);
  j["min_cars"] = s.distribution.min_cars;
  j["max_cars"] = s.distribution.max_cars;
  j["vocabulary"] = to_string(s.distribution.vocabulary);
  j["size"] = s.size;
  j["seed"] = s.seed;
  j["noise"] = s.noise;
  j["folds"] = s.folds;
  j["test_size"] = s.test_size;
  j["background"] = s.background;
  j["attempt_budget"] = s.attempt_budget;
  return j;
}

inline DatasetSpec spec_from_json(const nlohmann::json& j) {
  DatasetSpec s;
  s.rule = j.at("rule").get<std::string>();
  s.distribution.kind = distribution_from_string(j.at("distribution").get<std::string>());
  s.distribution.min_cars = j.at("min_cars").get<int>();
  s.distribution.max_cars = j.at("max_cars").get<int>();
  s.distribution.vocabulary = vocabulary_from_string(j.at("vocabulary").get<std::string>());
  s.size = j.at("size").get<std::size_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.noise = j.at("noise").get<double>();
  s.folds = j.at("folds").get<int>();
  s.test_size = j.at("test_size").get<std::size_t>();
  s.background = j.value("background", std::string("base"));
  s.attempt_budget = j.value("attempt_budget", std::uint64_t{100000});
  return s;
}

/// manifest.json contents: spec echo, counts, rule source and hash, version.
inline nlohmann::ordered_json manifest_json(const Dataset& ds, const nlohmann::ordered_json& config = nullptr) {
  nlohmann::ordered_json m;
  m["generator"] = kGeneratorName;
  m["generator_version"] = kGeneratorVersion;
  m["name"] = ds.name;
  m["spec"] = spec_to_json(ds.spec);
  m["rule_source"] = ds.rule.source;
  m["rule_hash"] = ds.rule.hash();
  std::size_t train = 0, test = 0, train_east = 0, test_east = 0, noisy = 0;
  std::vector<std::size_t> folds(ds.spec.size > 0 ? static_cast<std::size_t>(ds.spec.folds) : 0, 0);
  for (const auto& r : ds.records) {
    const bool east = r.true_label == Direction::eastbound;
    if (r.split == Split::train) {
      ++train;
      train_east += east;
      if (r.fold >= 0 && static_cast<std::size_t>(r.fold) < folds.size()) ++folds[static_cast<std::size_t>(r.fold)];
    } else {
      ++test;
      test_east += east;
    }
    noisy += r.noise;
  }
  nlohmann::ordered_json c;
  c["records"] = ds.records.size();
  c["train"] = train;
  c["train_east"] = train_east;
  c["train_west"] = train - train_east;
  c["test"] = test;
  c["test_east"] = test_east;
  c["test_west"] = test - test_east;
  c["noisy"] = noisy;
  c["folds"] = folds;
  m["counts"] = c;
  m["records_file"] = "records.jsonl";
  if (!config.is_null()) m["config"] = config;
  return m;
}

/// Writes <dir>/manifest.json and <dir>/records.jsonl (records in id order).
inline void write_dataset(const std::filesystem::path& dir, const Dataset& ds,
                          const nlohmann::ordered_json& config = nullptr) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
    out << manifest_json(ds, config).dump(2) << '\n';
  }
  std::ofstream out(dir / "records.jsonl", std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / "records.jsonl").string());
  std::vector<const SampleRecord*> order;
  for (const auto& r : ds.records) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const auto* r : order) out << to_json(*r).dump() << '\n';
}

/// Accepts a manifest.json path or the directory holding it.
inline std::filesystem::path manifest_path(const std::filesystem::path& p) {
  return std::filesystem::is_directory(p) ? p / "manifest.json" : p;
}

inline Dataset read_dataset(const std::filesystem::path& path) {
  const auto mpath = manifest_path(path);
  std::ifstream in(mpath, std::ios::binary);
  if (!in) throw Error("cannot read manifest " + mpath.string());
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed manifest " + mpath.string() + ": " + e.what());
  }
  Dataset ds;
  try {
    ds.name = m.value("name", std::string());
    ds.spec = spec_from_json(m.at("spec"));
    ds.rule = parse_rule(m.at("rule_source").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed manifest " + mpath.string() + ": " + e.what());
  }
  const auto rpath = mpath.parent_path() / m.value("records_file", std::string("records.jsonl"));
  std::ifstream rin(rpath, std::ios::binary);
  if (!rin) throw Error("cannot read records " + rpath.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(rin, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      ds.records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(rpath.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return ds;
}

} // namespace vlol
