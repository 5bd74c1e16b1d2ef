#pragma once

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sampler.hpp"
#include "scene.hpp"

namespace vlol {

/// One generation run: dataset spec, layout and output settings.
struct Config {
  DatasetSpec spec;
  LayoutParams layout;
  std::string out = "out";
  int workers = 1;
  bool render = false;
  std::string format = "both"; // svg | json | both
  std::string challenge;       // empty => single dataset

  nlohmann::ordered_json echo() const {
    nlohmann::ordered_json j;
    j["rule"] = spec.rule;
    j["dist"] = to_string(spec.distribution.kind);
    j["min_cars"] = spec.distribution.min_cars;
    j["max_cars"] = spec.distribution.max_cars;
    j["vocabulary"] = to_string(spec.distribution.vocabulary);
    j["size"] = spec.size;
    j["seed"] = spec.seed;
    j["noise"] = spec.noise;
    j["folds"] = spec.folds;
    j["test_size"] = spec.test_size;
    j["background"] = spec.background;
    j["attempt_budget"] = spec.attempt_budget;
    j["challenge"] = challenge;
    j["render"] = render;
    j["format"] = format;
    j["scale"] = layout.scale;
    j["loco_len"] = layout.loco_len;
    j["short_len"] = layout.short_len;
    j["long_len"] = layout.long_len;
    j["gap"] = layout.gap;
    j["car_height"] = layout.car_height;
    return j;
  }
};

namespace detail {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  const auto* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw InvalidSpec("config key '" + std::string(key) + "': '" + std::string(text) + "' is not a valid number");
  return v;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InvalidSpec("config key '" + std::string(key) + "': expected true/false");
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

} // namespace detail

/// Sets one key. Unknown keys are rejected.
inline void set_config_value(Config& c, std::string_view key, std::string_view value) {
  using detail::parse_number;
  if (key == "rule") c.spec.rule = std::string(value);
  else if (key == "dist" || key == "distribution") c.spec.distribution.kind = distribution_from_string(value);
  else if (key == "min_cars") c.spec.distribution.min_cars = parse_number<int>(key, value);
  else if (key == "max_cars") c.spec.distribution.max_cars = parse_number<int>(key, value);
  else if (key == "vocabulary") {
    try {
      c.spec.distribution.vocabulary = vocabulary_from_string(value);
    } catch (const Error& e) {
      throw InvalidSpec(e.what());
    }
  }
  else if (key == "size") c.spec.size = parse_number<std::size_t>(key, value);
  else if (key == "seed") c.spec.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "noise") c.spec.noise = parse_number<double>(key, value);
  else if (key == "folds") c.spec.folds = parse_number<int>(key, value);
  else if (key == "test_size") c.spec.test_size = parse_number<std::size_t>(key, value);
  else if (key == "background") c.spec.background = c.layout.background = std::string(value);
  else if (key == "attempt_budget") c.spec.attempt_budget = parse_number<std::uint64_t>(key, value);
  else if (key == "workers") c.workers = parse_number<int>(key, value);
  else if (key == "out") c.out = std::string(value);
  else if (key == "render") c.render = detail::parse_bool(key, value);
  else if (key == "format") c.format = std::string(value);
  else if (key == "challenge") c.challenge = std::string(value);
  else if (key == "scale") c.layout.scale = parse_number<double>(key, value);
  else if (key == "loco_len") c.layout.loco_len = parse_number<double>(key, value);
  else if (key == "short_len") c.layout.short_len = parse_number<double>(key, value);
  else if (key == "long_len") c.layout.long_len = parse_number<double>(key, value);
  else if (key == "gap") c.layout.gap = parse_number<double>(key, value);
  else if (key == "car_height") c.layout.car_height = parse_number<double>(key, value);
  else throw InvalidSpec("unknown config key '" + std::string(key) + "'");
}

/// Plain-text `key = value` lines; `#` starts a comment.
inline void load_config_file(Config& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw InvalidSpec(path + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      set_config_value(c, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)));
    } catch (const Error& e) {
      throw InvalidSpec(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

/// VLOL_SEED, when set, replaces the configured seed (an explicit --seed flag
/// is applied afterwards and wins).
inline void apply_seed_env(Config& c) {
  if (const char* env = std::getenv("VLOL_SEED"); env && *env)
    c.spec.seed = detail::parse_number<std::uint64_t>("VLOL_SEED", env);
}

/// Defaults, then the config file, then VLOL_SEED, then explicit overrides
/// (command-line flags) in order.
inline Config resolve_config(const std::optional<std::string>& file,
                             const std::vector<std::pair<std::string, std::string>>& overrides) {
  Config c;
  if (file) load_config_file(c, *file);
  apply_seed_env(c);
  for (const auto& [key, value] : overrides) set_config_value(c, key, value);
  return c;
}

} // namespace vlol
