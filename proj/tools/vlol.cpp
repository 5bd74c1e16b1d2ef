// vlol: generate, validate, enumerate, intervene, render and inspect train datasets.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vlol/vlol.hpp"

namespace {

struct Globals {
  std::optional<std::string> seed;
  std::optional<std::string> workers;
  std::optional<std::string> out;
  std::optional<std::string> config;
};

std::vector<std::pair<std::string, std::string>> overrides(
    const Globals& g, const std::vector<std::pair<std::string, std::optional<std::string>>>& flags) {
  std::vector<std::pair<std::string, std::string>> out;
  if (g.seed) out.emplace_back("seed", *g.seed);
  if (g.workers) out.emplace_back("workers", *g.workers);
  if (g.out) out.emplace_back("out", *g.out);
  for (const auto& [key, value] : flags)
    if (value) out.emplace_back(key, *value);
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Michalski train dataset generator"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed (overrides VLOL_SEED)");
  app.add_option("--workers", g.workers, "Worker threads");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--config", g.config, "Config file of key = value lines");

  // generate
  auto* gen = app.add_subcommand("generate", "Sample, label and write a dataset");
  gen->fallthrough();
  std::vector<std::pair<std::string, std::optional<std::string>>> gen_flags{
      {"rule", {}},      {"dist", {}},           {"min_cars", {}}, {"max_cars", {}}, {"vocabulary", {}},
      {"size", {}},      {"noise", {}},          {"folds", {}},    {"test_size", {}}, {"background", {}},
      {"challenge", {}}, {"attempt_budget", {}}, {"format", {}}};
  for (auto& [key, value] : gen_flags) {
    std::string flag = "--" + key;
    for (char& c : flag)
      if (c == '_') c = '-';
    gen->add_option(flag, value);
  }
  bool render_flag = false;
  gen->add_flag("--render", render_flag, "Also render scenes");

  // validate
  auto* val = app.add_subcommand("validate", "Check Train JSON from stdin against a constraint set");
  val->fallthrough();
  std::string val_set = "michalski";
  std::optional<int> val_min, val_max;
  val->add_option("--set", val_set)->check(CLI::IsMember({"michalski", "random_viz"}));
  val->add_option("--min-cars", val_min);
  val->add_option("--max-cars", val_max);

  // enumerate
  auto* en = app.add_subcommand("enumerate", "Count valid cars and trains");
  en->fallthrough();
  std::string en_set = "michalski";
  bool en_json = false;
  en->add_option("set,--set", en_set, "michalski or random_viz");
  en->add_flag("--json", en_json);

  // intervene
  auto* iv = app.add_subcommand("intervene", "Apply an edit to every record and relabel");
  iv->fallthrough();
  std::string iv_manifest, iv_rule = "theory_x", iv_edit, iv_split = "all";
  iv->add_option("--manifest", iv_manifest)->required();
  iv->add_option("--rule", iv_rule);
  iv->add_option("--edit", iv_edit)->required();
  iv->add_option("--split", iv_split)->check(CLI::IsMember({"all", "train", "test"}));

  // render
  auto* rn = app.add_subcommand("render", "Render scenes for a manifest");
  rn->fallthrough();
  std::string rn_manifest, rn_format = "both";
  rn->add_option("--manifest", rn_manifest)->required();
  rn->add_option("--format", rn_format)->check(CLI::IsMember({"svg", "json", "both"}));

  // stats
  auto* st = app.add_subcommand("stats", "Summarize a manifest");
  st->fallthrough();
  std::string st_manifest;
  bool st_json = false;
  st->add_option("manifest,--manifest", st_manifest)->required();
  st->add_flag("--json", st_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : vlol::cli::kInvalidSpec;
  }

  using namespace vlol::cli;
  try {
    if (*gen) {
      vlol::Config cfg = vlol::resolve_config(g.config, overrides(g, gen_flags));
      if (render_flag) cfg.render = true;
      return cmd_generate(cfg, std::cout, std::cerr);
    }
    if (*val) {
      auto set = vlol::ConstraintSet::named(val_set);
      if (val_min) set.min_cars = *val_min;
      if (val_max) set.max_cars = *val_max;
      return cmd_validate(std::cin, set, std::cout, std::cerr);
    }
    if (*en) return cmd_enumerate(en_set, en_json, std::cout, std::cerr);
    if (*iv) {
      if (!g.out) return cmd_intervene(iv_manifest, iv_rule, iv_edit, iv_split, std::cout, std::cerr);
      std::ofstream file(*g.out, std::ios::binary);
      if (!file) {
        std::cerr << "cannot write " << *g.out << '\n';
        return kFailure;
      }
      return cmd_intervene(iv_manifest, iv_rule, iv_edit, iv_split, file, std::cerr);
    }
    if (*rn) {
      const vlol::Config cfg = vlol::resolve_config(g.config, overrides(g, {}));
      return cmd_render(rn_manifest, g.out ? *g.out : "scenes", rn_format, cfg.layout, cfg.workers, std::cout,
                        std::cerr);
    }
    if (*st) return cmd_stats(st_manifest, st_json, std::cout, std::cerr);
  } catch (const vlol::InvalidSpec& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kInvalidSpec;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
