#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "challenge.hpp"
#include "config.hpp"
#include "constraints.hpp"
#include "intervention.hpp"
#include "manifest.hpp"
#include "scene.hpp"

namespace vlol::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kQuotaStarvation = 2, kInvalidSpec = 3, kAuditFailure = 4 };

namespace fs = std::filesystem;

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

/// Writes <dir>/<id>.svg and/or <dir>/<id>.gt.json for every record.
inline void render_records(const Dataset& ds, LayoutParams params, const fs::path& dir, const std::string& format,
                           int workers) {
  if (format != "svg" && format != "json" && format != "both") throw InvalidSpec("format must be svg, json or both");
  fs::create_directories(dir);
  params.background = ds.spec.background;
  parallel_for(ds.records.size(), workers, [&](std::size_t i) {
    const auto& r = ds.records[i];
    const SceneGraph g = vlol::layout(r.train, params);
    const std::string id = std::to_string(r.id);
    if (format != "json") write_text(dir / (id + ".svg"), render_svg(g));
    if (format != "svg") write_text(dir / (id + ".gt.json"), annotations(g).dump(1) + "\n");
  });
}

inline int report_audit(const Dataset& ds, std::ostream& err) {
  const auto problems = audit(ds);
  if (problems.empty()) return kOk;
  err << "audit failed for dataset '" << ds.name << "' (" << problems.size() << " problem(s))\n";
  for (std::size_t i = 0; i < problems.size() && i < 20; ++i) err << "  " << problems[i] << '\n';
  return kAuditFailure;
}

inline int cmd_generate(const Config& cfg, std::ostream& log, std::ostream& err) {
  try {
    cfg.spec.check();
    cfg.layout.check();
    if (cfg.workers < 1) throw InvalidSpec("workers must be at least 1");
    RuleProgram rule;
    try {
      rule = load_rule(cfg.spec.rule);
    } catch (const Error& e) {
      throw InvalidSpec(e.what());
    }
    std::vector<Dataset> datasets;
    std::vector<NamedReport> reports;
    if (cfg.challenge.empty()) {
      Dataset ds = generate_dataset(cfg.spec, rule, cfg.workers);
      ds.name = "dataset";
      datasets.push_back(std::move(ds));
    } else {
      ChallengeParams params;
      params.base = cfg.spec;
      params.workers = cfg.workers;
      auto built = build_challenge(cfg.challenge, params);
      datasets = std::move(built.datasets);
      reports = std::move(built.reports);
    }
    for (const auto& ds : datasets)
      if (int rc = report_audit(ds, err); rc != kOk) return rc;

    const fs::path root(cfg.out);
    for (const auto& ds : datasets) {
      const fs::path dir = cfg.challenge.empty() ? root : root / ds.name;
      write_dataset(dir, ds, cfg.echo());
      if (cfg.render) render_records(ds, cfg.layout, dir / "scenes", cfg.format, cfg.workers);
      std::size_t train = 0, test = 0, east = 0;
      for (const auto& r : ds.records) {
        (r.split == Split::train ? train : test) += 1;
        east += r.true_label == Direction::eastbound;
      }
      log << dir.string() << ": " << train << " train + " << test << " test records, " << east << " east / "
          << ds.records.size() - east << " west\n";
    }
    for (const auto& rep : reports) {
      fs::create_directories(root / "interventions");
      std::ofstream out(root / "interventions" / (rep.name + ".jsonl"), std::ios::binary);
      for (const auto& e : rep.report.entries) out << to_json(e).dump() << '\n';
      out << summary_json(rep.report, rep.edit).dump() << '\n';
      log << "intervention " << rep.name << ": " << rep.report.applied << " applied, " << rep.report.flipped
          << " flipped\n";
    }
    return kOk;
  } catch (const QuotaStarvation& e) {
    err << "error: " << e.what() << '\n';
    return kQuotaStarvation;
  } catch (const InvalidSpec& e) {
    err << "invalid spec: " << e.what() << '\n';
    return kInvalidSpec;
  } catch (const ParseError& e) {
    err << "rule error: " << e.what() << '\n';
    return kInvalidSpec;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

/// Reads Train JSON, prints one JSON line per violation. 0 iff valid.
inline int cmd_validate(std::istream& in, const ConstraintSet& set, std::ostream& out, std::ostream& err) {
  Train train;
  try {
    train = train_from_json(nlohmann::json::parse(in));
  } catch (const std::exception& e) {
    err << "invalid train: " << e.what() << '\n';
    return kInvalidSpec;
  }
  const auto violations = validate_train(train, set);
  for (const auto& v : violations) out << to_json(v).dump() << '\n';
  return violations.empty() ? kOk : kFailure;
}

inline constexpr std::uint64_t kPublishedPerCar = 2200;
inline constexpr double kPublishedTrains2to4 = 23.4e12;

inline nlohmann::ordered_json enumerate_report(ConstraintSetKind kind) {
  const auto per_car = enumerate_valid_cars(kind).count;
  const auto set = kind == ConstraintSetKind::michalski ? ConstraintSet::michalski() : ConstraintSet::random_viz();
  const auto filtered = filtered_car_count(set);
  auto trains = [&](std::uint64_t c, int lo, int hi) { return to_string_u128(count_trains_with(c, lo, hi)); };
  auto range_count = [&](int lo, int hi) {
    const auto s = kind == ConstraintSetKind::michalski ? ConstraintSet::michalski(lo, hi) : ConstraintSet::random_viz();
    return to_string_u128(count_trains(s, lo, hi));
  };
  nlohmann::ordered_json j;
  j["set"] = to_string(kind);
  j["per_car"] = per_car;
  j["per_car_oracle"] = filtered;
  j["per_car_consistent"] = per_car == filtered;
  j["per_car_published"] = kPublishedPerCar;
  j["per_car_delta"] = static_cast<std::int64_t>(per_car) - static_cast<std::int64_t>(kPublishedPerCar);
  j["trains_2_4"] = range_count(2, 4);
  j["trains_2_7"] = range_count(2, 7);
  j["trains_2_4_published"] = "23.4 trillion";
  j["trains_2_4_at_published_per_car"] = trains(kPublishedPerCar, 2, 4);
  const long double ours = static_cast<long double>(count_trains_with(per_car, 2, 4));
  j["trains_2_4_ratio_to_published"] = static_cast<double>(ours / static_cast<long double>(kPublishedTrains2to4));
  return j;
}

inline int cmd_enumerate(const std::string& set_name, bool json, std::ostream& out, std::ostream& err) {
  ConstraintSetKind kind;
  try {
    kind = constraint_set_from_string(set_name);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kInvalidSpec;
  }
  const auto j = enumerate_report(kind);
  if (json) {
    out << j.dump(2) << '\n';
    return kOk;
  }
  out << "constraint set           " << j["set"].get<std::string>() << '\n'
      << "valid cars (constructive) " << j["per_car"] << '\n'
      << "valid cars (filtered)     " << j["per_car_oracle"] << (j["per_car_consistent"].get<bool>() ? "  (agree)" : "  (MISMATCH)") << '\n'
      << "published per-car count   " << kPublishedPerCar << "  delta " << j["per_car_delta"] << '\n'
      << "trains, 2..4 cars         " << j["trains_2_4"].get<std::string>() << '\n'
      << "published, 2..4 cars      23.4 trillion (" << j["trains_2_4_at_published_per_car"].get<std::string>()
      << " at 2200 per car)  ratio " << j["trains_2_4_ratio_to_published"] << '\n'
      << "trains, 2..7 cars         " << j["trains_2_7"].get<std::string>() << '\n';
  return kOk;
}

inline int cmd_intervene(const std::string& manifest, const std::string& rule_name, const std::string& edit,
                         const std::string& split, std::ostream& out, std::ostream& err) {
  EditTemplate tmpl;
  RuleProgram rule;
  std::optional<Split> only;
  try {
    tmpl = parse_edit(edit);
    rule = load_rule(rule_name);
    if (split != "all") only = split_from_string(split);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kInvalidSpec;
  }
  Dataset ds;
  try {
    ds = read_dataset(manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  const auto rep = batch_intervene(ds, tmpl, rule, only);
  for (const auto& e : rep.entries) out << to_json(e).dump() << '\n';
  out << summary_json(rep, edit).dump() << '\n';
  return kOk;
}

inline int cmd_render(const std::string& manifest, const std::string& out_dir, const std::string& format,
                      const LayoutParams& layout, int workers, std::ostream& log, std::ostream& err) {
  try {
    const Dataset ds = read_dataset(manifest);
    render_records(ds, layout, out_dir, format, workers);
    log << "rendered " << ds.records.size() << " scenes to " << out_dir << '\n';
    return kOk;
  } catch (const InvalidSpec& e) {
    err << e.what() << '\n';
    return kInvalidSpec;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

inline nlohmann::ordered_json stats_json(const Dataset& ds) {
  nlohmann::ordered_json j;
  std::map<std::string, std::size_t> train_labels, test_labels, car_counts;
  std::map<std::string, std::map<std::string, std::size_t>> marginals;
  std::map<std::string, std::size_t> long_colour, short_colour;
  std::size_t train = 0, test = 0, train_east = 0, test_east = 0, noisy = 0;
  std::map<int, std::size_t> folds;
  for (const auto& r : ds.records) {
    const bool east = r.true_label == Direction::eastbound;
    if (r.split == Split::train) {
      ++train;
      train_east += east;
      ++folds[r.fold];
    } else {
      ++test;
      test_east += east;
    }
    noisy += r.noise;
    ++car_counts[std::to_string(r.train.size())];
    const Vocabulary v = r.train.vocabulary;
    for (const Car& c : r.train.cars) {
      ++marginals["colour"][std::string(name_of(v, c.colour))];
      ++marginals["length"][std::string(name_of(v, c.length))];
      ++marginals["wall"][std::string(name_of(v, c.wall))];
      ++marginals["roof"][std::string(name_of(v, c.roof))];
      ++marginals["axles"][std::to_string(c.axles)];
      ++marginals["load_count"][std::to_string(c.load_count())];
      for (LoadShape s : c.loads) ++marginals["load_shape"][std::string(name_of(v, s))];
      ++(c.is_long() ? long_colour : short_colour)[std::string(name_of(v, c.colour))];
    }
  }
  auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  j["records"] = ds.records.size();
  j["train"] = train;
  j["test"] = test;
  j["train_balance"] = ratio(train_east, train);
  j["test_balance"] = ratio(test_east, test);
  j["noisy"] = noisy;
  j["noise_fraction"] = ratio(noisy, train);
  nlohmann::ordered_json fj = nlohmann::ordered_json::object();
  for (const auto& [f, n] : folds)
    if (f >= 0) fj[std::to_string(f)] = n;
  j["fold_sizes"] = fj;
  j["car_count_histogram"] = car_counts;
  j["marginals"] = marginals;
  j["long_car_colour"] = long_colour;
  j["short_car_colour"] = short_colour;
  return j;
}

inline int cmd_stats(const std::string& manifest, bool json, std::ostream& out, std::ostream& err) {
  Dataset ds;
  try {
    ds = read_dataset(manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  const auto j = stats_json(ds);
  if (json) {
    out << j.dump(2) << '\n';
    return kOk;
  }
  auto fixed3 = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << v;
    return s.str();
  };
  out << "records          " << j["records"] << " (" << j["train"] << " train, " << j["test"] << " test)\n"
      << "balance (train)  " << fixed3(j["train_balance"].get<double>()) << " east\n"
      << "balance (test)   " << fixed3(j["test_balance"].get<double>()) << " east\n"
      << "noise            " << j["noisy"] << " flipped (" << fixed3(j["noise_fraction"].get<double>()) << ")\n"
      << "fold sizes       " << j["fold_sizes"].dump() << '\n'
      << "cars per train   " << j["car_count_histogram"].dump() << '\n'
      << "long car colour  " << j["long_car_colour"].dump() << '\n';
  for (const auto& [slot, counts] : j["marginals"].items()) out << "  " << slot << ": " << counts.dump() << '\n';
  return kOk;
}

} // namespace vlol::cli
