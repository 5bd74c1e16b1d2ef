#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "intervention.hpp"
#include "sampler.hpp"

namespace vlol {

inline constexpr std::array<std::string_view, 6> kChallengeNames{"perception",    "logic",      "generalization",
                                                                 "interventions", "efficiency", "noise"};

struct ChallengeParams {
  DatasetSpec base;
  int workers = 1;
  std::vector<double> noise_grid{0.1, 0.3};
  std::vector<std::size_t> efficiency_sizes{100, 1000, 10000};
  int generalization_cars = 7;
};

struct NamedReport {
  std::string name;
  std::string edit;
  BatchReport report;
};

struct ChallengeOutput {
  std::vector<Dataset> datasets;
  std::vector<NamedReport> reports;
};

inline std::string format_fraction(double p) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, p);
  return std::string(buf, res.ptr);
}

namespace detail {

inline Dataset make(const std::string& name, const DatasetSpec& spec, int workers) {
  Dataset ds = generate_dataset(spec, load_rule(spec.rule), workers);
  ds.name = name;
  return ds;
}

/// Held-out set only, with its own seed so its stream is independent of the
/// base dataset's test split.
inline DatasetSpec test_only(DatasetSpec spec, std::string_view name) {
  spec.size = 0;
  spec.noise = 0.0;
  spec.seed = mix64(spec.seed ^ fnv1a64(name));
  return spec;
}

} // namespace detail

/// Assembles the datasets for one named challenge.
///  perception     : identical symbolic data tagged trains and blocks
///  logic          : one dataset per built-in rule
///  generalization : base training set, a 7-car test set (same distribution)
///                   and an out-of-distribution test set from the random distribution
///  interventions  : theory_x dataset plus payload-swap and roof-removal reports on its test split
///  efficiency     : nested training sets of 100/1000/10000 and one shared test set
///  noise          : one dataset per label-noise fraction
inline ChallengeOutput build_challenge(std::string_view name, const ChallengeParams& params) {
  ChallengeOutput out;
  const DatasetSpec& base = params.base;
  const int w = params.workers;
  if (name == "perception") {
    DatasetSpec trains = base;
    trains.distribution.vocabulary = Vocabulary::trains;
    Dataset t = detail::make("trains", trains, w);
    Dataset b = t;
    b.name = "blocks";
    b.spec.distribution.vocabulary = Vocabulary::blocks;
    for (auto& r : b.records) r.train = map_vocabulary(r.train, Vocabulary::blocks);
    out.datasets.push_back(std::move(t));
    out.datasets.push_back(std::move(b));
  } else if (name == "logic") {
    for (const char* rule : {"theory_x", "numerical", "complex"}) {
      DatasetSpec s = base;
      s.rule = rule;
      out.datasets.push_back(detail::make(rule, s, w));
    }
  } else if (name == "generalization") {
    out.datasets.push_back(detail::make("train", base, w));
    DatasetSpec longer = detail::test_only(base, "test_long");
    longer.distribution.min_cars = longer.distribution.max_cars = params.generalization_cars;
    out.datasets.push_back(detail::make("test_" + std::to_string(params.generalization_cars) + "cars", longer, w));
    DatasetSpec ood = detail::test_only(base, "ood_random");
    ood.distribution.kind = DistributionKind::random;
    out.datasets.push_back(detail::make("ood_random", ood, w));
  } else if (name == "interventions") {
    DatasetSpec s = base;
    s.rule = "theory_x";
    Dataset ds = detail::make("theory_x", s, w);
    for (const auto& [rname, edit] : {std::pair<std::string, std::string>{"swap_loads", "swap_loads:first(has_load=golden_vase),last(has_load=barrel)"},
                                      {"remove_roof", "remove_roof:all(closed)"}}) {
      out.reports.push_back({rname, edit, batch_intervene(ds, parse_edit(edit), ds.rule, Split::test)});
    }
    out.datasets.push_back(std::move(ds));
  } else if (name == "efficiency") {
    for (std::size_t size : params.efficiency_sizes) {
      DatasetSpec s = base;
      s.size = size;
      s.test_size = 0;
      out.datasets.push_back(detail::make("train_" + std::to_string(size), s, w));
    }
    out.datasets.push_back(detail::make("test", detail::test_only(base, "efficiency_test"), w));
  } else if (name == "noise") {
    for (double p : params.noise_grid) {
      DatasetSpec s = base;
      s.noise = p;
      out.datasets.push_back(detail::make("noise_" + format_fraction(p), s, w));
    }
  } else {
    throw InvalidSpec("unknown challenge '" + std::string(name) + "'");
  }
  return out;
}

} // namespace vlol
