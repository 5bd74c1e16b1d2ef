#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "constraints.hpp"
#include "domain.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "rule_dsl.hpp"

namespace vlol {

class QuotaStarvation : public Error {
public:
  QuotaStarvation(Direction starved, std::uint64_t attempts, std::uint64_t accepted)
      : Error("quota starvation: no " + std::string(to_string(starved)) + "bound train in the last " +
              std::to_string(attempts) + " attempts (" + std::to_string(accepted) + " accepted so far)"),
        starved_(starved) {}
  Direction starved() const noexcept { return starved_; }

private:
  Direction starved_;
};

class InvalidSpec : public Error {
public:
  using Error::Error;
};

enum class DistributionKind : std::uint8_t { michalski, random };

constexpr std::string_view to_string(DistributionKind d) noexcept {
  return d == DistributionKind::michalski ? "michalski" : "random";
}

inline DistributionKind distribution_from_string(std::string_view s) {
  if (s == "michalski") return DistributionKind::michalski;
  if (s == "random") return DistributionKind::random;
  throw InvalidSpec("unknown distribution '" + std::string(s) + "'");
}

struct DistributionSpec {
  DistributionKind kind = DistributionKind::michalski;
  int min_cars = 2;
  int max_cars = 4;
  Vocabulary vocabulary = Vocabulary::trains;

  /// michalski => michalski constraints with C1 bounds equal to the car range;
  /// random => random_viz.
  ConstraintSet constraint_set() const {
    return kind == DistributionKind::michalski ? ConstraintSet::michalski(min_cars, max_cars)
                                               : ConstraintSet::random_viz();
  }

  void check() const {
    if (min_cars < 1 || min_cars > max_cars) throw InvalidSpec("car range must satisfy 1 <= min_cars <= max_cars");
  }
};

/// Draws one car slot by slot, each slot uniform over the values that still
/// admit a valid completion.
inline Car sample_car(ConstraintSetKind k, int position, CounterRng& rng) {
  auto pick = [&rng](const auto& values) { return values[rng.below(values.size())]; };
  Car c;
  c.position = position;
  c.length = pick(domains::lengths(k));
  c.colour = pick(domains::colours(k, c.length));
  c.wall = pick(domains::walls(k, c.length, c.colour));
  c.roof = pick(domains::roofs(k, c.length, c.colour));
  c.axles = pick(domains::axles(k, c.length));
  const int n = pick(domains::load_counts(k, c.length));
  for (int i = 0; i < n; ++i) c.loads.push_back(pick(domains::load_shapes(k, c.length, c.loads)));
  return c;
}

/// Samples a valid train: car count uniform over [min_cars, max_cars], then
/// each car independently.
inline Train sample_train(const DistributionSpec& dist, CounterRng& rng) {
  const ConstraintSetKind k =
      dist.kind == DistributionKind::michalski ? ConstraintSetKind::michalski : ConstraintSetKind::random_viz;
  Train t;
  t.vocabulary = dist.vocabulary;
  const auto n = static_cast<int>(rng.between(dist.min_cars, dist.max_cars));
  t.cars.reserve(static_cast<std::size_t>(n));
  for (int p = 1; p <= n; ++p) t.cars.push_back(sample_car(k, p, rng));
  return t;
}

enum class Split : std::uint8_t { train, test };

constexpr std::string_view to_string(Split s) noexcept { return s == Split::train ? "train" : "test"; }

inline Split split_from_string(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  throw Error("unknown split '" + std::string(s) + "'");
}

struct SampleRecord {
  std::uint64_t id = 0;
  Train train;
  Direction true_label = Direction::eastbound;
  Direction observed_label = Direction::eastbound;
  bool noise = false;
  int fold = -1; // -1 => no fold (test split)
  Split split = Split::train;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct BalancedRequest {
  DistributionSpec dist;
  std::size_t size = 1000;
  std::uint64_t seed = 0;
  std::string stream_tag = "train";
  Split split = Split::train;
  std::uint64_t first_id = 0;
  int workers = 1;
  // A class still below quota that sees no hit in this many consecutive
  // attempts aborts generation.
  std::uint64_t attempt_budget = 100000;
};

struct BalancedStats {
  std::uint64_t attempts = 0;
};

/// Rejection sampling to exact class quotas. Attempt i draws from stream
/// (seed, tag, i) and is accepted iff its class quota (size/2) is not yet
/// full. Records interleave east and west (east at even offsets), so every
/// even-length prefix is itself balanced and equals the balanced set of that
/// size. Workers only evaluate attempts; acceptance is a sequential scan, so
/// the output does not depend on the worker count.
inline std::vector<SampleRecord> generate_balanced(const RuleProgram& rule, const BalancedRequest& req,
                                                   BalancedStats* stats = nullptr) {
  req.dist.check();
  if (req.size % 2 != 0) throw InvalidSpec("balanced dataset size must be even, got " + std::to_string(req.size));
  const std::size_t quota = req.size / 2;
  std::array<std::vector<Train>, 2> accepted;
  accepted[0].reserve(quota);
  accepted[1].reserve(quota);
  std::array<std::uint64_t, 2> last_hit{0, 0};

  constexpr std::size_t kChunk = 2048;
  std::vector<std::pair<Train, Direction>> chunk(kChunk);
  std::uint64_t attempt = 0;
  while (accepted[0].size() < quota || accepted[1].size() < quota) {
    const std::uint64_t base = attempt;
    parallel_for(kChunk, req.workers, [&](std::size_t i) {
      CounterRng rng = CounterRng::stream(req.seed, req.stream_tag, base + i);
      Train t = sample_train(req.dist, rng);
      const Direction d = evaluate(rule, t);
      chunk[i] = {std::move(t), d};
    });
    for (std::size_t i = 0; i < kChunk; ++i, ++attempt) {
      auto& [train, label] = chunk[i];
      const auto cls = static_cast<std::size_t>(label);
      if (accepted[cls].size() < quota) {
        accepted[cls].push_back(std::move(train));
        last_hit[cls] = attempt + 1;
      }
      if (accepted[0].size() == quota && accepted[1].size() == quota) {
        ++attempt;
        break;
      }
      for (std::size_t c = 0; c < 2; ++c)
        if (accepted[c].size() < quota && attempt + 1 - last_hit[c] >= req.attempt_budget)
          throw QuotaStarvation(static_cast<Direction>(c), req.attempt_budget, accepted[0].size() + accepted[1].size());
    }
  }
  if (stats) stats->attempts = attempt;

  std::vector<SampleRecord> out;
  out.reserve(req.size);
  for (std::size_t i = 0; i < quota; ++i) {
    for (std::size_t c = 0; c < 2; ++c) {
      SampleRecord r;
      r.id = req.first_id + out.size();
      r.train = std::move(accepted[c][i]);
      r.true_label = r.observed_label = static_cast<Direction>(c);
      r.split = req.split;
      out.push_back(std::move(r));
    }
  }
  return out;
}

/// Number of flipped labels for fraction p of n records: floor(p * n), with a
/// small tolerance so decimal fractions like 0.3 * 1000 land on 300.
inline std::size_t noise_count(double p, std::size_t n) {
  return static_cast<std::size_t>(std::floor(p * static_cast<double>(n) + 1e-9));
}

/// Flips the observed label of exactly noise_count(p, n) train-split records
/// chosen uniformly without replacement. Test records are never touched.
inline std::vector<SampleRecord> inject_label_noise(std::vector<SampleRecord> records, double p, CounterRng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidSpec("noise fraction must lie in [0, 1]");
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].split == Split::train) pool.push_back(i);
  const std::size_t k = noise_count(p, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
    SampleRecord& r = records[pool[i]];
    r.observed_label = flip(r.true_label);
    r.noise = true;
  }
  return records;
}

/// Stratified k-fold assignment over the train split: each class is shuffled
/// and dealt round-robin, the second class continuing where the first
/// stopped, so per-class and total fold sizes differ by at most one.
inline std::vector<SampleRecord> assign_folds(std::vector<SampleRecord> records, int k, CounterRng& rng) {
  if (k < 2) throw InvalidSpec("fold count must be at least 2");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].split == Split::train) by_class[static_cast<std::size_t>(records[i].true_label)].push_back(i);
  if (static_cast<std::size_t>(k) > by_class[0].size() + by_class[1].size())
    throw InvalidSpec("fold count " + std::to_string(k) + " exceeds the train split size");
  std::size_t dealt = 0;
  for (auto& cls : by_class) {
    for (std::size_t i = cls.size(); i > 1; --i) std::swap(cls[i - 1], cls[rng.below(i)]);
    for (std::size_t idx : cls) records[idx].fold = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
  }
  return records;
}

// Datasets ---------------------------------------------------------------------

struct DatasetSpec {
  std::string rule = "theory_x"; // built-in name or rule file path
  DistributionSpec distribution{};
  std::size_t size = 1000;
  std::uint64_t seed = 0;
  double noise = 0.0;
  int folds = 5;
  std::size_t test_size = 2000;
  std::string background = "base";
  std::uint64_t attempt_budget = 100000;

  void check() const {
    distribution.check();
    if (size % 2 != 0) throw InvalidSpec("size must be even");
    if (test_size % 2 != 0) throw InvalidSpec("test_size must be even");
    if (!(noise >= 0.0 && noise <= 1.0)) throw InvalidSpec("noise must lie in [0, 1]");
    if (size > 0 && (folds < 2 || static_cast<std::size_t>(folds) > size))
      throw InvalidSpec("folds must satisfy 2 <= folds <= size");
    if (attempt_budget == 0) throw InvalidSpec("attempt_budget must be positive");
    static constexpr std::array<std::string_view, 4> kBackgrounds{"base", "desert", "sky", "fisheye"};
    if (std::find(kBackgrounds.begin(), kBackgrounds.end(), background) == kBackgrounds.end())
      throw InvalidSpec("unknown background '" + background + "'");
  }
};

struct Dataset {
  std::string name;
  DatasetSpec spec;
  RuleProgram rule;
  std::vector<SampleRecord> records;
};

/// Train split (ids 0..size-1, folds, noise) followed by a clean test split
/// (ids size..size+test_size-1) drawn from an independent stream.
inline Dataset generate_dataset(const DatasetSpec& spec, const RuleProgram& rule, int workers = 1) {
  spec.check();
  Dataset ds;
  ds.spec = spec;
  ds.rule = rule;
  BalancedRequest req;
  req.dist = spec.distribution;
  req.seed = spec.seed;
  req.workers = workers;
  req.attempt_budget = spec.attempt_budget;
  if (spec.size > 0) {
    req.size = spec.size;
    req.stream_tag = "train";
    req.split = Split::train;
    req.first_id = 0;
    ds.records = generate_balanced(rule, req);
    CounterRng fold_rng = CounterRng::stream(spec.seed, "folds");
    ds.records = assign_folds(std::move(ds.records), spec.folds, fold_rng);
    CounterRng noise_rng = CounterRng::stream(spec.seed, "noise");
    ds.records = inject_label_noise(std::move(ds.records), spec.noise, noise_rng);
  }
  if (spec.test_size > 0) {
    req.size = spec.test_size;
    req.stream_tag = "test";
    req.split = Split::test;
    req.first_id = spec.size;
    auto test = generate_balanced(rule, req);
    for (auto& r : test) ds.records.push_back(std::move(r));
  }
  return ds;
}

/// End-to-end check of a dataset: every train re-validates, every true label
/// re-derives, noise flags and folds are consistent and splits are balanced.
inline std::vector<std::string> audit(const Dataset& ds) {
  std::vector<std::string> problems;
  const ConstraintSet set = ds.spec.distribution.constraint_set();
  std::array<std::array<std::size_t, 2>, 2> counts{};
  for (const auto& r : ds.records) {
    const std::string who = "record " + std::to_string(r.id);
    if (auto p = structural_problem(r.train)) problems.push_back(who + ": " + *p);
    for (const auto& v : validate_train(r.train, set))
      problems.push_back(who + ": violates " + v.constraint + " (" + v.message + ")");
    if (evaluate(ds.rule, r.train) != r.true_label) problems.push_back(who + ": true label does not re-derive");
    if (r.noise != (r.observed_label != r.true_label)) problems.push_back(who + ": noise flag inconsistent");
    if (r.split == Split::test && (r.noise || r.fold != -1)) problems.push_back(who + ": test record perturbed");
    if (r.split == Split::train && ds.spec.size > 0 && (r.fold < 0 || r.fold >= ds.spec.folds))
      problems.push_back(who + ": fold out of range");
    ++counts[static_cast<std::size_t>(r.split)][static_cast<std::size_t>(r.true_label)];
  }
  for (std::size_t s = 0; s < 2; ++s)
    if (counts[s][0] != counts[s][1])
      problems.push_back(std::string(to_string(static_cast<Split>(s))) + " split is not balanced (" +
                         std::to_string(counts[s][0]) + " east / " + std::to_string(counts[s][1]) + " west)");
  return problems;
}

} // namespace vlol
