#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>

#include "oracles.hpp"
#include "vlol/challenge.hpp"
#include "vlol/manifest.hpp"
#include "vlol/sampler.hpp"

using namespace vlol;

namespace {

const auto kRules = builtin_rules();

std::array<std::size_t, 2> label_counts(const std::vector<SampleRecord>& rs, Split split) {
  std::array<std::size_t, 2> c{0, 0};
  for (const auto& r : rs)
    if (r.split == split) ++c[static_cast<std::size_t>(r.true_label)];
  return c;
}

BalancedRequest request(DistributionKind kind, std::size_t size, std::uint64_t seed, int workers = 1) {
  BalancedRequest req;
  req.dist = {kind, 2, 4, Vocabulary::trains};
  req.size = size;
  req.seed = seed;
  req.workers = workers;
  return req;
}

} // namespace

TEST(Rng, CounterStreamsAreStable) {
  // CounterRng(k) reproduces the SplitMix64 sequence seeded with k
  CounterRng a = CounterRng::stream(1, "x", 0), b = CounterRng::stream(1, "x", 0), c = CounterRng::stream(1, "x", 1);
  const auto a1 = a(), b1 = b(), c1 = c();
  EXPECT_EQ(a1, b1);
  EXPECT_NE(a1, c1);
  CounterRng ref(1234567);
  EXPECT_EQ(ref(), 6457827717110365317ULL);
  EXPECT_EQ(ref(), 3203168211198807973ULL);
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Rng, BelowIsUnbiasedAndInRange) {
  CounterRng r = CounterRng::stream(4, "below", 0);
  std::array<int, 6> hist{};
  for (int i = 0; i < 60000; ++i) {
    const auto v = r.below(6);
    ASSERT_LT(v, 6u);
    ++hist[v];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 400);
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.between(2, 4);
    ASSERT_GE(v, 2);
    ASSERT_LE(v, 4);
  }
}

TEST(SampleTrain, MichalskiSamplesAreValid) {
  CounterRng rng = CounterRng::stream(1, "valid", 0);
  const DistributionSpec d{DistributionKind::michalski, 2, 4, Vocabulary::trains};
  std::map<std::size_t, int> lengths;
  for (int i = 0; i < 10000; ++i) {
    const Train t = sample_train(d, rng);
    ASSERT_TRUE(is_valid(t, ConstraintSet::michalski()));
    ++lengths[t.size()];
    for (const Car& c : t.cars)
      if (c.is_long()) ASSERT_EQ(c.colour, Colour::yellow);
  }
  EXPECT_EQ(lengths.size(), 3u);
  for (auto [n, k] : lengths) EXPECT_NEAR(k, 3333, 250) << n;
}

TEST(SampleTrain, RandomSamplesAreValidAndMixed) {
  CounterRng rng = CounterRng::stream(2, "valid", 0);
  const DistributionSpec d{DistributionKind::random, 7, 7, Vocabulary::trains};
  bool mixed = false;
  for (int i = 0; i < 10000; ++i) {
    const Train t = sample_train(d, rng);
    ASSERT_EQ(t.size(), 7u);
    ASSERT_TRUE(is_valid(t, ConstraintSet::random_viz()));
    for (const Car& c : t.cars)
      if (c.load_count() == 2 && c.loads[0] != c.loads[1]) mixed = true;
  }
  EXPECT_TRUE(mixed);
}

TEST(SampleTrain, UniformOverValidValuesPerSlot) {
  // first slot sampled is length: both lengths equally likely; then colour among the valid ones
  CounterRng rng = CounterRng::stream(3, "uniform", 0);
  std::map<Colour, int> short_colours;
  int shorts = 0;
  for (int i = 0; i < 20000; ++i) {
    const Car c = sample_car(ConstraintSetKind::michalski, 1, rng);
    if (c.is_short()) {
      ++shorts;
      ++short_colours[c.colour];
    }
  }
  EXPECT_NEAR(shorts, 10000, 300);
  EXPECT_EQ(short_colours.size(), 5u);
  for (auto [col, k] : short_colours) EXPECT_NEAR(k, shorts / 5, 250);
}

TEST(Balanced, ExactQuotasForEveryRuleAndDistribution) {
  for (const auto& [name, rule] : kRules)
    for (auto kind : {DistributionKind::michalski, DistributionKind::random}) {
      const auto recs = generate_balanced(rule, request(kind, 200, 17));
      ASSERT_EQ(recs.size(), 200u);
      std::size_t east = 0;
      for (std::size_t i = 0; i < recs.size(); ++i) {
        EXPECT_EQ(recs[i].id, i);
        EXPECT_EQ(evaluate(rule, recs[i].train), recs[i].true_label);
        EXPECT_EQ(recs[i].true_label, i % 2 == 0 ? Direction::eastbound : Direction::westbound);
        east += recs[i].true_label == Direction::eastbound;
      }
      EXPECT_EQ(east, 100u) << name;
    }
}

TEST(Balanced, DeterministicAndWorkerIndependent) {
  const auto& rule = kRules.at("complex");
  const auto one = generate_balanced(rule, request(DistributionKind::michalski, 500, 42, 1));
  const auto again = generate_balanced(rule, request(DistributionKind::michalski, 500, 42, 1));
  const auto four = generate_balanced(rule, request(DistributionKind::michalski, 500, 42, 4));
  const auto other = generate_balanced(rule, request(DistributionKind::michalski, 500, 43, 1));
  EXPECT_EQ(one, again);
  EXPECT_EQ(one, four);
  EXPECT_NE(one, other);
}

TEST(Balanced, PrefixNesting) {
  const auto& rule = kRules.at("theory_x");
  const auto big = generate_balanced(rule, request(DistributionKind::michalski, 1000, 5));
  const auto small = generate_balanced(rule, request(DistributionKind::michalski, 100, 5));
  ASSERT_EQ(small.size(), 100u);
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small[i], big[i]);
}

TEST(Balanced, UnsatisfiableRuleStarves) {
  const auto never = parse_rule("eastbound(T) :- has_car(T,C), short(C), long(C).");
  auto req = request(DistributionKind::michalski, 10, 1);
  req.attempt_budget = 5000;
  try {
    generate_balanced(never, req);
    FAIL();
  } catch (const QuotaStarvation& e) {
    EXPECT_EQ(e.starved(), Direction::eastbound);
  }
  // the other class can starve too
  const auto always = parse_rule("eastbound(T) :- has_car(T,C).");
  try {
    generate_balanced(always, req);
    FAIL();
  } catch (const QuotaStarvation& e) {
    EXPECT_EQ(e.starved(), Direction::westbound);
  }
}

TEST(Balanced, OddSizeRejected) {
  EXPECT_THROW(generate_balanced(kRules.at("theory_x"), request(DistributionKind::michalski, 7, 1)), InvalidSpec);
}

TEST(Noise, ExactCountsAndTestUntouched) {
  DatasetSpec spec;
  spec.size = 1000;
  spec.test_size = 200;
  spec.seed = 3;
  for (double p : {0.0, 0.1, 0.3, 1.0}) {
    spec.noise = p;
    const Dataset ds = generate_dataset(spec, kRules.at("theory_x"));
    std::size_t flipped = 0;
    for (const auto& r : ds.records) {
      if (r.split == Split::test) {
        EXPECT_FALSE(r.noise);
        EXPECT_EQ(r.observed_label, r.true_label);
        continue;
      }
      EXPECT_EQ(r.noise, r.observed_label != r.true_label);
      if (r.noise) {
        ++flipped;
        EXPECT_NE(r.observed_label, evaluate(ds.rule, r.train));
      }
    }
    EXPECT_EQ(flipped, static_cast<std::size_t>(p * 1000 + 0.5)) << p;
    EXPECT_TRUE(audit(ds).empty());
  }
}

TEST(Noise, CountFormula) {
  EXPECT_EQ(noise_count(0.3, 1000), 300u);
  EXPECT_EQ(noise_count(0.1, 1000), 100u);
  EXPECT_EQ(noise_count(0.15, 10), 1u);
  EXPECT_EQ(noise_count(0.0, 10), 0u);
  EXPECT_EQ(noise_count(1.0, 10), 10u);
  std::vector<SampleRecord> none;
  CounterRng rng = CounterRng::stream(1, "n", 0);
  EXPECT_THROW(inject_label_noise(none, 1.5, rng), InvalidSpec);
}

TEST(Folds, StratifiedFiveFold) {
  const auto recs = generate_balanced(kRules.at("numerical"), request(DistributionKind::random, 1000, 8));
  CounterRng rng = CounterRng::stream(8, "folds", 0);
  const auto folded = assign_folds(recs, 5, rng);
  std::array<std::array<int, 2>, 5> counts{};
  for (const auto& r : folded) {
    ASSERT_GE(r.fold, 0);
    ASSERT_LT(r.fold, 5);
    ++counts[static_cast<std::size_t>(r.fold)][static_cast<std::size_t>(r.true_label)];
  }
  for (const auto& f : counts) {
    EXPECT_EQ(f[0], 100);
    EXPECT_EQ(f[1], 100);
  }
}

TEST(Folds, MinimalAndUneven) {
  auto recs = generate_balanced(kRules.at("theory_x"), request(DistributionKind::michalski, 4, 2));
  CounterRng rng = CounterRng::stream(2, "folds", 0);
  auto folded = assign_folds(recs, 2, rng);
  std::array<std::array<int, 2>, 2> counts{};
  for (const auto& r : folded) ++counts[static_cast<std::size_t>(r.fold)][static_cast<std::size_t>(r.true_label)];
  for (const auto& f : counts) EXPECT_EQ(f, (std::array<int, 2>{1, 1}));

  recs = generate_balanced(kRules.at("theory_x"), request(DistributionKind::michalski, 22, 2));
  folded = assign_folds(recs, 4, rng);
  std::array<std::array<int, 2>, 4> c4{};
  for (const auto& r : folded) ++c4[static_cast<std::size_t>(r.fold)][static_cast<std::size_t>(r.true_label)];
  for (int cls = 0; cls < 2; ++cls) {
    int lo = 1 << 30, hi = 0, total_lo = 1 << 30, total_hi = 0;
    for (const auto& f : c4) {
      lo = std::min(lo, f[cls]);
      hi = std::max(hi, f[cls]);
      total_lo = std::min(total_lo, f[0] + f[1]);
      total_hi = std::max(total_hi, f[0] + f[1]);
    }
    EXPECT_LE(hi - lo, 1);
    EXPECT_LE(total_hi - total_lo, 1);
  }
  EXPECT_THROW(assign_folds(recs, 1, rng), InvalidSpec);
  EXPECT_THROW(assign_folds(recs, 23, rng), InvalidSpec);
}

TEST(Dataset, IdsSplitsAndAudit) {
  DatasetSpec spec;
  spec.size = 100;
  spec.test_size = 60;
  spec.seed = 9;
  const Dataset ds = generate_dataset(spec, kRules.at("complex"));
  ASSERT_EQ(ds.records.size(), 160u);
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    EXPECT_EQ(ds.records[i].id, i);
    EXPECT_EQ(ds.records[i].split, i < 100 ? Split::train : Split::test);
  }
  EXPECT_EQ(label_counts(ds.records, Split::train), (std::array<std::size_t, 2>{50, 50}));
  EXPECT_EQ(label_counts(ds.records, Split::test), (std::array<std::size_t, 2>{30, 30}));
  EXPECT_TRUE(audit(ds).empty());

  Dataset bad = ds;
  bad.records[3].true_label = flip(bad.records[3].true_label);
  bad.records[3].observed_label = bad.records[3].true_label;
  EXPECT_FALSE(audit(bad).empty());
  bad = ds;
  bad.records[0].train.cars[0].axles = 3;
  bad.records[0].train.cars[0].length = Length::short_car;
  EXPECT_FALSE(audit(bad).empty());
}

TEST(Dataset, SpecChecks) {
  DatasetSpec s;
  s.size = 11;
  EXPECT_THROW(s.check(), InvalidSpec);
  s = {};
  s.noise = -0.1;
  EXPECT_THROW(s.check(), InvalidSpec);
  s = {};
  s.distribution.min_cars = 5;
  EXPECT_THROW(s.check(), InvalidSpec);
  s = {};
  s.background = "space";
  EXPECT_THROW(s.check(), InvalidSpec);
}

TEST(Manifest, RoundTrip) {
  DatasetSpec spec;
  spec.size = 40;
  spec.test_size = 20;
  spec.noise = 0.1;
  spec.seed = 77;
  Dataset ds = generate_dataset(spec, kRules.at("theory_x"));
  ds.name = "rt";
  const auto dir = std::filesystem::temp_directory_path() / "vlol_manifest_rt";
  std::filesystem::remove_all(dir);
  write_dataset(dir, ds);
  const Dataset back = read_dataset(dir / "manifest.json");
  EXPECT_EQ(back.records, ds.records);
  EXPECT_EQ(back.rule.hash(), ds.rule.hash());
  EXPECT_EQ(back.spec.seed, 77u);
  EXPECT_DOUBLE_EQ(back.spec.noise, 0.1);
  const auto m = manifest_json(ds);
  EXPECT_EQ(m["generator"], kGeneratorName);
  EXPECT_EQ(m["rule_hash"], ds.rule.hash());
  EXPECT_EQ(m["counts"]["noisy"], 4);
  EXPECT_EQ(m["counts"]["train_east"], 20);
  std::filesystem::remove_all(dir);
}

TEST(Challenges, Generalization) {
  ChallengeParams p;
  p.base.size = 100;
  p.base.test_size = 100;
  const auto out = build_challenge("generalization", p);
  ASSERT_EQ(out.datasets.size(), 3u);
  const Dataset& seven = out.datasets[1];
  EXPECT_EQ(seven.name, "test_7cars");
  for (const auto& r : seven.records) {
    EXPECT_EQ(r.train.size(), 7u);
    EXPECT_EQ(r.split, Split::test);
    EXPECT_TRUE(is_valid(r.train, ConstraintSet::michalski(7, 7)));
  }
  EXPECT_EQ(label_counts(seven.records, Split::test), (std::array<std::size_t, 2>{50, 50}));
  EXPECT_EQ(out.datasets[2].spec.distribution.kind, DistributionKind::random);
  for (const auto& ds : out.datasets) EXPECT_TRUE(audit(ds).empty()) << ds.name;
}

TEST(Challenges, EfficiencyNestedWithSharedTest) {
  ChallengeParams p;
  p.efficiency_sizes = {10, 100, 1000};
  const auto out = build_challenge("efficiency", p);
  ASSERT_EQ(out.datasets.size(), 4u);
  EXPECT_EQ(out.datasets[0].records.size(), 10u);
  EXPECT_EQ(out.datasets[1].records.size(), 100u);
  EXPECT_EQ(out.datasets[2].records.size(), 1000u);
  EXPECT_EQ(out.datasets[3].records.size(), 2000u);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(out.datasets[1].records[i].train, out.datasets[2].records[i].train);
  for (const auto& r : out.datasets[3].records) EXPECT_EQ(r.split, Split::test);
}

TEST(Challenges, PerceptionSameTrainsTwoVocabularies) {
  ChallengeParams p;
  p.base.size = 50 * 2;
  p.base.test_size = 20;
  const auto out = build_challenge("perception", p);
  ASSERT_EQ(out.datasets.size(), 2u);
  const auto& t = out.datasets[0];
  const auto& b = out.datasets[1];
  ASSERT_EQ(t.records.size(), b.records.size());
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    EXPECT_EQ(b.records[i].train.vocabulary, Vocabulary::blocks);
    EXPECT_EQ(map_vocabulary(b.records[i].train, Vocabulary::trains), t.records[i].train);
    EXPECT_EQ(b.records[i].true_label, t.records[i].true_label);
  }
  EXPECT_TRUE(audit(b).empty());
}

TEST(Challenges, LogicNoiseAndUnknown) {
  ChallengeParams p;
  p.base.size = 100;
  p.base.test_size = 20;
  const auto logic = build_challenge("logic", p);
  ASSERT_EQ(logic.datasets.size(), 3u);
  EXPECT_EQ(logic.datasets[2].spec.rule, "complex");
  const auto noise = build_challenge("noise", p);
  ASSERT_EQ(noise.datasets.size(), 2u);
  EXPECT_EQ(noise.datasets[0].name, "noise_0.1");
  EXPECT_EQ(noise.datasets[1].name, "noise_0.3");
  EXPECT_THROW(build_challenge("speed", p), InvalidSpec);
}
