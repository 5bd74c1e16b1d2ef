#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <regex>
#include <set>

#include "oracles.hpp"
#include "vlol/sampler.hpp"
#include "vlol/scene.hpp"

using namespace vlol;
using oracle::car;

namespace {

const SceneObject* find(const SceneGraph& g, const std::string& tag) {
  for (const auto& o : g.objects)
    if (o.tag == tag) return &o;
  return nullptr;
}

// Car index an object belongs to (car3, car3.roof, load3.1 -> 3), or 0.
int owner(const SceneObject& o) {
  static const std::regex re(R"(^(?:car|load)(\d+)(?:\..*)?$)");
  std::smatch m;
  return std::regex_match(o.tag, m, re) ? std::stoi(m[1]) : 0;
}

std::vector<Train> sample_trains(std::size_t n, std::uint64_t seed) {
  CounterRng rng = CounterRng::stream(seed, "scene", 0);
  std::vector<Train> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(sample_train({i % 2 ? DistributionKind::random : DistributionKind::michalski, 1, 7,
                                i % 3 == 0 ? Vocabulary::blocks : Vocabulary::trains},
                               rng));
  return out;
}

} // namespace

TEST(Layout, ClosedFormLeftEdge) {
  const Train t = oracle::train({car(Length::short_car, Colour::yellow, Roof::none, {LoadShape::barrel}),
                                 car(Length::short_car, Colour::green, Roof::none, {LoadShape::barrel})});
  const SceneGraph g = layout(t, {});
  ASSERT_NE(find(g, "car2"), nullptr);
  EXPECT_DOUBLE_EQ(find(g, "car1")->bbox.x0, 30.0);
  EXPECT_DOUBLE_EQ(find(g, "car2")->bbox.x0, 55.0);
  EXPECT_DOUBLE_EQ(find(g, "car2")->bbox.x1, 75.0);
}

TEST(Layout, LeftEdgesFollowFormula) {
  for (const Train& t : sample_trains(200, 1)) {
    const LayoutParams p;
    const SceneGraph g = layout(t, p);
    double units = p.loco_len;
    for (const Car& c : t.cars) {
      const auto* body = find(g, "car" + std::to_string(c.position));
      ASSERT_NE(body, nullptr);
      EXPECT_NEAR(body->bbox.x0, p.scale * units, 1e-9);
      units += (c.is_short() ? p.short_len : p.long_len) + p.gap;
    }
  }
}

TEST(Layout, Deterministic) {
  for (const Train& t : sample_trains(50, 2)) {
    const auto a = layout(t, {});
    const auto b = layout(t, {});
    ASSERT_EQ(a.objects.size(), b.objects.size());
    for (std::size_t i = 0; i < a.objects.size(); ++i) EXPECT_EQ(a.objects[i].polygon, b.objects[i].polygon);
  }
}

TEST(Layout, InvariantsOverManyScenes) {
  for (const Train& t : sample_trains(1000, 3)) {
    const SceneGraph g = layout(t, {});
    // bbox is the polygon's extrema
    for (const auto& o : g.objects) {
      ASSERT_GE(o.polygon.size(), 3u) << o.tag;
      double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
      for (const auto& p : o.polygon) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
      }
      ASSERT_EQ(o.bbox.x0, x0);
      ASSERT_EQ(o.bbox.y0, y0);
      ASSERT_EQ(o.bbox.x1, x1);
      ASSERT_EQ(o.bbox.y1, y1);
    }
    // per-car x-extent over all its objects; pairwise disjoint
    std::map<int, std::pair<double, double>> extent;
    for (const auto& o : g.objects) {
      const int k = owner(o);
      if (k == 0) continue;
      auto [it, fresh] = extent.emplace(k, std::pair{o.bbox.x0, o.bbox.x1});
      if (!fresh) it->second = {std::min(it->second.first, o.bbox.x0), std::max(it->second.second, o.bbox.x1)};
    }
    ASSERT_EQ(extent.size(), t.size());
    for (auto a = extent.begin(); a != extent.end(); ++a)
      for (auto b = std::next(a); b != extent.end(); ++b)
        ASSERT_TRUE(a->second.second < b->second.first || b->second.second < a->second.first);
    // depth ranks are a permutation
    std::vector<int> ranks;
    for (const auto& o : g.objects) ranks.push_back(o.depth_rank);
    std::sort(ranks.begin(), ranks.end());
    for (std::size_t i = 0; i < ranks.size(); ++i) ASSERT_EQ(ranks[i], static_cast<int>(i));
    // car records match the train length
    ASSERT_EQ(std::count_if(g.objects.begin(), g.objects.end(), [](auto& o) { return o.kind == "car"; }),
              static_cast<long>(t.size()));
  }
}

TEST(Layout, LoadsInsideTheirCarAndInFront) {
  for (const Train& t : sample_trains(300, 4)) {
    const SceneGraph g = layout(t, {});
    const auto* bg = find(g, "background");
    ASSERT_NE(bg, nullptr);
    for (const Car& c : t.cars) {
      const auto* body = find(g, "car" + std::to_string(c.position));
      for (int j = 1; j <= c.load_count(); ++j) {
        const auto* load = find(g, "load" + std::to_string(c.position) + "." + std::to_string(j));
        ASSERT_NE(load, nullptr);
        EXPECT_GT(load->bbox.x0, body->bbox.x0);
        EXPECT_LT(load->bbox.x1, body->bbox.x1);
        EXPECT_GT(load->bbox.y0, body->bbox.y0);
        EXPECT_LT(load->bbox.y1, body->bbox.y1);
        EXPECT_LT(load->depth_rank, body->depth_rank);
      }
      EXPECT_EQ(find(g, "load" + std::to_string(c.position) + "." + std::to_string(c.load_count() + 1)), nullptr);
      EXPECT_LT(body->depth_rank, bg->depth_rank);
    }
    EXPECT_EQ(bg->depth_rank, static_cast<int>(g.objects.size()) - 1);
  }
}

TEST(Layout, EmptyCarHasNoLoadElements) {
  const Train t = oracle::train({car(Length::long_car, Colour::yellow, Roof::none)});
  const SceneGraph g = layout(t, {});
  for (const auto& o : g.objects) EXPECT_NE(o.kind, "load");
  EXPECT_NE(find(g, "car1.floor"), nullptr);
  EXPECT_EQ(render_svg(g).find("data-kind=\"load\""), std::string::npos);
}

TEST(Layout, LocoTranslationCovariance) {
  for (const Train& t : sample_trains(200, 5)) {
    LayoutParams a, b;
    b.loco_len = a.loco_len + 1.25;
    const SceneGraph ga = layout(t, a), gb = layout(t, b);
    ASSERT_EQ(ga.objects.size(), gb.objects.size());
    for (std::size_t i = 0; i < ga.objects.size(); ++i) {
      if (owner(ga.objects[i]) == 0) continue;
      ASSERT_EQ(ga.objects[i].tag, gb.objects[i].tag);
      for (std::size_t v = 0; v < ga.objects[i].polygon.size(); ++v) {
        ASSERT_NEAR(gb.objects[i].polygon[v].x - ga.objects[i].polygon[v].x, a.scale * 1.25, 1e-9);
        ASSERT_EQ(gb.objects[i].polygon[v].y, ga.objects[i].polygon[v].y);
      }
    }
  }
}

TEST(Layout, EverySlotEncoded) {
  for (const Train& t : sample_trains(300, 6)) {
    const SceneGraph g = layout(t, {});
    for (const Car& c : t.cars) {
      std::set<std::string> slots;
      for (const auto& o : g.objects)
        if (owner(o) == c.position) slots.insert(o.slots.begin(), o.slots.end());
      EXPECT_EQ(slots, (std::set<std::string>{"colour", "length", "wall", "roof", "axles", "loads"}));
      int axles = 0;
      for (const auto& o : g.objects) axles += owner(o) == c.position && o.kind == "axle";
      EXPECT_EQ(axles, c.axles);
    }
  }
}

TEST(Layout, TrainsAndBlocksShareSkeleton) {
  for (const Train& t : sample_trains(100, 7)) {
    const Train tt = map_vocabulary(t, Vocabulary::trains), tb = map_vocabulary(t, Vocabulary::blocks);
    const SceneGraph a = layout(tt, {}), b = layout(tb, {});
    ASSERT_EQ(a.objects.size(), b.objects.size());
    bool glyphs_differ = false;
    for (std::size_t i = 0; i < a.objects.size(); ++i) {
      EXPECT_EQ(a.objects[i].tag, b.objects[i].tag);
      EXPECT_EQ(a.objects[i].kind, b.objects[i].kind);
      EXPECT_EQ(a.objects[i].depth_rank, b.objects[i].depth_rank);
      if (a.objects[i].kind == "car") EXPECT_EQ(a.objects[i].bbox.x0, b.objects[i].bbox.x0);
      glyphs_differ |= a.objects[i].glyph != b.objects[i].glyph;
    }
    EXPECT_TRUE(glyphs_differ);
  }
}

TEST(Svg, DepthOrderedWithDataAttributes) {
  const Train t = oracle::train({car(Length::short_car, Colour::red, Roof::flat, {LoadShape::diamond, LoadShape::diamond}),
                                 car(Length::long_car, Colour::yellow, Roof::bars, {LoadShape::barrel}, 3, Wall::full)});
  const SceneGraph g = layout(t, {});
  const std::string svg = render_svg(g);
  static const std::regex depth_re("data-depth=\"(\\d+)\"");
  std::vector<int> depths;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), depth_re); it != std::sregex_iterator(); ++it)
    depths.push_back(std::stoi((*it)[1]));
  ASSERT_EQ(depths.size(), g.objects.size());
  EXPECT_TRUE(std::is_sorted(depths.rbegin(), depths.rend()));
  EXPECT_NE(svg.find("data-tag=\"load1.2\""), std::string::npos);
  EXPECT_NE(svg.find("data-glyph=\"bars\""), std::string::npos);
  EXPECT_EQ(svg.find("e-"), std::string::npos); // no exponent notation
}

TEST(Svg, AnnotationRoundTripIsByteIdentical) {
  for (const Train& t : sample_trains(200, 8)) {
    LayoutParams p;
    p.background = "desert";
    const SceneGraph g = layout(t, p);
    const auto j = annotations(g);
    EXPECT_EQ(j["schema_version"], 1);
    const SceneGraph back = scene_from_annotations(nlohmann::json::parse(j.dump()));
    ASSERT_EQ(render_svg(back), render_svg(g));
    for (const auto& o : j["objects"]) {
      const auto& b = o["bbox"];
      double x0 = 1e300, x1 = -1e300;
      for (const auto& v : o["polygon"]) {
        x0 = std::min(x0, v[0].get<double>());
        x1 = std::max(x1, v[0].get<double>());
      }
      ASSERT_EQ(b[0].get<double>(), x0);
      ASSERT_EQ(b[2].get<double>(), x1);
    }
  }
}

TEST(Params, Validation) {
  LayoutParams p;
  p.gap = 0;
  EXPECT_THROW(p.check(), Error);
  EXPECT_THROW(layout(Train{}, p), Error);
  p = {};
  p.scale = -1;
  EXPECT_THROW(p.check(), Error);
  EXPECT_NO_THROW(layout(Train{}, LayoutParams{}));
}
