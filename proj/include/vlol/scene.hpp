#pragma once

#include <cmath>
#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "domain.hpp"

namespace vlol {

/// Side-view geometry, in layout units unless noted. The background tag is
/// metadata only and selects a flat fill colour.
struct LayoutParams {
  double scale = 10.0; // pixels per unit
  double loco_len = 3.0;
  double short_len = 2.0;
  double long_len = 4.0;
  double gap = 0.5;
  double car_height = 1.5;
  std::string background = "base";

  void check() const {
    if (!(scale > 0 && loco_len > 0 && short_len > 0 && long_len > 0 && gap > 0 && car_height > 0))
      throw Error("layout lengths must all be positive");
  }
};

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct BBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  friend bool operator==(const BBox&, const BBox&) = default;
};

struct SceneObject {
  std::string tag;   // locomotive, car3, car3.roof, car3.axle2, load3.1, background
  std::string kind;  // locomotive | car | wall | roof | axle | load | background
  std::string glyph; // attribute value the shape depicts
  std::string fill;
  std::vector<std::string> slots; // car attribute slots this element encodes
  std::vector<Point> polygon;     // pixels
  BBox bbox;
  Point centroid; // polygon area centroid, stands in for a 3D object centre
  int depth_rank = 0; // 0 = frontmost

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct SceneGraph {
  Vocabulary vocabulary = Vocabulary::trains;
  std::string background = "base";
  double width = 0;
  double height = 0;
  std::vector<SceneObject> objects;

  friend bool operator==(const SceneGraph&, const SceneGraph&) = default;
};

inline BBox bbox_of(const std::vector<Point>& poly) {
  BBox b{poly.front().x, poly.front().y, poly.front().x, poly.front().y};
  for (const auto& p : poly) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

inline Point centroid_of(const std::vector<Point>& poly) {
  double a = 0, cx = 0, cy = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    const double cross = p.x * q.y - q.x * p.y;
    a += cross;
    cx += (p.x + q.x) * cross;
    cy += (p.y + q.y) * cross;
  }
  if (a == 0) {
    Point m;
    for (const auto& p : poly) {
      m.x += p.x;
      m.y += p.y;
    }
    m.x /= static_cast<double>(poly.size());
    m.y /= static_cast<double>(poly.size());
    return m;
  }
  return {cx / (3 * a), cy / (3 * a)};
}

namespace detail {

// Unit shapes on [-1, 1]^2, y down. Literal coordinates keep the output
// independent of the platform's trig functions.
using Shape = std::vector<Point>;

inline const Shape& circle16() {
  static const Shape s{{1, 0},       {0.9239, 0.3827},  {0.7071, 0.7071},  {0.3827, 0.9239},
                       {0, 1},       {-0.3827, 0.9239}, {-0.7071, 0.7071}, {-0.9239, 0.3827},
                       {-1, 0},      {-0.9239, -0.3827}, {-0.7071, -0.7071}, {-0.3827, -0.9239},
                       {0, -1},      {0.3827, -0.9239}, {0.7071, -0.7071},  {0.9239, -0.3827}};
  return s;
}

inline Shape unit_load_shape(Vocabulary v, LoadShape s) {
  if (v == Vocabulary::blocks) {
    switch (s) {
    case LoadShape::blue_box: return circle16();                                     // sphere
    case LoadShape::golden_vase: return {{0, -1}, {1, 1}, {-1, 1}};                   // pyramid
    case LoadShape::barrel: return {{-0.8, -0.8}, {0.8, -0.8}, {0.8, 0.8}, {-0.8, 0.8}}; // cube
    case LoadShape::diamond:                                                          // cylinder
      return {{-0.6, -0.8}, {0, -1}, {0.6, -0.8}, {0.6, 0.8}, {0, 1}, {-0.6, 0.8}};
    case LoadShape::metal_pot: return {{0, -1}, {0.6, 1}, {-0.6, 1}}; // cone
    case LoadShape::oval_vase: {                                        // torus, seen edge-on
      Shape t;
      for (const auto& p : circle16()) t.push_back({p.x, p.y * 0.45});
      return t;
    }
    case LoadShape::none: break;
    }
    return {};
  }
  switch (s) {
  case LoadShape::blue_box: return {{-0.8, -0.8}, {0.8, -0.8}, {0.8, 0.8}, {-0.8, 0.8}};
  case LoadShape::golden_vase:
    return {{-0.25, -1}, {0.25, -1}, {0.25, -0.6}, {0.7, -0.1}, {0.45, 1}, {-0.45, 1}, {-0.7, -0.1}, {-0.25, -0.6}};
  case LoadShape::barrel:
    return {{-0.45, -1}, {0.45, -1}, {0.7, -0.5}, {0.7, 0.5}, {0.45, 1}, {-0.45, 1}, {-0.7, 0.5}, {-0.7, -0.5}};
  case LoadShape::diamond: return {{0, -1}, {0.8, 0}, {0, 1}, {-0.8, 0}};
  case LoadShape::metal_pot: return {{-1, -0.6}, {1, -0.6}, {0.6, 0.8}, {-0.6, 0.8}};
  case LoadShape::oval_vase: {
    Shape t;
    for (const auto& p : circle16()) t.push_back({p.x * 0.55, p.y});
    return t;
  }
  case LoadShape::none: break;
  }
  return {};
}

inline std::string colour_fill(Colour c) {
  static constexpr std::array<std::string_view, 5> fills{"#e8c547", "#4c9a52", "#8c8c8c", "#c8453b", "#3b6fc8"};
  return std::string(fills[static_cast<std::size_t>(c)]);
}

inline std::string load_fill(Vocabulary v, LoadShape s) {
  static constexpr std::array<std::string_view, 6> trains{"#2f5fb3", "#d4a017", "#8b5a2b", "#9fd8e6", "#7d7f83", "#b07cc6"};
  static constexpr std::array<std::string_view, 6> blocks{"#d9534f", "#5cb85c", "#5bc0de", "#f0ad4e", "#9370db", "#20b2aa"};
  return std::string((v == Vocabulary::blocks ? blocks : trains)[static_cast<std::size_t>(s)]);
}

inline std::string background_fill(std::string_view tag) {
  if (tag == "desert") return "#e3c58f";
  if (tag == "sky") return "#9cc8ef";
  if (tag == "fisheye") return "#b9b0c8";
  return "#dcdcdc";
}

} // namespace detail

namespace detail {
// Pixel coordinates live on a 1e-6 grid so they print and parse back exactly.
inline double snap(double v) { return std::round(v * 1e6) / 1e6; }
} // namespace detail

/// Deterministic 2D layout. The locomotive occupies [0, loco_len]; car k's
/// left edge is loco_len + Σ_{i<k}(len_i + gap), all scaled to pixels. Every
/// element of a car stays inside the car's x-extent; loads sit evenly spaced
/// inside the body.
inline SceneGraph layout(const Train& train, const LayoutParams& params) {
  params.check();
  const Vocabulary v = train.vocabulary;
  const bool blocks = v == Vocabulary::blocks;
  const double s = params.scale;
  const double roof_h = 0.5;
  const double body_top = 0.5 + roof_h;
  const double body_bottom = body_top + params.car_height;
  const double wheel_r = 0.3;
  const double wheel_cy = body_bottom + wheel_r;

  SceneGraph g;
  g.vocabulary = v;
  g.background = params.background;
  double end = params.loco_len;
  for (const Car& c : train.cars) end += (c.is_short() ? params.short_len : params.long_len) + params.gap;
  g.width = detail::snap(s * (end + (train.cars.empty() ? params.gap : 0.0)));
  g.height = detail::snap(s * (wheel_cy + wheel_r + 0.4));

  // Depth layers, front to back.
  enum Layer { load_layer, glyph_layer, body_layer, background_layer };
  std::vector<int> layer;

  auto px = [s](double ux, double uy) { return Point{detail::snap(s * ux), detail::snap(s * uy)}; };
  auto add = [&](Layer l, std::string tag, std::string kind, std::string glyph, std::string fill,
                 std::vector<std::string> slots, std::vector<Point> poly) {
    SceneObject o;
    o.tag = std::move(tag);
    o.kind = std::move(kind);
    o.glyph = std::move(glyph);
    o.fill = std::move(fill);
    o.slots = std::move(slots);
    o.polygon = std::move(poly);
    g.objects.push_back(std::move(o));
    layer.push_back(l);
  };
  auto rect = [&](double x0, double y0, double x1, double y1) {
    return std::vector<Point>{px(x0, y0), px(x1, y0), px(x1, y1), px(x0, y1)};
  };

  add(background_layer, "background", "background", params.background, detail::background_fill(params.background), {},
      {{0, 0}, {g.width, 0}, {g.width, g.height}, {0, g.height}});

  {
    const double L = params.loco_len;
    add(body_layer, "locomotive", "locomotive", "locomotive", "#2b2b2b", {},
        {px(0.1 * L, body_bottom), px(0.1 * L, body_top + 0.3), px(0.25 * L, body_top + 0.3), px(0.25 * L, 0.5),
         px(0.4 * L, 0.5), px(0.4 * L, body_top + 0.3), px(0.6 * L, body_top + 0.3), px(0.6 * L, body_top - 0.2),
         px(L, body_top - 0.2), px(L, body_bottom)});
  }

  double x = params.loco_len;
  for (const Car& c : train.cars) {
    const std::string k = std::to_string(c.position);
    const double len = c.is_short() ? params.short_len : params.long_len;
    const double x0 = x, x1 = x + len;

    add(body_layer, "car" + k, "car", std::string(name_of(v, c.length)), detail::colour_fill(c.colour),
        {"colour", "length"}, rect(x0, body_top, x1, body_bottom));

    // wall (blocks: black top band)
    if (blocks) {
      add(glyph_layer, "car" + k + ".wall", "wall", std::string(name_of(v, c.wall)),
          c.wall == Wall::full ? "#111111" : "#f4f4f4", {"wall"}, rect(x0, body_top, x1, body_top + 0.25));
    } else if (c.wall == Wall::full) {
      add(glyph_layer, "car" + k + ".wall", "wall", "full", "#5a4632", {"wall"},
          rect(x0 + 0.1, body_top + 0.1, x1 - 0.1, body_bottom - 0.1));
    } else {
      // top rail with posts, one polygon
      const double l = x0 + 0.1, r = x1 - 0.1, top = body_top + 0.1, rail = body_top + 0.25, bottom = body_bottom - 0.1;
      const double post = 0.08;
      std::vector<Point> comb{px(l, top), px(r, top), px(r, bottom), px(r - post, bottom), px(r - post, rail)};
      const int inner = static_cast<int>(len * 2) - 1;
      for (int i = inner; i >= 1; --i) {
        const double cx = l + (r - l) * i / (inner + 1);
        comb.push_back(px(cx + post / 2, rail));
        comb.push_back(px(cx + post / 2, bottom));
        comb.push_back(px(cx - post / 2, bottom));
        comb.push_back(px(cx - post / 2, rail));
      }
      comb.push_back(px(l + post, rail));
      comb.push_back(px(l + post, bottom));
      comb.push_back(px(l, bottom));
      add(glyph_layer, "car" + k + ".wall", "wall", "railing", "#7a6a55", {"wall"}, std::move(comb));
    }

    // roof (blocks: car shape on top of the body)
    {
      const double top = body_top - roof_h;
      const double xm = (x0 + x1) / 2;
      std::vector<Point> poly;
      if (blocks) {
        switch (c.roof) {
        case Roof::none: poly = rect(x0 + 0.2, top + 0.1, x1 - 0.2, body_top); break; // cube
        case Roof::frame:                                                               // cylinder
          poly = {px(x0 + 0.2, body_top), px(x0 + 0.2, top + 0.15), px(xm, top), px(x1 - 0.2, top + 0.15),
                  px(x1 - 0.2, body_top)};
          break;
        case Roof::flat: // hemisphere
          poly = {px(x0 + 0.1, body_top), px(x0 + 0.25, top + 0.2), px(xm, top), px(x1 - 0.25, top + 0.2),
                  px(x1 - 0.1, body_top)};
          break;
        case Roof::bars: poly = {px(x0 + 0.1, body_top), px(x0 + 0.4, top), px(x1 - 0.4, top), px(x1 - 0.1, body_top)}; break; // frustum
        case Roof::peaked:                                                                                                      // hex prism
          poly = {px(x0 + 0.1, body_top), px(x0 + 0.1, top + 0.25), px(x0 + 0.35, top), px(x1 - 0.35, top),
                  px(x1 - 0.1, top + 0.25), px(x1 - 0.1, body_top)};
          break;
        }
      } else {
        switch (c.roof) {
        case Roof::none: poly = rect(x0, body_top - 0.05, x1, body_top); break;
        case Roof::frame:
          poly = {px(x0, body_top), px(x0, top), px(x1, top), px(x1, body_top), px(x1 - 0.1, body_top),
                  px(x1 - 0.1, top + 0.1), px(x0 + 0.1, top + 0.1), px(x0 + 0.1, body_top)};
          break;
        case Roof::flat: poly = rect(x0, body_top - 0.15, x1, body_top); break;
        case Roof::bars: {
          poly = {px(x0, body_top)};
          const int bars = static_cast<int>(len * 2);
          const double step = len / bars;
          for (int i = 0; i < bars; ++i) {
            const double a = x0 + step * i;
            poly.push_back(px(a, top));
            poly.push_back(px(a + step / 2, top));
            poly.push_back(px(a + step / 2, body_top - 0.15));
            poly.push_back(px(a + step, body_top - 0.15));
          }
          poly.back() = px(x1, top);
          poly.push_back(px(x1, body_top));
          break;
        }
        case Roof::peaked: poly = {px(x0, body_top), px(xm, top), px(x1, body_top)}; break;
        }
      }
      add(glyph_layer, "car" + k + ".roof", "roof", std::string(name_of(v, c.roof)),
          blocks ? detail::colour_fill(c.colour) : std::string("#3d3d3d"), {"roof"}, std::move(poly));
    }

    // axles (blocks: black bottom blocks)
    for (int a = 0; a < c.axles; ++a) {
      const double cx = x0 + (a + 0.5) * len / c.axles;
      std::vector<Point> poly;
      if (blocks) {
        poly = rect(cx - wheel_r, wheel_cy - wheel_r, cx + wheel_r, wheel_cy + wheel_r);
      } else {
        for (const auto& p : detail::circle16()) poly.push_back(px(cx + wheel_r * p.x, wheel_cy + wheel_r * p.y));
      }
      const std::string glyph = blocks ? std::string(table(v).axles[c.axles == 2 ? 0 : 1]) : std::to_string(c.axles);
      add(glyph_layer, "car" + k + ".axle" + std::to_string(a + 1), "axle", glyph,
          blocks ? (c.axles == 2 ? "#111111" : "#9a9a9a") : "#1e1e1e", {"axles"}, std::move(poly));
    }

    // loads
    const double inset = 0.2;
    const int m = c.load_count();
    for (int j = 0; j < m; ++j) {
      const double slot_w = (len - 2 * inset) / m;
      const double cx = x0 + inset + (j + 0.5) * slot_w;
      const double cy = body_top + params.car_height / 2;
      const double half = std::min(0.4, 0.4 * slot_w) * std::min(1.0, params.car_height / 1.0);
      std::vector<Point> poly;
      for (const auto& p : detail::unit_load_shape(v, c.loads[static_cast<std::size_t>(j)]))
        poly.push_back(px(cx + half * p.x, cy + half * p.y));
      add(load_layer, "load" + k + "." + std::to_string(j + 1), "load",
          std::string(name_of(v, c.loads[static_cast<std::size_t>(j)])),
          detail::load_fill(v, c.loads[static_cast<std::size_t>(j)]), {"loads"}, std::move(poly));
    }
    if (m == 0) {
      // empty cars still carry a load-count marker: a flat floor strip
      add(glyph_layer, "car" + k + ".floor", "floor", "0", "#b5b5b5", {"loads"},
          rect(x0 + inset, body_bottom - 0.08, x1 - inset, body_bottom - 0.02));
    }
    x = x1 + params.gap;
  }

  // depth: layer first, then construction order
  std::vector<std::size_t> order(g.objects.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return layer[a] < layer[b]; });
  for (std::size_t r = 0; r < order.size(); ++r) g.objects[order[r]].depth_rank = static_cast<int>(r);
  for (auto& o : g.objects) {
    o.bbox = bbox_of(o.polygon);
    o.centroid = centroid_of(o.polygon);
  }
  return g;
}

namespace detail {

inline void append_number(std::string& out, double v) {
  if (v == 0) v = 0; // no "-0"
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline std::string xml_escape(std::string_view s) {
  std::string o;
  for (char c : s) {
    switch (c) {
    case '&': o += "&amp;"; break;
    case '<': o += "&lt;"; break;
    case '>': o += "&gt;"; break;
    case '"': o += "&quot;"; break;
    default: o += c;
    }
  }
  return o;
}

} // namespace detail

/// One <polygon> per object, back to front (descending depth rank).
inline std::string render_svg(const SceneGraph& g) {
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"";
  detail::append_number(out, g.width);
  out += "\" height=\"";
  detail::append_number(out, g.height);
  out += "\" viewBox=\"0 0 ";
  detail::append_number(out, g.width);
  out += ' ';
  detail::append_number(out, g.height);
  out += "\" data-vocabulary=\"";
  out += to_string(g.vocabulary);
  out += "\" data-background=\"" + detail::xml_escape(g.background) + "\">\n";
  std::vector<const SceneObject*> order;
  for (const auto& o : g.objects) order.push_back(&o);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->depth_rank > b->depth_rank; });
  for (const SceneObject* o : order) {
    out += "  <polygon data-tag=\"" + detail::xml_escape(o->tag) + "\" data-kind=\"" + o->kind + "\" data-glyph=\"" +
           detail::xml_escape(o->glyph) + "\" data-depth=\"" + std::to_string(o->depth_rank) + "\" data-slots=\"";
    for (std::size_t i = 0; i < o->slots.size(); ++i) {
      if (i) out += ',';
      out += o->slots[i];
    }
    out += "\" fill=\"" + o->fill + "\" points=\"";
    for (std::size_t i = 0; i < o->polygon.size(); ++i) {
      if (i) out += ' ';
      detail::append_number(out, o->polygon[i].x);
      out += ',';
      detail::append_number(out, o->polygon[i].y);
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

inline constexpr int kSceneSchemaVersion = 1;

/// Ground-truth record per object: tag, bbox, polygon (mask), depth rank.
inline nlohmann::ordered_json annotations(const SceneGraph& g) {
  nlohmann::ordered_json j;
  j["schema"] = "vlol.scene";
  j["schema_version"] = kSceneSchemaVersion;
  j["vocabulary"] = to_string(g.vocabulary);
  j["background"] = g.background;
  j["width"] = g.width;
  j["height"] = g.height;
  auto objs = nlohmann::ordered_json::array();
  for (const auto& o : g.objects) {
    nlohmann::ordered_json oj;
    oj["tag"] = o.tag;
    oj["kind"] = o.kind;
    oj["glyph"] = o.glyph;
    oj["fill"] = o.fill;
    oj["slots"] = o.slots;
    oj["bbox"] = {o.bbox.x0, o.bbox.y0, o.bbox.x1, o.bbox.y1};
    auto poly = nlohmann::ordered_json::array();
    for (const auto& p : o.polygon) poly.push_back({p.x, p.y});
    oj["polygon"] = std::move(poly);
    oj["centroid"] = {o.centroid.x, o.centroid.y};
    oj["depth_rank"] = o.depth_rank;
    objs.push_back(std::move(oj));
  }
  j["objects"] = std::move(objs);
  return j;
}

inline SceneGraph scene_from_annotations(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != kSceneSchemaVersion) throw Error("unsupported scene schema version");
  SceneGraph g;
  g.vocabulary = vocabulary_from_string(j.at("vocabulary").get<std::string>());
  g.background = j.at("background").get<std::string>();
  g.width = j.at("width").get<double>();
  g.height = j.at("height").get<double>();
  for (const auto& oj : j.at("objects")) {
    SceneObject o;
    o.tag = oj.at("tag").get<std::string>();
    o.kind = oj.at("kind").get<std::string>();
    o.glyph = oj.at("glyph").get<std::string>();
    o.fill = oj.at("fill").get<std::string>();
    o.slots = oj.at("slots").get<std::vector<std::string>>();
    const auto& b = oj.at("bbox");
    o.bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    for (const auto& p : oj.at("polygon")) o.polygon.push_back({p[0].get<double>(), p[1].get<double>()});
    const auto& c = oj.at("centroid");
    o.centroid = {c[0].get<double>(), c[1].get<double>()};
    o.depth_rank = oj.at("depth_rank").get<int>();
    g.objects.push_back(std::move(o));
  }
  return g;
}

} // namespace vlol
