#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "domain.hpp"

namespace vlol {

enum class ConstraintSetKind : std::uint8_t { michalski, random_viz };

constexpr std::string_view to_string(ConstraintSetKind k) noexcept {
  return k == ConstraintSetKind::michalski ? "michalski" : "random_viz";
}

inline ConstraintSetKind constraint_set_from_string(std::string_view s) {
  if (s == "michalski") return ConstraintSetKind::michalski;
  if (s == "random_viz" || s == "random") return ConstraintSetKind::random_viz;
  throw Error("unknown constraint set '" + std::string(s) + "'");
}

struct ConstraintInfo {
  std::string_view id;
  std::string_view text;
};

// Michalski constraints as stated for the original descriptors, applied here
// through the canonical vocabulary bijection (rectangular = yellow,
// hexagonal = red, elliptical = grey, arc = frame, jagged = bars,
// double = railing; circle = barrel, triangle = golden vase,
// rectangle = blue box, inverted triangle = oval vase, hexagon = metal pot).
inline constexpr std::array<ConstraintInfo, 11> kMichalskiConstraints{{
    {"C1", "a train has between min_cars and max_cars cars (2..4 by default)"},
    {"C2", "a long car has two or three axles; a short car has two"},
    {"C3", "a long car must be yellow"},
    {"C4", "a red or grey car is necessarily closed"},
    {"C5", "the roof of a long closed car is flat or bars"},
    {"C6", "a closed short car: red => flat, grey => frame, otherwise flat or peaked"},
    {"C7", "only a short yellow car may have a railing wall"},
    {"C8", "a long car holds 0-3 replicas of barrel, oval_vase, metal_pot or blue_box"},
    {"C9", "a short car holds 1-2 replicas of barrel, golden_vase, blue_box or diamond"},
    {"C10", "no sub-distinctions among box loads (no-op)"},
    {"C11", "hollow and solid wheels are not distinguished (no-op)"},
}};

inline constexpr std::array<ConstraintInfo, 2> kRandomVizConstraints{{
    {"V1", "a short car carries at most two loads"},
    {"V2", "load shape 'none' appears iff the load count is 0"},
}};

struct ConstraintSet {
  ConstraintSetKind kind = ConstraintSetKind::michalski;
  // Train-length bounds for C1 (michalski only).
  int min_cars = 2;
  int max_cars = 4;
  // Bit i set => the i-th constraint of the set is skipped by validation.
  std::uint32_t disabled = 0;

  static ConstraintSet michalski(int min_cars = 2, int max_cars = 4) {
    return {ConstraintSetKind::michalski, min_cars, max_cars, 0};
  }
  static ConstraintSet random_viz() { return {ConstraintSetKind::random_viz, 1, 1 << 20, 0}; }
  static ConstraintSet named(std::string_view name) {
    return constraint_set_from_string(name) == ConstraintSetKind::michalski ? michalski() : random_viz();
  }

  std::size_t constraint_count() const noexcept {
    return kind == ConstraintSetKind::michalski ? kMichalskiConstraints.size() : kRandomVizConstraints.size();
  }
  std::string_view id(std::size_t i) const noexcept {
    return kind == ConstraintSetKind::michalski ? kMichalskiConstraints[i].id : kRandomVizConstraints[i].id;
  }
  bool enabled(std::size_t i) const noexcept { return (disabled & (1u << i)) == 0; }

  ConstraintSet without(std::string_view constraint_id) const {
    ConstraintSet s = *this;
    for (std::size_t i = 0; i < constraint_count(); ++i)
      if (id(i) == constraint_id) s.disabled |= 1u << i;
    return s;
  }
};

struct Violation {
  std::string constraint;
  int position = 0; // 0 => train-level
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline nlohmann::ordered_json to_json(const Violation& v) {
  nlohmann::ordered_json j;
  j["constraint"] = v.constraint;
  if (v.position > 0)
    j["position"] = v.position;
  else
    j["position"] = nullptr;
  j["message"] = v.message;
  return j;
}

namespace detail {

inline bool all_same(const std::vector<LoadShape>& loads) {
  return std::adjacent_find(loads.begin(), loads.end(), std::not_equal_to<>()) == loads.end();
}

template <std::size_t N>
bool all_in(const std::vector<LoadShape>& loads, const std::array<LoadShape, N>& allowed) {
  return std::all_of(loads.begin(), loads.end(), [&](LoadShape s) {
    return std::find(allowed.begin(), allowed.end(), s) != allowed.end();
  });
}

inline constexpr std::array<LoadShape, 4> kLongCarLoads{LoadShape::blue_box, LoadShape::barrel,
                                                        LoadShape::metal_pot, LoadShape::oval_vase};
inline constexpr std::array<LoadShape, 4> kShortCarLoads{LoadShape::blue_box, LoadShape::golden_vase,
                                                         LoadShape::barrel, LoadShape::diamond};

/// Whether constraint `index` of `kind` holds for one car (C1 is train-level and always holds here).
inline bool car_satisfies(ConstraintSetKind kind, std::size_t index, const Car& c) {
  if (kind == ConstraintSetKind::random_viz) {
    switch (index) {
    case 0: return !(c.is_short() && c.load_count() > 2);
    case 1: return std::find(c.loads.begin(), c.loads.end(), LoadShape::none) == c.loads.end();
    }
    return true;
  }
  switch (index) {
  case 1: return c.is_long() || c.axles == 2;
  case 2: return c.is_short() || c.colour == Colour::yellow;
  case 3: return !((c.colour == Colour::red || c.colour == Colour::grey) && c.open());
  case 4: return !(c.is_long() && c.closed()) || c.roof == Roof::flat || c.roof == Roof::bars;
  case 5:
    if (!(c.is_short() && c.closed())) return true;
    if (c.colour == Colour::red) return c.roof == Roof::flat;
    if (c.colour == Colour::grey) return c.roof == Roof::frame;
    return c.roof == Roof::flat || c.roof == Roof::peaked;
  case 6: return c.wall == Wall::full || (c.is_short() && c.colour == Colour::yellow);
  case 7: return !c.is_long() || (all_same(c.loads) && all_in(c.loads, kLongCarLoads));
  case 8:
    return !c.is_short() ||
           (c.load_count() >= 1 && c.load_count() <= 2 && all_same(c.loads) && all_in(c.loads, kShortCarLoads));
  }
  return true;
}

} // namespace detail

/// Violations of a single car (position-independent constraints only).
inline std::vector<Violation> validate_car(const Car& car, const ConstraintSet& set) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < set.constraint_count(); ++i) {
    if (!set.enabled(i)) continue;
    if (set.kind == ConstraintSetKind::michalski && i == 0) continue;
    if (!detail::car_satisfies(set.kind, i, car)) {
      const auto& ci = set.kind == ConstraintSetKind::michalski ? kMichalskiConstraints[i] : kRandomVizConstraints[i];
      out.push_back({std::string(ci.id), car.position, std::string(ci.text)});
    }
  }
  return out;
}

/// All violations of a train under `set`; empty iff the train is valid.
inline std::vector<Violation> validate_train(const Train& train, const ConstraintSet& set) {
  std::vector<Violation> out;
  if (set.kind == ConstraintSetKind::michalski && set.enabled(0)) {
    const int n = static_cast<int>(train.size());
    if (n < set.min_cars || n > set.max_cars)
      out.push_back({"C1", 0,
                     "train has " + std::to_string(n) + " cars; expected " + std::to_string(set.min_cars) +
                         ".." + std::to_string(set.max_cars)});
  }
  for (const Car& c : train.cars) {
    auto v = validate_car(c, set);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

inline bool is_valid(const Train& train, const ConstraintSet& set) { return validate_train(train, set).empty(); }

// Constructive domains ------------------------------------------------------
//
// Slot order for constructive enumeration and sequential sampling:
// length, colour, wall, roof, axles, load count, load shapes.
// Each domain lists exactly the values that still admit a valid completion
// given the slots fixed so far, so no partial car is ever a dead end.

namespace domains {

inline std::vector<Length> lengths(ConstraintSetKind) { return {Length::short_car, Length::long_car}; }

inline std::vector<Colour> colours(ConstraintSetKind k, Length len) {
  if (k == ConstraintSetKind::michalski && len == Length::long_car) return {Colour::yellow};
  return {Colour::yellow, Colour::green, Colour::grey, Colour::red, Colour::blue};
}

inline std::vector<Wall> walls(ConstraintSetKind k, Length len, Colour col) {
  if (k == ConstraintSetKind::michalski && !(len == Length::short_car && col == Colour::yellow)) return {Wall::full};
  return {Wall::full, Wall::railing};
}

inline std::vector<Roof> roofs(ConstraintSetKind k, Length len, Colour col) {
  if (k == ConstraintSetKind::random_viz) return {Roof::none, Roof::frame, Roof::flat, Roof::bars, Roof::peaked};
  if (len == Length::long_car) return {Roof::none, Roof::flat, Roof::bars};
  if (col == Colour::red) return {Roof::flat};
  if (col == Colour::grey) return {Roof::frame};
  return {Roof::none, Roof::flat, Roof::peaked};
}

inline std::vector<int> axles(ConstraintSetKind k, Length len) {
  if (k == ConstraintSetKind::michalski && len == Length::short_car) return {2};
  return {2, 3};
}

inline std::vector<int> load_counts(ConstraintSetKind k, Length len) {
  if (len == Length::long_car) return {0, 1, 2, 3};
  if (k == ConstraintSetKind::michalski) return {1, 2};
  return {0, 1, 2};
}

/// Shapes allowed for the next load, given the loads already placed.
inline std::vector<LoadShape> load_shapes(ConstraintSetKind k, Length len, const std::vector<LoadShape>& placed) {
  if (k == ConstraintSetKind::random_viz)
    return {LoadShape::blue_box, LoadShape::golden_vase, LoadShape::barrel,
            LoadShape::diamond,  LoadShape::metal_pot,   LoadShape::oval_vase};
  if (!placed.empty()) return {placed.front()};
  const auto& src = len == Length::long_car ? detail::kLongCarLoads : detail::kShortCarLoads;
  return {src.begin(), src.end()};
}

} // namespace domains

/// Visits every valid car of a named set exactly once (position fixed to 1),
/// in lexicographic order of canonical slot indices. Returns the count.
template <typename Visitor>
std::uint64_t for_each_valid_car(ConstraintSetKind k, Visitor&& visit) {
  std::uint64_t count = 0;
  Car car;
  car.position = 1;
  // Cross-product order: colour, length, wall, roof, axles, load count, loads.
  auto emit_loads = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      ++count;
      visit(static_cast<const Car&>(car));
      return;
    }
    for (LoadShape s : domains::load_shapes(k, car.length, car.loads)) {
      car.loads.push_back(s);
      self(self, remaining - 1);
      car.loads.pop_back();
    }
  };
  for (int ci = 0; ci < kColourCount; ++ci) {
    for (Length len : domains::lengths(k)) {
      const auto cols = domains::colours(k, len);
      if (std::find(cols.begin(), cols.end(), static_cast<Colour>(ci)) == cols.end()) continue;
      car.colour = static_cast<Colour>(ci);
      car.length = len;
      for (Wall w : domains::walls(k, len, car.colour)) {
        car.wall = w;
        auto rs = domains::roofs(k, len, car.colour);
        std::sort(rs.begin(), rs.end());
        for (Roof r : rs) {
          car.roof = r;
          for (int ax : domains::axles(k, len)) {
            car.axles = ax;
            for (int n : domains::load_counts(k, len)) {
              car.loads.clear();
              emit_loads(emit_loads, n);
            }
          }
        }
      }
    }
  }
  return count;
}

struct CarEnumeration {
  std::uint64_t count = 0;
  std::vector<Car> cars;
};

inline CarEnumeration enumerate_valid_cars(ConstraintSetKind k) {
  CarEnumeration e;
  e.count = for_each_valid_car(k, [&](const Car& c) { e.cars.push_back(c); });
  return e;
}

inline CarEnumeration enumerate_valid_cars(const ConstraintSet& set) { return enumerate_valid_cars(set.kind); }

// Train counts ----------------------------------------------------------------

using u128 = unsigned __int128;

inline std::string to_string_u128(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {s.rbegin(), s.rend()};
}

/// Σ_{n=min..max} per_car^n, throwing if the sum leaves the 128-bit range.
inline u128 count_trains_with(std::uint64_t per_car, int min_cars, int max_cars) {
  if (min_cars < 1 || min_cars > max_cars) throw Error("count_trains requires 1 <= min_cars <= max_cars");
  const u128 max = ~u128{0};
  u128 total = 0;
  u128 power = 1;
  for (int n = 1; n <= max_cars; ++n) {
    if (per_car != 0 && power > max / per_car) throw Error("train count overflows 128 bits");
    power *= per_car;
    if (n >= min_cars) {
      if (total > max - power) throw Error("train count overflows 128 bits");
      total += power;
    }
  }
  return total;
}

/// Number of distinct valid trains with min..max cars. Constraints are
/// per-car, so each position contributes an independent factor; under
/// michalski the range is clipped to the set's C1 bounds.
inline u128 count_trains(const ConstraintSet& set, int min_cars, int max_cars) {
  if (min_cars < 1 || min_cars > max_cars) throw Error("count_trains requires 1 <= min_cars <= max_cars");
  const std::uint64_t per_car = enumerate_valid_cars(set).count;
  if (set.kind == ConstraintSetKind::michalski && set.enabled(0)) {
    const int lo = std::max(min_cars, set.min_cars);
    const int hi = std::min(max_cars, set.max_cars);
    if (lo > hi) return 0;
    return count_trains_with(per_car, lo, hi);
  }
  return count_trains_with(per_car, min_cars, max_cars);
}

} // namespace vlol

namespace vlol {

/// Brute-force count: every tuple of the full attribute cross-product
/// (load slots range over all seven shape values, "none" included) that
/// validate_car accepts. Independent of the constructive domains above.
inline std::uint64_t filtered_car_count(const ConstraintSet& set) {
  std::uint64_t count = 0;
  Car c;
  c.position = 1;
  for (int col = 0; col < kColourCount; ++col)
    for (int len = 0; len < kLengthCount; ++len)
      for (int wall = 0; wall < kWallCount; ++wall)
        for (int roof = 0; roof < kRoofCount; ++roof)
          for (int ax : kAxleValues)
            for (int n = 0; n <= kMaxLoads; ++n) {
              int combos = 1;
              for (int i = 0; i < n; ++i) combos *= kLoadShapeCount + 1;
              for (int code = 0; code < combos; ++code) {
                c.colour = static_cast<Colour>(col);
                c.length = static_cast<Length>(len);
                c.wall = static_cast<Wall>(wall);
                c.roof = static_cast<Roof>(roof);
                c.axles = ax;
                c.loads.clear();
                for (int i = 0, rest = code; i < n; ++i, rest /= kLoadShapeCount + 1)
                  c.loads.push_back(static_cast<LoadShape>(rest % (kLoadShapeCount + 1)));
                if (validate_car(c, set).empty()) ++count;
              }
            }
  return count;
}

} // namespace vlol
