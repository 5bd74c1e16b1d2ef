#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace vlol {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Canonical slot values. Enumerator order is the row order of the attribute
// tables; every vocabulary is a renaming of these indices.
enum class Colour : std::uint8_t { yellow, green, grey, red, blue };
enum class Length : std::uint8_t { short_car, long_car };
enum class Wall : std::uint8_t { full, railing };
enum class Roof : std::uint8_t { none, frame, flat, bars, peaked };
enum class LoadShape : std::uint8_t { blue_box, golden_vase, barrel, diamond, metal_pot, oval_vase, none };

inline constexpr int kColourCount = 5;
inline constexpr int kLengthCount = 2;
inline constexpr int kWallCount = 2;
inline constexpr int kRoofCount = 5;
inline constexpr int kAxleCount = 2;      // 2 or 3 axles
inline constexpr int kLoadShapeCount = 6; // excluding "none"
inline constexpr int kMaxLoads = 3;
inline constexpr std::array<int, 2> kAxleValues{2, 3};

enum class Vocabulary : std::uint8_t { trains, blocks, original };
enum class Slot : std::uint8_t { colour, length, wall, roof, axles, load_shape };

enum class Direction : std::uint8_t { eastbound, westbound };

constexpr std::string_view to_string(Direction d) noexcept {
  return d == Direction::eastbound ? "east" : "west";
}
constexpr Direction flip(Direction d) noexcept {
  return d == Direction::eastbound ? Direction::westbound : Direction::eastbound;
}
inline Direction direction_from_string(std::string_view s) {
  if (s == "east" || s == "eastbound") return Direction::eastbound;
  if (s == "west" || s == "westbound") return Direction::westbound;
  throw Error("unknown direction '" + std::string(s) + "'");
}

/// Value spellings of one representation, indexed by canonical slot value.
struct VocabularyTable {
  std::string_view name;
  std::array<std::string_view, kColourCount> colour;
  std::array<std::string_view, kLengthCount> length;
  std::array<std::string_view, kWallCount> wall;
  std::array<std::string_view, kRoofCount> roof;
  std::array<std::string_view, kAxleCount> axles;
  std::array<std::string_view, kLoadShapeCount + 1> load; // last entry is "none"
};

inline constexpr std::array<VocabularyTable, 3> kVocabularies{{
    {"trains",
     {"yellow", "green", "grey", "red", "blue"},
     {"short", "long"},
     {"full", "railing"},
     {"none", "frame", "flat", "bars", "peaked"},
     {"2", "3"},
     {"blue_box", "golden_vase", "barrel", "diamond", "metal_pot", "oval_vase", "none"}},
    // black top / black bottom stand in for wall and axles
    {"blocks",
     {"yellow", "green", "grey", "red", "blue"},
     {"short", "long"},
     {"true", "false"},
     {"cube", "cylinder", "hemisphere", "frustum", "hex_prism"},
     {"true", "false"},
     {"sphere", "pyramid", "cube", "cylinder", "cone", "torus", "none"}},
    // Michalski's original descriptors; colour carries the car shape
    {"original",
     {"rectangle", "bucket", "ellipse", "hexagon", "u_shaped"},
     {"short", "long"},
     {"single", "double"},
     {"none", "arc", "flat", "jagged", "peaked"},
     {"2", "3"},
     {"rectangle", "triangle", "circle", "diamond", "hexagon", "u_triangle", "none"}},
}};

constexpr const VocabularyTable& table(Vocabulary v) noexcept {
  return kVocabularies[static_cast<std::size_t>(v)];
}
constexpr std::string_view to_string(Vocabulary v) noexcept { return table(v).name; }

inline Vocabulary vocabulary_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kVocabularies.size(); ++i)
    if (kVocabularies[i].name == s) return static_cast<Vocabulary>(i);
  throw Error("unknown vocabulary '" + std::string(s) + "'");
}

namespace detail {
template <std::size_t N>
std::optional<std::uint8_t> find_name(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s) return static_cast<std::uint8_t>(i);
  return std::nullopt;
}
} // namespace detail

inline std::string_view name_of(Vocabulary v, Colour c) { return table(v).colour[static_cast<std::size_t>(c)]; }
inline std::string_view name_of(Vocabulary v, Length l) { return table(v).length[static_cast<std::size_t>(l)]; }
inline std::string_view name_of(Vocabulary v, Wall w) { return table(v).wall[static_cast<std::size_t>(w)]; }
inline std::string_view name_of(Vocabulary v, Roof r) { return table(v).roof[static_cast<std::size_t>(r)]; }
inline std::string_view name_of(Vocabulary v, LoadShape s) { return table(v).load[static_cast<std::size_t>(s)]; }

/// Index of `value` within slot `slot` of vocabulary `v` (axles: 0 => 2, 1 => 3).
inline std::optional<std::uint8_t> slot_index(Vocabulary v, Slot slot, std::string_view value) {
  const auto& t = table(v);
  switch (slot) {
  case Slot::colour: return detail::find_name(t.colour, value);
  case Slot::length: return detail::find_name(t.length, value);
  case Slot::wall: return detail::find_name(t.wall, value);
  case Slot::roof: return detail::find_name(t.roof, value);
  case Slot::axles: return detail::find_name(t.axles, value);
  case Slot::load_shape: return detail::find_name(t.load, value);
  }
  return std::nullopt;
}

/// Spelling of a slot value after moving from one vocabulary to another.
inline std::string translate_value(Slot slot, std::string_view value, Vocabulary from, Vocabulary to) {
  auto idx = slot_index(from, slot, value);
  if (!idx) throw Error("'" + std::string(value) + "' is not a value of this slot in vocabulary " +
                        std::string(to_string(from)));
  const auto& t = table(to);
  switch (slot) {
  case Slot::colour: return std::string(t.colour[*idx]);
  case Slot::length: return std::string(t.length[*idx]);
  case Slot::wall: return std::string(t.wall[*idx]);
  case Slot::roof: return std::string(t.roof[*idx]);
  case Slot::axles: return std::string(t.axles[*idx]);
  case Slot::load_shape: return std::string(t.load[*idx]);
  }
  return {};
}

struct Car {
  int position = 1;
  Colour colour = Colour::yellow;
  Length length = Length::short_car;
  Wall wall = Wall::full;
  Roof roof = Roof::none;
  int axles = 2;
  std::vector<LoadShape> loads;

  bool is_short() const noexcept { return length == Length::short_car; }
  bool is_long() const noexcept { return length == Length::long_car; }
  bool closed() const noexcept { return roof != Roof::none; }
  bool open() const noexcept { return roof == Roof::none; }
  int load_count() const noexcept { return static_cast<int>(loads.size()); }

  friend bool operator==(const Car&, const Car&) = default;
};

struct Train {
  std::vector<Car> cars;
  Vocabulary vocabulary = Vocabulary::trains;

  std::size_t size() const noexcept { return cars.size(); }
  friend bool operator==(const Train&, const Train&) = default;
};

/// Checks the structural invariants every Train must satisfy regardless of
/// constraint set. Returns a description of the first problem, if any.
inline std::optional<std::string> structural_problem(const Train& train) {
  for (std::size_t i = 0; i < train.cars.size(); ++i) {
    const Car& c = train.cars[i];
    if (c.position != static_cast<int>(i) + 1)
      return "car " + std::to_string(i + 1) + " has position " + std::to_string(c.position) +
             "; positions must be 1..n in order";
    if (c.axles != 2 && c.axles != 3)
      return "car " + std::to_string(c.position) + " has " + std::to_string(c.axles) + " axles";
    if (c.load_count() > kMaxLoads)
      return "car " + std::to_string(c.position) + " carries more than 3 loads";
    for (LoadShape s : c.loads)
      if (s == LoadShape::none)
        return "car " + std::to_string(c.position) + " lists load shape 'none' among its loads";
  }
  return std::nullopt;
}

/// Renumbers positions 1..n in list order.
inline void renumber(Train& train) {
  for (std::size_t i = 0; i < train.cars.size(); ++i) train.cars[i].position = static_cast<int>(i) + 1;
}

/// Re-tags a train with another vocabulary. Slot values are stored as
/// canonical indices, so the slot-wise bijection is exactly the table row
/// order and mapping back restores the original.
inline Train map_vocabulary(const Train& train, Vocabulary target) {
  Train out = train;
  out.vocabulary = target;
  return out;
}

inline Train map_vocabulary(const Train& train, std::string_view target) {
  return map_vocabulary(train, vocabulary_from_string(target));
}

// JSON ---------------------------------------------------------------------

inline nlohmann::ordered_json car_to_json(const Car& car, Vocabulary v) {
  nlohmann::ordered_json j;
  j["position"] = car.position;
  j["colour"] = name_of(v, car.colour);
  j["length"] = name_of(v, car.length);
  j["wall"] = name_of(v, car.wall);
  j["roof"] = name_of(v, car.roof);
  j["axles"] = car.axles;
  auto loads = nlohmann::ordered_json::array();
  for (LoadShape s : car.loads) loads.push_back(name_of(v, s));
  j["loads"] = std::move(loads);
  return j;
}

inline nlohmann::ordered_json to_json(const Train& train) {
  nlohmann::ordered_json j;
  j["vocabulary"] = to_string(train.vocabulary);
  auto cars = nlohmann::ordered_json::array();
  for (const Car& c : train.cars) cars.push_back(car_to_json(c, train.vocabulary));
  j["cars"] = std::move(cars);
  return j;
}

namespace detail {
template <typename Enum>
Enum parse_slot(Vocabulary v, Slot slot, const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) throw Error(std::string("car is missing field '") + field + "'");
  const auto& f = j.at(field);
  std::string value = f.is_string() ? f.get<std::string>() : f.dump();
  auto idx = slot_index(v, slot, value);
  if (!idx)
    throw Error("'" + value + "' is not a valid " + field + " in vocabulary " + std::string(to_string(v)));
  return static_cast<Enum>(*idx);
}
} // namespace detail

inline Car car_from_json(const nlohmann::json& j, Vocabulary v) {
  if (!j.is_object()) throw Error("car must be a JSON object");
  Car c;
  if (!j.contains("position") || !j.at("position").is_number_integer())
    throw Error("car is missing integer field 'position'");
  c.position = j.at("position").get<int>();
  c.colour = detail::parse_slot<Colour>(v, Slot::colour, j, "colour");
  c.length = detail::parse_slot<Length>(v, Slot::length, j, "length");
  c.wall = detail::parse_slot<Wall>(v, Slot::wall, j, "wall");
  c.roof = detail::parse_slot<Roof>(v, Slot::roof, j, "roof");
  if (!j.contains("axles") || !j.at("axles").is_number_integer())
    throw Error("car is missing integer field 'axles'");
  c.axles = j.at("axles").get<int>();
  if (j.contains("loads")) {
    if (!j.at("loads").is_array()) throw Error("'loads' must be an array");
    for (const auto& l : j.at("loads")) {
      if (!l.is_string()) throw Error("load shapes must be strings");
      auto idx = slot_index(v, Slot::load_shape, l.get<std::string>());
      if (!idx)
        throw Error("'" + l.get<std::string>() + "' is not a load shape in vocabulary " +
                    std::string(to_string(v)));
      c.loads.push_back(static_cast<LoadShape>(*idx));
    }
  }
  return c;
}

/// Parses the Train JSON schema and enforces structural invariants.
inline Train train_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("train must be a JSON object");
  Train t;
  t.vocabulary = j.contains("vocabulary") ? vocabulary_from_string(j.at("vocabulary").get<std::string>())
                                          : Vocabulary::trains;
  if (!j.contains("cars") || !j.at("cars").is_array()) throw Error("train is missing array field 'cars'");
  for (const auto& cj : j.at("cars")) t.cars.push_back(car_from_json(cj, t.vocabulary));
  if (auto problem = structural_problem(t)) throw Error(*problem);
  return t;
}

} // namespace vlol
