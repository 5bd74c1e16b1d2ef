#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "domain.hpp"

namespace vlol {

// Symbols -------------------------------------------------------------------

/// Interned constant names: every symbolic slot value of every vocabulary,
/// deduplicated by spelling.
inline const std::vector<std::string_view>& symbol_names() {
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> out;
    auto add = [&](std::string_view s) {
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    };
    for (const auto& t : kVocabularies) {
      for (auto s : t.colour) add(s);
      for (auto s : t.wall) add(s);
      for (auto s : t.roof) add(s);
      for (auto s : t.load) add(s);
    }
    return out;
  }();
  return names;
}

inline std::optional<std::int32_t> symbol_id(std::string_view name) {
  const auto& names = symbol_names();
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::int32_t>(it - names.begin());
}

/// A ground constant: integer, vocabulary symbol, car or the train itself.
struct Term {
  enum class Kind : std::uint8_t { integer, symbol, car, train };
  Kind kind = Kind::integer;
  std::int32_t value = 0;

  static Term integer(std::int32_t v) { return {Kind::integer, v}; }
  static Term car(std::int32_t position) { return {Kind::car, position}; }
  static Term train() { return {Kind::train, 0}; }
  static Term symbol(std::string_view name) {
    auto id = symbol_id(name);
    if (!id) throw Error("unknown symbol '" + std::string(name) + "'");
    return {Kind::symbol, *id};
  }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

inline std::string to_string(const Term& t) {
  switch (t.kind) {
  case Term::Kind::integer: return std::to_string(t.value);
  case Term::Kind::symbol: return std::string(symbol_names()[static_cast<std::size_t>(t.value)]);
  case Term::Kind::car: return "c" + std::to_string(t.value);
  case Term::Kind::train: return "t";
  }
  return {};
}

// Predicates ----------------------------------------------------------------

enum class Predicate : std::uint8_t {
  has_car,
  car_num,
  car_color,
  short_,
  long_,
  closed,
  open,
  has_wall,
  has_roof,
  has_wheel0,
  load_num,
  has_load,
  somewhere_behind,
};
inline constexpr std::size_t kPredicateCount = 13;

/// Expected sort of each argument position.
enum class ArgSort : std::uint8_t { train, car, integer, colour, wall, roof, load };

struct PredicateInfo {
  std::string_view name;
  std::uint8_t arity;
  std::array<ArgSort, 3> sorts;
};

inline constexpr std::array<PredicateInfo, kPredicateCount> kPredicates{{
    {"has_car", 2, {ArgSort::train, ArgSort::car}},
    {"car_num", 2, {ArgSort::car, ArgSort::integer}},
    {"car_color", 2, {ArgSort::car, ArgSort::colour}},
    {"short", 1, {ArgSort::car}},
    {"long", 1, {ArgSort::car}},
    {"closed", 1, {ArgSort::car}},
    {"open", 1, {ArgSort::car}},
    {"has_wall", 2, {ArgSort::car, ArgSort::wall}},
    {"has_roof", 2, {ArgSort::car, ArgSort::roof}},
    {"has_wheel0", 2, {ArgSort::car, ArgSort::integer}},
    {"load_num", 2, {ArgSort::car, ArgSort::integer}},
    {"has_load", 2, {ArgSort::car, ArgSort::load}},
    {"somewhere_behind", 3, {ArgSort::train, ArgSort::car, ArgSort::car}},
}};

constexpr const PredicateInfo& info(Predicate p) noexcept { return kPredicates[static_cast<std::size_t>(p)]; }

inline std::optional<Predicate> predicate_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kPredicates.size(); ++i)
    if (kPredicates[i].name == name) return static_cast<Predicate>(i);
  return std::nullopt;
}

struct Atom {
  Predicate predicate{};
  std::array<Term, 3> args{};

  std::uint8_t arity() const noexcept { return info(predicate).arity; }
  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

inline std::string to_string(const Atom& a) {
  std::string s(info(a.predicate).name);
  s += '(';
  for (std::uint8_t i = 0; i < a.arity(); ++i) {
    if (i) s += ',';
    s += to_string(a.args[i]);
  }
  s += ')';
  return s;
}

/// Ground fact base of one train, indexed by predicate.
class FactSet {
public:
  void add(const Atom& a) {
    by_predicate_[static_cast<std::size_t>(a.predicate)].push_back(atoms_.size());
    atoms_.push_back(a);
  }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  /// Positions (into atoms()) of every fact with predicate p, in insertion order.
  const std::vector<std::size_t>& with(Predicate p) const noexcept {
    return by_predicate_[static_cast<std::size_t>(p)];
  }

  bool contains(const Atom& a) const {
    for (auto i : with(a.predicate))
      if (atoms_[i] == a) return true;
    return false;
  }

  std::vector<std::string> to_strings() const {
    std::vector<std::string> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(to_string(a));
    return out;
  }

private:
  std::vector<Atom> atoms_;
  std::array<std::vector<std::size_t>, kPredicateCount> by_predicate_{};
};

/// Ground atoms of a train in its own vocabulary. Cars are the constants
/// c1..cn (by position), the train is t. closed/open follow roof presence;
/// each distinct load shape gets one has_load atom, empty cars get none.
inline FactSet derive_facts(const Train& train) {
  const Vocabulary v = train.vocabulary;
  FactSet facts;
  const Term t = Term::train();
  auto atom = [](Predicate p, Term a, Term b = {}, Term c = {}) { return Atom{p, {a, b, c}}; };

  for (const Car& car : train.cars) {
    const Term c = Term::car(car.position);
    facts.add(atom(Predicate::has_car, t, c));
    facts.add(atom(Predicate::car_num, c, Term::integer(car.position)));
    facts.add(atom(Predicate::car_color, c, Term::symbol(name_of(v, car.colour))));
    facts.add(atom(car.is_short() ? Predicate::short_ : Predicate::long_, c));
    facts.add(atom(car.closed() ? Predicate::closed : Predicate::open, c));
    facts.add(atom(Predicate::has_wall, c, Term::symbol(name_of(v, car.wall))));
    facts.add(atom(Predicate::has_roof, c, Term::symbol(name_of(v, car.roof))));
    facts.add(atom(Predicate::has_wheel0, c, Term::integer(car.axles)));
    facts.add(atom(Predicate::load_num, c, Term::integer(car.load_count())));
    std::vector<LoadShape> seen;
    for (LoadShape s : car.loads) {
      if (std::find(seen.begin(), seen.end(), s) != seen.end()) continue;
      seen.push_back(s);
      facts.add(atom(Predicate::has_load, c, Term::symbol(name_of(v, s))));
    }
  }
  for (const Car& a : train.cars)
    for (const Car& b : train.cars)
      if (a.position > b.position)
        facts.add(atom(Predicate::somewhere_behind, t, Term::car(a.position), Term::car(b.position)));
  return facts;
}

} // namespace vlol
