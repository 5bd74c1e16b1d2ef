#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "constraints.hpp"
#include "domain.hpp"
#include "facts.hpp"
#include "manifest.hpp"
#include "rule_dsl.hpp"

namespace vlol {

class InterventionError : public Error {
public:
  using Error::Error;
};

/// The edited train broke the active constraint set; the edit is rejected.
class InterventionRejected : public InterventionError {
public:
  explicit InterventionRejected(std::vector<Violation> v)
      : InterventionError("edit rejected: " + std::to_string(v.size()) + " constraint violation(s), first " +
                          v.front().constraint + " at car " + std::to_string(v.front().position)),
        violations_(std::move(v)) {}
  const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
  std::vector<Violation> violations_;
};

enum class EditKind : std::uint8_t { swap_loads, remove_roof, set_attribute };

struct LoadSlot {
  int car = 1;  // position
  int slot = 0; // 0-based index into the car's loads
  friend bool operator==(const LoadSlot&, const LoadSlot&) = default;
};

/// A concrete edit addressed by car position.
struct Intervention {
  EditKind kind = EditKind::remove_roof;
  std::vector<LoadSlot> loads; // swap_loads: exactly two
  std::vector<int> cars;       // remove_roof / set_attribute targets
  std::string attribute;       // set_attribute: colour|length|wall|roof|axles|loads
  std::string value;           // spelled in the train's vocabulary

  static Intervention swap(LoadSlot a, LoadSlot b) { return {EditKind::swap_loads, {a, b}, {}, {}, {}}; }
  static Intervention remove_roof(std::vector<int> cars) { return {EditKind::remove_roof, {}, std::move(cars), {}, {}}; }
  static Intervention set(int car, std::string attribute, std::string value) {
    return {EditKind::set_attribute, {}, {car}, std::move(attribute), std::move(value)};
  }
};

struct InterventionResult {
  Train train;
  Direction old_label = Direction::eastbound;
  Direction new_label = Direction::eastbound;
};

namespace detail {

inline Car& car_at(Train& t, int position) {
  if (position < 1 || position > static_cast<int>(t.size()))
    throw InterventionError("car " + std::to_string(position) + " out of range (train has " +
                            std::to_string(t.size()) + " cars)");
  return t.cars[static_cast<std::size_t>(position - 1)];
}

inline LoadShape& load_at(Train& t, const LoadSlot& s) {
  Car& c = car_at(t, s.car);
  if (s.slot < 0 || s.slot >= c.load_count())
    throw InterventionError("car " + std::to_string(s.car) + " has no load slot " + std::to_string(s.slot));
  return c.loads[static_cast<std::size_t>(s.slot)];
}

template <typename Enum>
Enum parse_attr(Vocabulary v, Slot slot, const std::string& value, const std::string& attr) {
  auto idx = slot_index(v, slot, value);
  if (!idx) throw InterventionError("'" + value + "' is not a valid " + attr + " in vocabulary " + std::string(to_string(v)));
  return static_cast<Enum>(*idx);
}

inline void set_attribute(Car& c, Vocabulary v, const std::string& attr, const std::string& value) {
  if (attr == "colour" || attr == "color") {
    c.colour = parse_attr<Colour>(v, Slot::colour, value, attr);
  } else if (attr == "length") {
    c.length = parse_attr<Length>(v, Slot::length, value, attr);
  } else if (attr == "wall") {
    c.wall = parse_attr<Wall>(v, Slot::wall, value, attr);
  } else if (attr == "roof") {
    c.roof = parse_attr<Roof>(v, Slot::roof, value, attr);
  } else if (attr == "axles") {
    if (value != "2" && value != "3") throw InterventionError("axles must be 2 or 3");
    c.axles = value == "2" ? 2 : 3;
  } else if (attr == "loads") {
    c.loads.clear();
    if (value.empty() || value == "none") return;
    std::size_t start = 0;
    while (start <= value.size()) {
      const auto plus = value.find('+', start);
      const std::string part = value.substr(start, plus == std::string::npos ? std::string::npos : plus - start);
      const auto s = parse_attr<LoadShape>(v, Slot::load_shape, part, "load shape");
      if (s == LoadShape::none) throw InterventionError("'none' cannot appear inside a load list");
      c.loads.push_back(s);
      if (plus == std::string::npos) break;
      start = plus + 1;
    }
    if (c.load_count() > kMaxLoads) throw InterventionError("a car carries at most 3 loads");
  } else {
    throw InterventionError("unknown attribute '" + attr + "'");
  }
}

} // namespace detail

/// Applies an edit to a copy of `train`, rejects it if the result violates
/// `set`, and labels both versions by re-evaluating `rule`.
inline InterventionResult apply(const Train& train, const Intervention& iv, const ConstraintSet& set,
                                const RuleProgram& rule) {
  InterventionResult res;
  res.train = train;
  Train& t = res.train;
  switch (iv.kind) {
  case EditKind::swap_loads:
    if (iv.loads.size() != 2) throw InterventionError("swap_loads needs exactly two load slots");
    std::swap(detail::load_at(t, iv.loads[0]), detail::load_at(t, iv.loads[1]));
    break;
  case EditKind::remove_roof:
    for (int p : iv.cars) detail::car_at(t, p).roof = Roof::none;
    break;
  case EditKind::set_attribute:
    for (int p : iv.cars) detail::set_attribute(detail::car_at(t, p), t.vocabulary, iv.attribute, iv.value);
    break;
  }
  if (auto problem = structural_problem(t)) throw InterventionError(*problem);
  if (auto v = validate_train(t, set); !v.empty()) throw InterventionRejected(std::move(v));
  res.old_label = evaluate(rule, train);
  res.new_label = evaluate(rule, t);
  return res;
}

// Templates ---------------------------------------------------------------------
//
// Text form, used by the CLI:
//   swap_loads:<addr>,<addr>     addr = <selector>[.slot<I> | .<I>]
//   remove_roof:<selector>[,<selector>...]
//   set:<selector>.<attr>=<value>
//   selector = car<K> | first(<pred>[=<value>]) | last(...) | all(...)
// <pred> is a per-car fact predicate (short, closed, has_load, car_color, ...)
// matched against the train's facts in its own vocabulary. Slots are 0-based.

struct CarSelector {
  enum class Kind : std::uint8_t { position, first, last, all };
  Kind kind = Kind::position;
  int position = 1;
  Predicate predicate = Predicate::has_car;
  std::string value;

  /// Matching car positions in ascending order.
  std::vector<int> resolve(const Train& train, const FactSet& facts) const {
    if (kind == Kind::position) {
      if (position >= 1 && position <= static_cast<int>(train.size())) return {position};
      return {};
    }
    std::vector<int> hits;
    for (const Car& c : train.cars) {
      const Term car = Term::car(c.position);
      bool match = false;
      for (std::size_t i : facts.with(predicate)) {
        const Atom& a = facts.atoms()[i];
        if (a.args[0] != car) continue;
        if (value.empty() || (a.arity() > 1 && to_string(a.args[1]) == value)) {
          match = true;
          break;
        }
      }
      if (match) hits.push_back(c.position);
    }
    if (hits.empty() || kind == Kind::all) return hits;
    return {kind == Kind::first ? hits.front() : hits.back()};
  }
};

struct LoadAddress {
  CarSelector car;
  std::optional<int> slot;
};

struct EditTemplate {
  EditKind kind = EditKind::remove_roof;
  std::vector<LoadAddress> loads;
  std::vector<CarSelector> cars;
  std::string attribute;
  std::string value;
  std::string text;

  /// Concrete edit for `train`, or nullopt when a selector matches nothing.
  std::optional<Intervention> resolve(const Train& train) const {
    const FactSet facts = derive_facts(train);
    Intervention iv;
    iv.kind = kind;
    iv.attribute = attribute;
    iv.value = value;
    if (kind == EditKind::swap_loads) {
      for (const auto& addr : loads) {
        auto hits = addr.car.resolve(train, facts);
        if (hits.empty()) return std::nullopt;
        LoadSlot s{hits.front(), 0};
        if (addr.slot) {
          s.slot = *addr.slot;
        } else if (addr.car.predicate == Predicate::has_load && !addr.car.value.empty()) {
          const Car& c = train.cars[static_cast<std::size_t>(s.car - 1)];
          for (std::size_t i = 0; i < c.loads.size(); ++i)
            if (name_of(train.vocabulary, c.loads[i]) == addr.car.value) {
              s.slot = static_cast<int>(i);
              break;
            }
        }
        iv.loads.push_back(s);
      }
      return iv;
    }
    for (const auto& sel : cars) {
      auto hits = sel.resolve(train, facts);
      if (hits.empty()) return std::nullopt;
      for (int p : hits)
        if (std::find(iv.cars.begin(), iv.cars.end(), p) == iv.cars.end()) iv.cars.push_back(p);
    }
    std::sort(iv.cars.begin(), iv.cars.end());
    return iv;
  }
};

namespace detail {

inline CarSelector parse_selector(std::string_view s, const std::string& whole) {
  CarSelector sel;
  auto fail = [&](const std::string& why) { return InterventionError("bad edit '" + whole + "': " + why); };
  if (s.rfind("car", 0) == 0 && s.size() > 3 &&
      std::all_of(s.begin() + 3, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    sel.kind = CarSelector::Kind::position;
    sel.position = std::stoi(std::string(s.substr(3)));
    return sel;
  }
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') throw fail("expected car<K>, first(...), last(...) or all(...)");
  const auto head = s.substr(0, open);
  if (head == "first")
    sel.kind = CarSelector::Kind::first;
  else if (head == "last")
    sel.kind = CarSelector::Kind::last;
  else if (head == "all")
    sel.kind = CarSelector::Kind::all;
  else
    throw fail("unknown selector '" + std::string(head) + "'");
  std::string_view inner = s.substr(open + 1, s.size() - open - 2);
  const auto eq = inner.find('=');
  const auto pname = inner.substr(0, eq);
  auto pred = predicate_from_name(pname);
  if (!pred || info(*pred).sorts[0] != ArgSort::car) throw fail("'" + std::string(pname) + "' is not a per-car predicate");
  sel.predicate = *pred;
  if (eq != std::string_view::npos) {
    if (info(*pred).arity != 2) throw fail("predicate " + std::string(pname) + " takes no value");
    sel.value = std::string(inner.substr(eq + 1));
  }
  return sel;
}

/// Splits on commas that are not inside parentheses.
inline std::vector<std::string_view> split_top(std::string_view s) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == ',' && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

} // namespace detail

inline EditTemplate parse_edit(const std::string& text) {
  EditTemplate t;
  t.text = text;
  auto fail = [&](const std::string& why) { return InterventionError("bad edit '" + text + "': " + why); };
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw fail("expected <kind>:<targets>");
  const std::string kind = text.substr(0, colon);
  const std::string_view rest = std::string_view(text).substr(colon + 1);
  if (kind == "swap_loads") {
    t.kind = EditKind::swap_loads;
    auto parts = detail::split_top(rest);
    if (parts.size() != 2) throw fail("swap_loads needs two load addresses");
    for (auto part : parts) {
      LoadAddress addr;
      const auto close = part.rfind(')');
      const auto dot = part.rfind('.');
      std::string_view sel = part;
      if (dot != std::string_view::npos && (close == std::string_view::npos || dot > close)) {
        auto slot = part.substr(dot + 1);
        if (slot.rfind("slot", 0) == 0) slot.remove_prefix(4);
        if (slot.empty() || !std::all_of(slot.begin(), slot.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
          throw fail("bad load slot '" + std::string(part.substr(dot + 1)) + "'");
        addr.slot = std::stoi(std::string(slot));
        sel = part.substr(0, dot);
      }
      addr.car = detail::parse_selector(sel, text);
      if (addr.car.kind == CarSelector::Kind::all) throw fail("swap_loads needs single-car selectors");
      t.loads.push_back(addr);
    }
  } else if (kind == "remove_roof") {
    t.kind = EditKind::remove_roof;
    for (auto part : detail::split_top(rest)) t.cars.push_back(detail::parse_selector(part, text));
  } else if (kind == "set") {
    t.kind = EditKind::set_attribute;
    const auto eq = rest.find('=', rest.rfind(')') == std::string_view::npos ? 0 : rest.rfind(')'));
    if (eq == std::string_view::npos) throw fail("expected set:<selector>.<attr>=<value>");
    const auto lhs = rest.substr(0, eq);
    const auto dot = lhs.rfind('.');
    if (dot == std::string_view::npos) throw fail("expected set:<selector>.<attr>=<value>");
    t.cars.push_back(detail::parse_selector(lhs.substr(0, dot), text));
    t.attribute = std::string(lhs.substr(dot + 1));
    t.value = std::string(rest.substr(eq + 1));
  } else {
    throw fail("unknown edit kind '" + kind + "'");
  }
  return t;
}

// Batch ---------------------------------------------------------------------------

enum class EditStatus : std::uint8_t { applied, skipped, rejected };

constexpr std::string_view to_string(EditStatus s) noexcept {
  switch (s) {
  case EditStatus::applied: return "applied";
  case EditStatus::skipped: return "skipped";
  case EditStatus::rejected: return "rejected";
  }
  return "";
}

struct BatchEntry {
  std::uint64_t id = 0;
  EditStatus status = EditStatus::skipped;
  Direction old_label = Direction::eastbound;
  Direction new_label = Direction::eastbound;
  std::string detail;
};

struct BatchReport {
  std::vector<BatchEntry> entries;
  std::size_t applied = 0;
  std::size_t skipped = 0;
  std::size_t rejected = 0;
  std::size_t flipped = 0;
};

inline nlohmann::ordered_json to_json(const BatchEntry& e) {
  nlohmann::ordered_json j;
  j["id"] = e.id;
  j["status"] = to_string(e.status);
  j["old_label"] = to_string(e.old_label);
  j["new_label"] = e.status == EditStatus::applied ? nlohmann::ordered_json(to_string(e.new_label)) : nullptr;
  j["flipped"] = e.status == EditStatus::applied && e.old_label != e.new_label;
  if (!e.detail.empty()) j["detail"] = e.detail;
  return j;
}

inline nlohmann::ordered_json summary_json(const BatchReport& r, const std::string& edit) {
  nlohmann::ordered_json j;
  j["summary"] = true;
  j["edit"] = edit;
  j["records"] = r.entries.size();
  j["applied"] = r.applied;
  j["skipped"] = r.skipped;
  j["rejected"] = r.rejected;
  j["flipped"] = r.flipped;
  return j;
}

/// Applies `tmpl` to every record (optionally one split), relabelling by `rule`
/// under the dataset's constraint set.
inline BatchReport batch_intervene(const Dataset& ds, const EditTemplate& tmpl, const RuleProgram& rule,
                                   std::optional<Split> only = std::nullopt) {
  BatchReport rep;
  const ConstraintSet set = ds.spec.distribution.constraint_set();
  for (const auto& r : ds.records) {
    if (only && r.split != *only) continue;
    BatchEntry e;
    e.id = r.id;
    e.old_label = evaluate(rule, r.train);
    e.new_label = e.old_label;
    auto iv = tmpl.resolve(r.train);
    if (!iv) {
      e.status = EditStatus::skipped;
      ++rep.skipped;
    } else {
      try {
        auto res = apply(r.train, *iv, set, rule);
        e.status = EditStatus::applied;
        e.new_label = res.new_label;
        ++rep.applied;
        if (e.new_label != e.old_label) ++rep.flipped;
      } catch (const InterventionRejected& ex) {
        e.status = EditStatus::rejected;
        e.detail = ex.violations().front().constraint;
        ++rep.rejected;
      } catch (const InterventionError& ex) {
        e.status = EditStatus::skipped;
        e.detail = ex.what();
        ++rep.skipped;
      }
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

} // namespace vlol
