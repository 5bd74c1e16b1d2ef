#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "domain.hpp"
#include "facts.hpp"
#include "rng.hpp"

namespace vlol {

struct SourcePos {
  int line = 1;
  int column = 1;
};

class ParseError : public Error {
public:
  ParseError(SourcePos pos, const std::string& what)
      : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + what), pos_(pos) {}
  SourcePos pos() const noexcept { return pos_; }

private:
  SourcePos pos_;
};

struct RuleTerm {
  enum class Kind : std::uint8_t { variable, constant };
  Kind kind = Kind::variable;
  int variable = -1; // index into Clause::variables
  Term constant{};
  SourcePos pos{};

  bool is_variable() const noexcept { return kind == Kind::variable; }
};

enum class CompareOp : std::uint8_t { less, equal, not_equal };

struct Literal {
  enum class Kind : std::uint8_t { atom, comparison };
  Kind kind = Kind::atom;
  Predicate predicate{}; // atom only
  CompareOp op{};        // comparison only
  std::vector<RuleTerm> args;
  SourcePos pos{};
};

struct Clause {
  std::vector<std::string> variables; // index 0 is the head variable
  std::vector<Literal> body;
  SourcePos pos{};
  // Variables introduced by has_car, in order of introduction.
  std::vector<int> car_variables;
};

/// A parsed classification rule: eastbound(T) holds iff some clause body is
/// satisfiable over the train's fact base.
struct RuleProgram {
  std::vector<Clause> clauses;
  std::string source;
  Vocabulary vocabulary = Vocabulary::trains;

  std::string hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(source)));
    return buf;
  }
};

namespace detail {

struct Token {
  enum class Kind : std::uint8_t { ident, variable, integer, lparen, rparen, comma, period, neck, less, equal, not_equal, end };
  Kind kind = Kind::end;
  std::string text;
  SourcePos pos{};
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourcePos pos{line, col};
    auto single = [&](Token::Kind k, std::size_t n) {
      out.push_back({k, std::string(src.substr(i, n)), pos});
      advance(n);
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      const bool var = std::isupper(static_cast<unsigned char>(c)) || c == '_';
      single(var ? Token::Kind::variable : Token::Kind::ident, j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      single(Token::Kind::integer, j - i);
    } else if (c == '(') {
      single(Token::Kind::lparen, 1);
    } else if (c == ')') {
      single(Token::Kind::rparen, 1);
    } else if (c == ',') {
      single(Token::Kind::comma, 1);
    } else if (c == '.') {
      single(Token::Kind::period, 1);
    } else if (c == ':' && i + 1 < src.size() && src[i + 1] == '-') {
      single(Token::Kind::neck, 2);
    } else if (c == '<') {
      single(Token::Kind::less, 1);
    } else if (c == '=') {
      single(Token::Kind::equal, 1);
    } else if ((c == '!' || c == '\\') && i + 1 < src.size() && src[i + 1] == '=') {
      single(Token::Kind::not_equal, 2);
    } else {
      throw ParseError(pos, "unexpected character '" + std::string(1, c) + "'");
    }
  }
  out.push_back({Token::Kind::end, "", {line, col}});
  return out;
}

enum class VarSort : std::uint8_t { unknown, train, car, integer, colour, wall, roof, load };

inline VarSort to_var_sort(ArgSort s) {
  switch (s) {
  case ArgSort::train: return VarSort::train;
  case ArgSort::car: return VarSort::car;
  case ArgSort::integer: return VarSort::integer;
  case ArgSort::colour: return VarSort::colour;
  case ArgSort::wall: return VarSort::wall;
  case ArgSort::roof: return VarSort::roof;
  case ArgSort::load: return VarSort::load;
  }
  return VarSort::unknown;
}

inline std::string_view sort_name(VarSort s) {
  switch (s) {
  case VarSort::unknown: return "unknown";
  case VarSort::train: return "train";
  case VarSort::car: return "car";
  case VarSort::integer: return "integer";
  case VarSort::colour: return "colour";
  case VarSort::wall: return "wall";
  case VarSort::roof: return "roof";
  case VarSort::load: return "load shape";
  }
  return "";
}

class Parser {
public:
  Parser(std::string_view src, Vocabulary vocab) : tokens_(tokenize(src)), vocab_(vocab) {}

  std::vector<Clause> parse() {
    std::vector<Clause> clauses;
    while (peek().kind != Token::Kind::end) clauses.push_back(clause());
    return clauses;
  }

private:
  // Per-clause state.
  struct VarState {
    VarSort sort = VarSort::unknown;
    bool bound = false;
  };
  std::vector<VarState> vars_;
  Clause* cur_ = nullptr;

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }
  const Token& expect(Token::Kind k, std::string_view what) {
    if (peek().kind != k)
      throw ParseError(peek().pos, "expected " + std::string(what) + ", found '" +
                                       (peek().kind == Token::Kind::end ? std::string("end of input") : peek().text) +
                                       "'");
    return next();
  }

  int variable_index(const std::string& name) {
    if (name == "_") {
      cur_->variables.push_back("_" + std::to_string(cur_->variables.size()));
      vars_.emplace_back();
      return static_cast<int>(cur_->variables.size()) - 1;
    }
    auto it = std::find(cur_->variables.begin(), cur_->variables.end(), name);
    if (it != cur_->variables.end()) return static_cast<int>(it - cur_->variables.begin());
    cur_->variables.push_back(name);
    vars_.emplace_back();
    return static_cast<int>(cur_->variables.size()) - 1;
  }

  Clause clause() {
    Clause c;
    cur_ = &c;
    vars_.clear();
    c.pos = peek().pos;
    const Token& head = expect(Token::Kind::ident, "clause head 'eastbound'");
    if (head.text != "eastbound") throw ParseError(head.pos, "clause head must be eastbound(T), found '" + head.text + "'");
    expect(Token::Kind::lparen, "'('");
    const Token& hv = expect(Token::Kind::variable, "head variable");
    if (hv.text == "_") throw ParseError(hv.pos, "head variable must be named");
    variable_index(hv.text);
    vars_[0] = {VarSort::train, true};
    expect(Token::Kind::rparen, "')'");
    expect(Token::Kind::neck, "':-'");
    c.body.push_back(literal());
    while (peek().kind == Token::Kind::comma) {
      next();
      c.body.push_back(literal());
    }
    expect(Token::Kind::period, "',' or '.'");
    cur_ = nullptr;
    return c;
  }

  RuleTerm term() {
    const Token& t = next();
    RuleTerm r;
    r.pos = t.pos;
    switch (t.kind) {
    case Token::Kind::variable:
      r.kind = RuleTerm::Kind::variable;
      r.variable = variable_index(t.text);
      return r;
    case Token::Kind::integer:
      r.kind = RuleTerm::Kind::constant;
      r.constant = Term::integer(static_cast<std::int32_t>(std::stol(t.text)));
      return r;
    case Token::Kind::ident: {
      r.kind = RuleTerm::Kind::constant;
      auto id = symbol_id(t.text);
      if (!id) throw ParseError(t.pos, "unknown constant '" + t.text + "'");
      r.constant = Term{Term::Kind::symbol, *id};
      return r;
    }
    default: throw ParseError(t.pos, "expected a variable or constant, found '" + t.text + "'");
    }
  }

  std::string var_name(const RuleTerm& t) const { return cur_->variables[static_cast<std::size_t>(t.variable)]; }

  void set_sort(const RuleTerm& t, VarSort s) {
    auto& v = vars_[static_cast<std::size_t>(t.variable)];
    if (v.sort != VarSort::unknown && v.sort != s)
      throw ParseError(t.pos, "variable " + var_name(t) + " is used as " + std::string(sort_name(s)) +
                                  " but was earlier used as " + std::string(sort_name(v.sort)));
    v.sort = s;
  }

  bool constant_fits(const Term& c, VarSort s) const {
    if (s == VarSort::integer) return c.kind == Term::Kind::integer;
    if (c.kind != Term::Kind::symbol) return false;
    const auto name = symbol_names()[static_cast<std::size_t>(c.value)];
    const auto& t = table(vocab_);
    auto in = [&](const auto& arr) { return std::find(arr.begin(), arr.end(), name) != arr.end(); };
    switch (s) {
    case VarSort::colour: return in(t.colour);
    case VarSort::wall: return in(t.wall);
    case VarSort::roof: return in(t.roof);
    case VarSort::load: return in(t.load);
    default: return false;
    }
  }

  Literal literal() {
    Literal lit;
    lit.pos = peek().pos;
    if (peek().kind == Token::Kind::ident && tokens_[pos_ + 1].kind == Token::Kind::lparen) {
      const Token& name = next();
      auto pred = predicate_from_name(name.text);
      if (!pred) throw ParseError(name.pos, "unknown predicate '" + name.text + "'");
      lit.kind = Literal::Kind::atom;
      lit.predicate = *pred;
      expect(Token::Kind::lparen, "'('");
      lit.args.push_back(term());
      while (peek().kind == Token::Kind::comma) {
        next();
        lit.args.push_back(term());
      }
      expect(Token::Kind::rparen, "')'");
      check_atom(lit, name);
      return lit;
    }
    lit.kind = Literal::Kind::comparison;
    lit.args.push_back(term());
    const Token& op = next();
    switch (op.kind) {
    case Token::Kind::less: lit.op = CompareOp::less; break;
    case Token::Kind::equal: lit.op = CompareOp::equal; break;
    case Token::Kind::not_equal: lit.op = CompareOp::not_equal; break;
    default: throw ParseError(op.pos, "expected a predicate or comparison ('<', '=', '!='), found '" + op.text + "'");
    }
    lit.args.push_back(term());
    check_comparison(lit);
    return lit;
  }

  void check_atom(const Literal& lit, const Token& name) {
    const auto& pi = info(lit.predicate);
    if (lit.args.size() != pi.arity)
      throw ParseError(name.pos, "predicate " + name.text + " takes " + std::to_string(pi.arity) + " argument(s), got " +
                                     std::to_string(lit.args.size()));
    for (std::size_t i = 0; i < lit.args.size(); ++i) {
      const RuleTerm& a = lit.args[i];
      const VarSort s = to_var_sort(pi.sorts[i]);
      if (s == VarSort::train) {
        if (!a.is_variable() || a.variable != 0)
          throw ParseError(a.pos, "argument " + std::to_string(i + 1) + " of " + name.text +
                                      " must be the head variable " + cur_->variables[0]);
        continue;
      }
      if (s == VarSort::car) {
        if (!a.is_variable()) throw ParseError(a.pos, "car arguments must be variables");
        auto& v = vars_[static_cast<std::size_t>(a.variable)];
        if (!v.bound) {
          if (lit.predicate != Predicate::has_car)
            throw ParseError(a.pos, var_name(a) + " not introduced by has_car");
          set_sort(a, VarSort::car);
          v.bound = true;
          cur_->car_variables.push_back(a.variable);
        } else {
          set_sort(a, VarSort::car);
        }
        continue;
      }
      if (a.is_variable()) {
        set_sort(a, s);
        vars_[static_cast<std::size_t>(a.variable)].bound = true;
      } else if (!constant_fits(a.constant, s)) {
        throw ParseError(a.pos, "'" + to_string(a.constant) + "' is not a " + std::string(sort_name(s)) +
                                    " value in vocabulary " + std::string(to_string(vocab_)));
      }
    }
  }

  void check_comparison(const Literal& lit) {
    VarSort sort = VarSort::unknown;
    for (const RuleTerm& a : lit.args) {
      if (!a.is_variable()) {
        const VarSort cs = a.constant.kind == Term::Kind::integer ? VarSort::integer : VarSort::unknown;
        if (lit.op == CompareOp::less && cs != VarSort::integer)
          throw ParseError(a.pos, "'<' needs integer operands");
        continue;
      }
      const auto& v = vars_[static_cast<std::size_t>(a.variable)];
      if (!v.bound)
        throw ParseError(a.pos, "unsafe variable " + var_name(a) + ": used in a comparison before a positive literal binds it");
      if (lit.op == CompareOp::less && v.sort != VarSort::integer)
        throw ParseError(a.pos, "'<' needs integer operands; " + var_name(a) + " is a " + std::string(sort_name(v.sort)));
      if (sort != VarSort::unknown && v.sort != sort)
        throw ParseError(a.pos, "comparison between a " + std::string(sort_name(sort)) + " and a " +
                                    std::string(sort_name(v.sort)));
      sort = v.sort;
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Vocabulary vocab_;
};

} // namespace detail

/// Parses rule source in the line-oriented Horn-clause DSL. Constants are
/// checked against `vocabulary`.
inline RuleProgram parse_rule(std::string_view text, Vocabulary vocabulary = Vocabulary::trains) {
  RuleProgram p;
  p.source = std::string(text);
  p.vocabulary = vocabulary;
  p.clauses = detail::Parser(text, vocabulary).parse();
  if (p.clauses.empty()) throw ParseError({1, 1}, "rule has no clauses");
  return p;
}

// Evaluation ------------------------------------------------------------------

struct EvalStats {
  std::uint64_t nodes = 0;           // literal visits
  std::uint64_t car_groundings = 0;  // complete assignments of a clause's car variables
};

using Binding = std::vector<std::pair<std::string, Term>>;

struct ClauseBinding {
  std::size_t clause = 0; // 0-based clause index
  Binding binding;

  friend bool operator==(const ClauseBinding&, const ClauseBinding&) = default;
};

namespace detail {

/// Depth-first search over body literals in written order. `on_solution`
/// returns true to stop the search.
template <typename OnSolution>
bool solve_clause(const Clause& clause, const FactSet& facts, EvalStats& stats, OnSolution&& on_solution) {
  std::vector<std::optional<Term>> env(clause.variables.size());
  env[0] = Term::train();
  const std::size_t car_var_count = clause.car_variables.size();

  auto bound_cars = [&] {
    std::size_t n = 0;
    for (int v : clause.car_variables)
      if (env[static_cast<std::size_t>(v)]) ++n;
    return n;
  };

  auto value_of = [&](const RuleTerm& t) -> std::optional<Term> {
    return t.is_variable() ? env[static_cast<std::size_t>(t.variable)] : std::optional<Term>(t.constant);
  };

  auto step = [&](auto&& self, std::size_t li) -> bool {
    if (li == clause.body.size()) return on_solution(env);
    ++stats.nodes;
    const Literal& lit = clause.body[li];
    if (lit.kind == Literal::Kind::comparison) {
      auto a = value_of(lit.args[0]);
      auto b = value_of(lit.args[1]);
      bool ok = false;
      switch (lit.op) {
      case CompareOp::less: ok = a->kind == Term::Kind::integer && b->kind == Term::Kind::integer && a->value < b->value; break;
      case CompareOp::equal: ok = *a == *b; break;
      case CompareOp::not_equal: ok = *a != *b; break;
      }
      return ok && self(self, li + 1);
    }
    const std::size_t before = bound_cars();
    for (std::size_t fi : facts.with(lit.predicate)) {
      const Atom& fact = facts.atoms()[fi];
      std::vector<int> newly;
      bool match = true;
      for (std::size_t ai = 0; ai < lit.args.size(); ++ai) {
        const RuleTerm& t = lit.args[ai];
        if (!t.is_variable()) {
          if (t.constant != fact.args[ai]) {
            match = false;
            break;
          }
          continue;
        }
        auto& slot = env[static_cast<std::size_t>(t.variable)];
        if (slot) {
          if (*slot != fact.args[ai]) {
            match = false;
            break;
          }
        } else {
          slot = fact.args[ai];
          newly.push_back(t.variable);
        }
      }
      if (match) {
        if (car_var_count > 0 && before < car_var_count && bound_cars() == car_var_count) ++stats.car_groundings;
        if (self(self, li + 1)) return true;
      }
      for (int v : newly) env[static_cast<std::size_t>(v)].reset();
    }
    return false;
  };
  return step(step, 0);
}

} // namespace detail

/// True iff some clause of `rule` is satisfiable over `facts`.
inline bool holds(const RuleProgram& rule, const FactSet& facts, EvalStats* stats = nullptr) {
  EvalStats local;
  EvalStats& s = stats ? *stats : local;
  for (const Clause& c : rule.clauses)
    if (detail::solve_clause(c, facts, s, [](const auto&) { return true; })) return true;
  return false;
}

/// Label of `train` under `rule`. Facts are derived in the rule's vocabulary.
inline Direction evaluate(const RuleProgram& rule, const Train& train, EvalStats* stats = nullptr) {
  const FactSet facts = derive_facts(map_vocabulary(train, rule.vocabulary));
  return holds(rule, facts, stats) ? Direction::eastbound : Direction::westbound;
}

/// Every distinct satisfying assignment of every clause, clause by clause in
/// search order. Empty iff the train is westbound.
inline std::vector<ClauseBinding> satisfying_bindings(const RuleProgram& rule, const Train& train) {
  const FactSet facts = derive_facts(map_vocabulary(train, rule.vocabulary));
  std::vector<ClauseBinding> out;
  EvalStats stats;
  for (std::size_t ci = 0; ci < rule.clauses.size(); ++ci) {
    const Clause& c = rule.clauses[ci];
    std::vector<Binding> seen;
    detail::solve_clause(c, facts, stats, [&](const std::vector<std::optional<Term>>& env) {
      Binding b;
      for (std::size_t v = 0; v < c.variables.size(); ++v)
        if (env[v] && c.variables[v].front() != '_') b.emplace_back(c.variables[v], *env[v]);
      if (std::find(seen.begin(), seen.end(), b) == seen.end()) {
        seen.push_back(b);
        out.push_back({ci, std::move(b)});
      }
      return false;
    });
  }
  return out;
}

// Built-in rules --------------------------------------------------------------

inline constexpr std::string_view kTheoryXSource =
    "% Theory X: a short closed car, or a barrel load somewhere behind a golden vase load.\n"
    "eastbound(T) :- has_car(T, C), short(C), closed(C).\n"
    "eastbound(T) :- has_car(T, C1), has_car(T, C2), has_load(C1, golden_vase), has_load(C2, barrel),\n"
    "                somewhere_behind(T, C2, C1).\n";

inline constexpr std::string_view kNumericalSource =
    "% A car whose position equals its number of loads equals its number of axles.\n"
    "eastbound(T) :- has_car(T, C), load_num(C, N), car_num(C, N), has_wheel0(C, N).\n";

inline constexpr std::string_view kComplexSource =
    "% (1) a car whose position is below both its load count and its axle count;\n"
    "% (2) a short and a long car of the same colour, the short car's position below the long car's axle count;\n"
    "% (3) three differently coloured cars.\n"
    "eastbound(T) :- has_car(T, C1), has_car(T, C2), has_car(T, C3),\n"
    "                load_num(C1, N1), car_num(C1, N2), has_wheel0(C1, N3), N2 < N1, N2 < N3.\n"
    "eastbound(T) :- has_car(T, C1), has_car(T, C2), has_car(T, C3),\n"
    "                short(C1), long(C2), car_num(C1, N1), car_color(C1, A), car_color(C2, A),\n"
    "                has_wheel0(C2, N2), N1 < N2.\n"
    "eastbound(T) :- has_car(T, C1), has_car(T, C2), has_car(T, C3),\n"
    "                car_color(C1, X), car_color(C2, Y), car_color(C3, Z), X != Y, Y != Z, Z != X.\n";

// Same rule with has_car only for the car variables each disjunct uses.
inline constexpr std::string_view kComplexUsedCarsSource =
    "eastbound(T) :- has_car(T, C1),\n"
    "                load_num(C1, N1), car_num(C1, N2), has_wheel0(C1, N3), N2 < N1, N2 < N3.\n"
    "eastbound(T) :- has_car(T, C1), has_car(T, C2),\n"
    "                short(C1), long(C2), car_num(C1, N1), car_color(C1, A), car_color(C2, A),\n"
    "                has_wheel0(C2, N2), N1 < N2.\n"
    "eastbound(T) :- has_car(T, C1), has_car(T, C2), has_car(T, C3),\n"
    "                car_color(C1, X), car_color(C2, Y), car_color(C3, Z), X != Y, Y != Z, Z != X.\n";

/// Whether every disjunct of the complex rule carries all three has_car
/// conjuncts. Car variables may share a car, so the two forms agree on every
/// non-empty train.
enum class ComplexHasCar : std::uint8_t { as_written, used_only };

inline std::map<std::string, RuleProgram> builtin_rules(ComplexHasCar mode = ComplexHasCar::as_written) {
  std::map<std::string, RuleProgram> rules;
  rules.emplace("theory_x", parse_rule(kTheoryXSource));
  rules.emplace("numerical", parse_rule(kNumericalSource));
  rules.emplace("complex", parse_rule(mode == ComplexHasCar::as_written ? kComplexSource : kComplexUsedCarsSource));
  return rules;
}

inline bool is_builtin_rule(std::string_view name) {
  return name == "theory_x" || name == "numerical" || name == "complex";
}

/// Resolves a built-in rule name or a path to a rule file.
inline RuleProgram load_rule(const std::string& name_or_path) {
  if (is_builtin_rule(name_or_path)) return builtin_rules().at(name_or_path);
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) throw Error("unknown rule '" + name_or_path + "' (not a built-in name or readable file)");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_rule(ss.str());
}

} // namespace vlol
