#pragma once

// Rules, rule files, wildcard pattern expansion and the direct matcher.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gridgram/core.hpp"

namespace gridgram {

// Bitmask over the seven symbols.
class SymbolSet {
 public:
  constexpr SymbolSet() = default;
  constexpr explicit SymbolSet(std::uint8_t bits) : bits_(bits & 0x7Fu) {}
  constexpr SymbolSet(std::initializer_list<Symbol> symbols) {
    for (Symbol s : symbols) insert(s);
  }

  static constexpr SymbolSet all() { return SymbolSet(0x7Fu); }
  static constexpr SymbolSet storable() { return SymbolSet(0x3Fu); }
  static constexpr SymbolSet components() {
    return SymbolSet{Symbol::Fuselage, Symbol::Rotor, Symbol::Wing, Symbol::Connector};
  }

  constexpr void insert(Symbol s) { bits_ |= static_cast<std::uint8_t>(1u << index(s)); }
  constexpr bool contains(Symbol s) const { return (bits_ >> index(s)) & 1u; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  int size() const;
  std::vector<Symbol> members() const;

  constexpr bool subset_of(SymbolSet other) const { return (bits_ & ~other.bits_) == 0; }
  friend constexpr SymbolSet operator&(SymbolSet a, SymbolSet b) {
    return SymbolSet(static_cast<std::uint8_t>(a.bits_ & b.bits_));
  }
  friend constexpr SymbolSet operator|(SymbolSet a, SymbolSet b) {
    return SymbolSet(static_cast<std::uint8_t>(a.bits_ | b.bits_));
  }
  friend constexpr bool operator==(SymbolSet, SymbolSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

// Full alphabet a wildcard stands for in a given direction.
constexpr SymbolSet wildcard_for(Direction d) {
  return d == Direction::Ego ? SymbolSet::storable() : SymbolSet::all();
}

// Per-direction admissible symbol sets; compact notation for a set of contexts.
struct ContextPattern {
  std::array<SymbolSet, kDirectionCount> allowed{};

  SymbolSet operator[](Direction d) const { return allowed[index(d)]; }
  SymbolSet& operator[](Direction d) { return allowed[index(d)]; }

  bool admits(const State& s) const {
    for (std::size_t i = 0; i < kDirectionCount; ++i) {
      if (!allowed[i].contains(s.sym_at[i])) return false;
    }
    return true;
  }

  // Singleton pattern equal to one concrete context.
  static ContextPattern exactly(const Context& ctx);

  friend bool operator==(const ContextPattern&, const ContextPattern&) = default;
};

struct Production {
  Symbol sym = Symbol::Empty;
  Direction dir = Direction::Ego;

  friend bool operator==(const Production&, const Production&) = default;
};

struct Rule {
  std::string name;
  std::vector<ContextPattern> omega;
  Production production;
  // Only consulted by the weighted rule strategy.
  std::uint32_t weight = 1;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct Grammar {
  std::string name;
  std::string version;
  std::vector<Rule> rules;

  const Rule* find(std::string_view rule_name) const;

  friend bool operator==(const Grammar&, const Grammar&) = default;
};

enum class GrammarErrorKind {
  Syntax,
  UnknownKey,
  UnknownSymbol,
  UnknownDirection,
  DuplicateRule,
  EgoNotNonterminal,
  EmptyWithConnection,
  ProductionNotTerminal,
  InvalidWeight,
};

std::string_view grammar_error_kind_name(GrammarErrorKind kind);

// True for the kinds that reject a well-formed file on semantic grounds.
bool is_semantic(GrammarErrorKind kind);

class GrammarError : public std::runtime_error {
 public:
  GrammarError(GrammarErrorKind kind, std::string message, int line = 0, int column = 0);

  GrammarErrorKind kind() const { return kind_; }
  // 1-based; 0 when no position is known.
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  GrammarErrorKind kind_;
  int line_;
  int column_;
};

// Accepts the YAML rule-file format (JSON is a valid subset).
Grammar parse_grammar(std::string_view text);
Grammar load_grammar(const std::string& path);

// Canonical JSON form; parse_grammar(serialize_grammar(g)) == g.
std::string serialize_grammar(const Grammar& grammar);

// SHA-256 of the canonical serialization.
std::string grammar_fingerprint(const Grammar& grammar);

// Cartesian product of the per-direction sets, lexicographic in direction order.
std::vector<Context> expand(const ContextPattern& pattern);
std::size_t expansion_size(const ContextPattern& pattern);

// Distinct concrete contexts of a rule (union of pattern expansions), sorted by pack().
std::vector<Context> expand_rule(const Rule& rule);

bool matches(const Rule& rule, const State& state);

// Indices into grammar.rules, in file order.
std::vector<std::size_t> applicable_rules(const Grammar& grammar, const Grid& grid, Point p);

class MatchFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class InternalConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws MatchFailure (grid untouched) if the rule does not match at p.
void apply_production(Grid& grid, Point p, const Rule& rule);

enum class Severity { Info, Warning, Error };

std::string_view severity_name(Severity s);

struct Diagnostic {
  Severity severity = Severity::Info;
  std::string code;
  std::string rule;
  std::string message;
};

std::vector<Diagnostic> lint_grammar(const Grammar& grammar);
bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace gridgram
