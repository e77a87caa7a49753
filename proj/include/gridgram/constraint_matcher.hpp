#pragma once

// Contract-based rule matching.
//
// Directions are mapped to the integers 0..6 by a bijection (the direction
// assignment). A concrete context is then a set of per-symbol constraints
// "symbol occupies exactly the directions whose images lie in these
// intervals". States become single-member contract unions with true
// assumptions; rules become unions with one member per concrete context,
// whose assumptions are the context's constraints and whose guarantees
// describe the production. Matching is decided by composing the two unions.
//
// The assignment only changes how many intervals are needed, never whether
// a rule matches; optimal_assignment picks the bijection that minimizes the
// interval count over every context of a grammar.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridgram/core.hpp"
#include "gridgram/generator.hpp"
#include "gridgram/grammar.hpp"

namespace gridgram {

inline constexpr int kMaxDirectionValue = 6;
inline constexpr std::size_t kAssignmentCount = 5040;

class DirectionAssignment {
 public:
  // Identity: ego=0, front=1, ..., bottom=6.
  DirectionAssignment();
  // Throws std::invalid_argument unless values is a permutation of 0..6.
  explicit DirectionAssignment(const std::array<int, kDirectionCount>& values);

  int operator()(Direction d) const { return to_int_[index(d)]; }
  Direction direction_at(int value) const { return from_int_[static_cast<std::size_t>(value)]; }
  const std::array<int, kDirectionCount>& values() const { return to_int_; }

  // Seven digits, value for ego first, e.g. "6450231".
  std::string fingerprint() const;

  // JSON object mapping each direction name to its integer.
  std::string to_json() const;
  static DirectionAssignment from_json(std::string_view text);

  // All 5040 bijections in lexicographic order of values().
  static std::vector<DirectionAssignment> all();

  friend bool operator==(const DirectionAssignment& a, const DirectionAssignment& b) {
    return a.to_int_ == b.to_int_;
  }
  friend auto operator<=>(const DirectionAssignment& a, const DirectionAssignment& b) {
    return a.to_int_ <=> b.to_int_;
  }

 private:
  std::array<int, kDirectionCount> to_int_;
  std::array<Direction, kDirectionCount> from_int_;
};

struct Interval {
  std::int8_t lo = 0;
  std::int8_t hi = 0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

// Maximally merged, sorted closed intervals within [0, 6].
class IntervalSet {
 public:
  IntervalSet() = default;
  static IntervalSet from_mask(std::uint8_t mask);
  static IntervalSet from_values(const std::vector<int>& values);

  std::span<const Interval> intervals() const { return {intervals_.data(), count_}; }
  std::size_t interval_count() const { return count_; }
  std::uint8_t mask() const { return mask_; }
  bool empty() const { return mask_ == 0; }
  bool contains(int value) const { return value >= 0 && value <= 6 && ((mask_ >> value) & 1u); }
  bool includes(const IntervalSet& other) const { return (other.mask_ & ~mask_) == 0; }

  friend bool operator==(const IntervalSet& a, const IntervalSet& b) { return a.mask_ == b.mask_; }

 private:
  // At most four disjoint, non-adjacent intervals fit in [0, 6].
  std::array<Interval, 4> intervals_{};
  std::uint8_t count_ = 0;
  std::uint8_t mask_ = 0;
};

struct SymbolConstraint {
  Symbol symbol = Symbol::Unoccupied;
  IntervalSet dirs;

  friend bool operator==(const SymbolConstraint&, const SymbolConstraint&) = default;
};

struct ProductionGuarantee {
  Symbol ego_symbol = Symbol::Empty;
  std::optional<int> edge_dir;

  friend bool operator==(const ProductionGuarantee&, const ProductionGuarantee&) = default;
};

struct ConjunctiveContract {
  // Empty assumptions read as "true".
  std::vector<SymbolConstraint> assumptions;
  std::vector<SymbolConstraint> guarantees;
  std::optional<ProductionGuarantee> production;

  friend bool operator==(const ConjunctiveContract&, const ConjunctiveContract&) = default;
};

struct ContractUnion {
  std::vector<ConjunctiveContract> members;
  DirectionAssignment assignment;
};

// One constraint per symbol present in ctx, in symbol order.
std::vector<SymbolConstraint> encode_context(const Context& ctx, const DirectionAssignment& a);

// Inverse of encode_context. Throws std::invalid_argument unless the
// constraints partition 0..6.
Context decode_context(const std::vector<SymbolConstraint>& constraints,
                       const DirectionAssignment& a);

std::size_t constraint_count(const Context& ctx, const DirectionAssignment& a);

struct AssignmentResult {
  DirectionAssignment assignment;
  std::uint64_t total = 0;
  std::size_t contexts = 0;
  std::size_t scanned = 0;
  // Number of bijections that reach the minimum.
  std::size_t optimal_ties = 0;
};

class EmptyGrammarError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exhaustive scan of all 5040 bijections, minimizing the summed interval
// count over every distinct concrete context of every rule. Ties go to the
// lexicographically smallest values() tuple.
AssignmentResult optimal_assignment(const Grammar& grammar, unsigned threads = 1);

ContractUnion state_to_contract_union(const State& state, const DirectionAssignment& a);
ContractUnion rule_to_contract_union(const Rule& rule, const DirectionAssignment& a);

// Drops assumptions on symbols outside present_symbols.
ConjunctiveContract abstract_contract(const ConjunctiveContract& member, SymbolSet present_symbols);

class AssignmentMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// True iff every state member composes with at least one rule member: after
// abstracting the rule member to the symbols the state mentions, each state
// guarantee "s in D" implies the rule assumption on s, i.e. D lies inside the
// rule's interval set for s. A symbol the state mentions but the rule member
// does not constrain is confined by the rule to no direction at all.
bool compose_matches(const ContractUnion& state_union, const ContractUnion& rule_union);

// Human-readable constraint text, e.g. "f = 4 and (0 <= u <= 3 or 5 <= u <= 6)".
std::string constraint_text(const std::vector<SymbolConstraint>& constraints);
std::string contract_text(const ContractUnion& u);

// RuleMatcher backed by contract unions, built once per grammar. Members are
// indexed by their assumption encoding; the candidate found is confirmed by
// composing it with the state contract.
class ContractMatcher final : public RuleMatcher {
 public:
  ContractMatcher(const Grammar& grammar, DirectionAssignment assignment);

  bool matches(std::size_t rule_index, const State& state) const override;
  std::string_view name() const override { return "contract"; }

  const DirectionAssignment& assignment() const { return assignment_; }
  const ContractUnion& rule_union(std::size_t rule_index) const { return unions_[rule_index]; }

 private:
  DirectionAssignment assignment_;
  std::vector<ContractUnion> unions_;
  std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> index_;
};

}  // namespace gridgram
