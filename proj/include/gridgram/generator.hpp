#pragma once

// The derivation loop: pick a frontier point, pick a matching rule, apply it.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridgram/core.hpp"
#include "gridgram/grammar.hpp"

namespace gridgram {

enum class PointStrategy { UniformRandomFrontier, Scanline, NearestToOrigin };
enum class RuleStrategy { UniformRandom, Weighted, FirstMatch };

std::string_view point_strategy_name(PointStrategy s);
std::optional<PointStrategy> point_strategy_from_name(std::string_view name);
std::string_view rule_strategy_name(RuleStrategy s);
std::optional<RuleStrategy> rule_strategy_from_name(std::string_view name);

struct GenerationConfig {
  std::uint64_t seed = 0;
  PointStrategy point_strategy = PointStrategy::UniformRandomFrontier;
  RuleStrategy rule_strategy = RuleStrategy::UniformRandom;
  std::optional<std::uint64_t> max_steps;

  friend bool operator==(const GenerationConfig&, const GenerationConfig&) = default;
};

void check_config(const GenerationConfig& config);

// MT19937-64 (output sequence fixed by the C++ standard) with an unbiased
// rejection-sampled bounded draw, so derivations replay on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

// Decides whether a rule matches a state. Implementations must be safe for
// concurrent calls.
class RuleMatcher {
 public:
  virtual ~RuleMatcher() = default;
  virtual bool matches(std::size_t rule_index, const State& state) const = 0;
  virtual std::string_view name() const = 0;
};

class DirectMatcher final : public RuleMatcher {
 public:
  explicit DirectMatcher(const Grammar& grammar) : grammar_(&grammar) {}
  bool matches(std::size_t rule_index, const State& state) const override {
    return gridgram::matches(grammar_->rules[rule_index], state);
  }
  std::string_view name() const override { return "direct"; }

 private:
  const Grammar* grammar_;
};

struct DerivationStep {
  std::uint64_t index = 0;
  Point point;
  std::string rule_name;
  State pre_state;

  friend bool operator==(const DerivationStep&, const DerivationStep&) = default;
};

enum class Outcome { Complete, Stuck, StepLimit };

std::string_view outcome_name(Outcome o);
std::optional<Outcome> outcome_from_name(std::string_view name);

struct DerivationLog {
  std::string grammar_fingerprint;
  GridConfig grid;
  GenerationConfig generation;
  std::vector<DerivationStep> steps;
  Outcome outcome = Outcome::Stuck;
  std::string design_hash;

  friend bool operator==(const DerivationLog&, const DerivationLog&) = default;
};

struct ComponentNode {
  Point point;
  Symbol symbol = Symbol::Fuselage;

  friend bool operator==(const ComponentNode&, const ComponentNode&) = default;
};

struct Design {
  Grid grid{GridConfig{}};
  // Component points in lexicographic order.
  std::vector<ComponentNode> nodes;
  std::vector<Edge> edges;
  std::map<Symbol, std::size_t> counts;

  friend bool operator==(const Design&, const Design&) = default;
};

Design make_design(const Grid& grid);

// In-grid nonterminal points with at least one applicable rule, lexicographic.
std::vector<Point> frontier(const Grammar& grammar, const Grid& grid);

// One derivation step computed from scratch. The step index is the number of
// terminal points before the step.
std::optional<std::pair<DerivationStep, Grid>> step(const Grammar& grammar, const Grid& grid,
                                                    const GenerationConfig& config, Rng& rng);

class LintFailure : public std::runtime_error {
 public:
  explicit LintFailure(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// Incremental derivation: after each step only the rewritten point and its
// six neighbors are re-matched.
class Derivation {
 public:
  Derivation(const Grammar& grammar, const RuleMatcher& matcher, GridConfig grid_config,
             GenerationConfig config);

  std::optional<DerivationStep> step();
  void run();

  const Grid& grid() const { return grid_; }
  std::vector<Point> frontier() const;
  std::uint64_t steps_taken() const { return steps_taken_; }
  std::size_t nonterminal_count() const { return nonterminals_; }
  // Meaningful once run() returns or step() has returned nullopt.
  Outcome outcome() const;

 private:
  void refresh(std::size_t point_index);
  bool at_step_limit() const;

  const Grammar* grammar_;
  const RuleMatcher* matcher_;
  GenerationConfig config_;
  Grid grid_;
  Rng rng_;
  std::size_t rule_count_;
  // matched_[point * rule_count_ + rule]
  std::vector<std::uint8_t> matched_;
  std::vector<std::uint16_t> match_count_;
  std::size_t frontier_size_ = 0;
  std::size_t nonterminals_;
  std::uint64_t steps_taken_ = 0;
};

struct GenerationResult {
  Design design;
  DerivationLog log;
};

// Throws LintFailure if the grammar has error-level diagnostics.
GenerationResult generate(const Grammar& grammar, const GridConfig& grid_config,
                          const GenerationConfig& config);
GenerationResult generate(const Grammar& grammar, const GridConfig& grid_config,
                          const GenerationConfig& config, const RuleMatcher& matcher);

// Runs count derivations with seeds base.seed + i on up to `threads` workers;
// results are in index order.
std::vector<GenerationResult> generate_batch(const Grammar& grammar,
                                             const GridConfig& grid_config,
                                             const GenerationConfig& base, std::size_t count,
                                             const RuleMatcher& matcher, unsigned threads);

enum class ReplayErrorKind { FingerprintMismatch, StepVerification, OutcomeMismatch,
                             DesignHashMismatch, RegenerationMismatch };

std::string_view replay_error_kind_name(ReplayErrorKind kind);

class ReplayError : public std::runtime_error {
 public:
  ReplayError(ReplayErrorKind kind, std::string message,
              std::optional<std::uint64_t> step_index = std::nullopt);
  ReplayErrorKind kind() const { return kind_; }
  std::optional<std::uint64_t> step_index() const { return step_index_; }

 private:
  ReplayErrorKind kind_;
  std::optional<std::uint64_t> step_index_;
};

// Re-applies every logged step, checking at each one that the live state
// equals the recorded pre-state and that the rule matches it.
Design replay(const DerivationLog& log, const Grammar& grammar);

// replay() plus checks on the recorded outcome and design hash, and that the
// logged configuration regenerates the same derivation.
Design verify_log(const DerivationLog& log, const Grammar& grammar);

}  // namespace gridgram
