#include "gridgram/generator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "gridgram/io.hpp"

namespace gridgram {

namespace {

constexpr std::array<std::string_view, 3> kPointStrategyNames = {
    "uniform-random-frontier", "scanline", "nearest-to-origin"};
constexpr std::array<std::string_view, 3> kRuleStrategyNames = {"uniform-random", "weighted",
                                                                "first-match"};
constexpr std::array<std::string_view, 3> kOutcomeNames = {"complete", "stuck", "step-limit"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view name) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view point_strategy_name(PointStrategy s) {
  return kPointStrategyNames[static_cast<std::size_t>(s)];
}
std::optional<PointStrategy> point_strategy_from_name(std::string_view name) {
  return lookup<PointStrategy>(kPointStrategyNames, name);
}
std::string_view rule_strategy_name(RuleStrategy s) {
  return kRuleStrategyNames[static_cast<std::size_t>(s)];
}
std::optional<RuleStrategy> rule_strategy_from_name(std::string_view name) {
  return lookup<RuleStrategy>(kRuleStrategyNames, name);
}
std::string_view outcome_name(Outcome o) { return kOutcomeNames[static_cast<std::size_t>(o)]; }
std::optional<Outcome> outcome_from_name(std::string_view name) {
  return lookup<Outcome>(kOutcomeNames, name);
}

void check_config(const GenerationConfig& config) {
  if (config.max_steps && *config.max_steps < 1) {
    throw std::invalid_argument("max_steps must be at least 1 when set");
  }
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below requires a positive bound");
  // Reject the lowest (2^64 mod bound) outputs so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % bound;
  }
}

Design make_design(const Grid& grid) {
  Design d{grid, {}, {}, {}};
  for (Symbol s : kAllSymbols) {
    if (is_storable(s)) d.counts[s] = 0;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Symbol s = grid.symbols()[i];
    ++d.counts[s];
    if (is_component(s)) d.nodes.push_back({grid.point_at(i), s});
  }
  d.edges.assign(grid.edges().begin(), grid.edges().end());
  return d;
}

namespace {

Point choose_point(const std::vector<Point>& candidates, PointStrategy strategy, Rng& rng) {
  switch (strategy) {
    case PointStrategy::UniformRandomFrontier:
      return candidates[rng.below(candidates.size())];
    case PointStrategy::Scanline:
      return candidates.front();
    case PointStrategy::NearestToOrigin: {
      const auto norm = [](Point p) { return p.x * p.x + p.y * p.y + p.z * p.z; };
      return *std::min_element(candidates.begin(), candidates.end(),
                               [&](Point a, Point b) { return norm(a) < norm(b); });
    }
  }
  return candidates.front();
}

std::size_t choose_rule(const std::vector<std::size_t>& candidates, const Grammar& grammar,
                        RuleStrategy strategy, Rng& rng) {
  switch (strategy) {
    case RuleStrategy::UniformRandom:
      return candidates[rng.below(candidates.size())];
    case RuleStrategy::Weighted: {
      std::uint64_t total = 0;
      for (std::size_t r : candidates) total += grammar.rules[r].weight;
      std::uint64_t draw = rng.below(total);
      for (std::size_t r : candidates) {
        const std::uint64_t w = grammar.rules[r].weight;
        if (draw < w) return r;
        draw -= w;
      }
      return candidates.back();
    }
    case RuleStrategy::FirstMatch:
      return candidates.front();
  }
  return candidates.front();
}

}  // namespace

std::vector<Point> frontier(const Grammar& grammar, const Grid& grid) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!is_nonterminal(grid.symbols()[i])) continue;
    const Point p = grid.point_at(i);
    if (!applicable_rules(grammar, grid, p).empty()) out.push_back(p);
  }
  return out;
}

std::optional<std::pair<DerivationStep, Grid>> step(const Grammar& grammar, const Grid& grid,
                                                    const GenerationConfig& config, Rng& rng) {
  const std::vector<Point> candidates = frontier(grammar, grid);
  if (candidates.empty()) return std::nullopt;
  const Point p = choose_point(candidates, config.point_strategy, rng);
  const std::vector<std::size_t> rules = applicable_rules(grammar, grid, p);
  const Rule& rule = grammar.rules[choose_rule(rules, grammar, config.rule_strategy, rng)];

  const auto terminals = static_cast<std::uint64_t>(
      std::count_if(grid.symbols().begin(), grid.symbols().end(), is_terminal));
  DerivationStep st{terminals, p, rule.name, grid.state_of(p)};
  Grid next = grid;
  apply_production(next, p, rule);
  return std::make_pair(std::move(st), std::move(next));
}

namespace {

std::string summarize(const std::vector<Diagnostic>& diagnostics) {
  std::string out = "grammar has lint errors";
  for (const Diagnostic& d : diagnostics) {
    if (d.severity != Severity::Error) continue;
    out += "\n  " + d.code + (d.rule.empty() ? "" : " [" + d.rule + "]") + ": " + d.message;
  }
  return out;
}

}  // namespace

LintFailure::LintFailure(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

Derivation::Derivation(const Grammar& grammar, const RuleMatcher& matcher, GridConfig grid_config,
                       GenerationConfig config)
    : grammar_(&grammar),
      matcher_(&matcher),
      config_(config),
      grid_(std::move(grid_config)),
      rng_(config.seed),
      rule_count_(grammar.rules.size()),
      matched_(grid_.size() * grammar.rules.size(), 0),
      match_count_(grid_.size(), 0),
      nonterminals_(grid_.size()) {
  check_config(config_);
  for (std::size_t i = 0; i < grid_.size(); ++i) refresh(i);
}

void Derivation::refresh(std::size_t point_index) {
  const bool was_frontier = match_count_[point_index] > 0;
  std::uint16_t count = 0;
  std::uint8_t* row = matched_.data() + point_index * rule_count_;
  if (is_nonterminal(grid_.symbols()[point_index])) {
    const State s = grid_.state_of(grid_.point_at(point_index));
    for (std::size_t r = 0; r < rule_count_; ++r) {
      row[r] = matcher_->matches(r, s) ? 1 : 0;
      count = static_cast<std::uint16_t>(count + row[r]);
    }
  } else {
    std::fill(row, row + rule_count_, 0);
  }
  match_count_[point_index] = count;
  const bool is_frontier = count > 0;
  if (was_frontier != is_frontier) {
    if (is_frontier) {
      ++frontier_size_;
    } else {
      --frontier_size_;
    }
  }
}

std::vector<Point> Derivation::frontier() const {
  std::vector<Point> out;
  out.reserve(frontier_size_);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (match_count_[i] > 0) out.push_back(grid_.point_at(i));
  }
  return out;
}

bool Derivation::at_step_limit() const {
  return config_.max_steps && steps_taken_ >= *config_.max_steps;
}

std::optional<DerivationStep> Derivation::step() {
  if (frontier_size_ == 0 || at_step_limit()) return std::nullopt;
  const Point p = choose_point(frontier(), config_.point_strategy, rng_);
  const std::size_t idx = grid_.index_of(p);

  std::vector<std::size_t> rules;
  const std::uint8_t* row = matched_.data() + idx * rule_count_;
  for (std::size_t r = 0; r < rule_count_; ++r) {
    if (row[r]) rules.push_back(r);
  }
  const Rule& rule = grammar_->rules[choose_rule(rules, *grammar_, config_.rule_strategy, rng_)];

  DerivationStep st{steps_taken_, p, rule.name, grid_.state_of(p)};
  apply_production(grid_, p, rule);
  --nonterminals_;
  ++steps_taken_;
  refresh(idx);
  for (std::size_t d = 1; d < kDirectionCount; ++d) {
    const Point q = neighbor(p, kAllDirections[d]);
    if (grid_.contains(q)) refresh(grid_.index_of(q));
  }
  return st;
}

void Derivation::run() {
  while (step()) {
  }
}

Outcome Derivation::outcome() const {
  if (nonterminals_ == 0) return Outcome::Complete;
  if (frontier_size_ == 0) return Outcome::Stuck;
  return Outcome::StepLimit;
}

namespace {

GenerationResult generate_unchecked(const Grammar& grammar, const std::string& fingerprint,
                                    const GridConfig& grid_config, const GenerationConfig& config,
                                    const RuleMatcher& matcher) {
  Derivation derivation(grammar, matcher, grid_config, config);
  GenerationResult result;
  result.log.grammar_fingerprint = fingerprint;
  result.log.grid = grid_config;
  result.log.generation = config;
  while (auto st = derivation.step()) result.log.steps.push_back(std::move(*st));
  result.log.outcome = derivation.outcome();
  result.design = make_design(derivation.grid());
  result.log.design_hash = design_hash(result.design);
  return result;
}

void require_lint_clean(const Grammar& grammar) {
  auto diagnostics = lint_grammar(grammar);
  if (has_errors(diagnostics)) throw LintFailure(std::move(diagnostics));
}

}  // namespace

GenerationResult generate(const Grammar& grammar, const GridConfig& grid_config,
                          const GenerationConfig& config) {
  return generate(grammar, grid_config, config, DirectMatcher(grammar));
}

GenerationResult generate(const Grammar& grammar, const GridConfig& grid_config,
                          const GenerationConfig& config, const RuleMatcher& matcher) {
  require_lint_clean(grammar);
  return generate_unchecked(grammar, grammar_fingerprint(grammar), grid_config, config, matcher);
}

std::vector<GenerationResult> generate_batch(const Grammar& grammar,
                                             const GridConfig& grid_config,
                                             const GenerationConfig& base, std::size_t count,
                                             const RuleMatcher& matcher, unsigned threads) {
  require_lint_clean(grammar);
  check_config(grid_config);
  check_config(base);
  const std::string fingerprint = grammar_fingerprint(grammar);
  std::vector<GenerationResult> results(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      GenerationConfig cfg = base;
      cfg.seed = base.seed + i;
      try {
        results[i] = generate_unchecked(grammar, fingerprint, grid_config, cfg, matcher);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::string_view replay_error_kind_name(ReplayErrorKind kind) {
  switch (kind) {
    case ReplayErrorKind::FingerprintMismatch: return "fingerprint-mismatch";
    case ReplayErrorKind::StepVerification: return "step-verification";
    case ReplayErrorKind::OutcomeMismatch: return "outcome-mismatch";
    case ReplayErrorKind::DesignHashMismatch: return "design-hash-mismatch";
    case ReplayErrorKind::RegenerationMismatch: return "regeneration-mismatch";
  }
  return "unknown";
}

ReplayError::ReplayError(ReplayErrorKind kind, std::string message,
                         std::optional<std::uint64_t> step_index)
    : std::runtime_error(std::string(replay_error_kind_name(kind)) +
                         (step_index ? " at step " + std::to_string(*step_index) : "") + ": " +
                         message),
      kind_(kind),
      step_index_(step_index) {}

Design replay(const DerivationLog& log, const Grammar& grammar) {
  if (log.grammar_fingerprint != grammar_fingerprint(grammar)) {
    throw ReplayError(ReplayErrorKind::FingerprintMismatch,
                      "log was recorded against a different grammar");
  }
  std::optional<Grid> grid;
  try {
    grid.emplace(log.grid);
  } catch (const GridError& e) {
    throw ReplayError(ReplayErrorKind::StepVerification, e.what());
  }
  for (std::size_t i = 0; i < log.steps.size(); ++i) {
    const DerivationStep& st = log.steps[i];
    auto bad = [&](const std::string& why) {
      return ReplayError(ReplayErrorKind::StepVerification, why, i);
    };
    if (st.index != i) throw bad("recorded index " + std::to_string(st.index));
    if (!grid->contains(st.point)) throw bad("point " + to_string(st.point) + " is outside the grid");
    const Rule* rule = grammar.find(st.rule_name);
    if (!rule) throw bad("unknown rule '" + st.rule_name + "'");
    const State live = grid->state_of(st.point);
    if (live != st.pre_state) {
      throw bad("recorded pre-state " + state_code(st.pre_state) + " differs from live state " +
                state_code(live));
    }
    if (!is_nonterminal(st.pre_state[Direction::Ego])) throw bad("pre-state ego is terminal");
    if (!matches(*rule, st.pre_state)) {
      throw bad("rule '" + rule->name + "' does not match pre-state " + state_code(st.pre_state));
    }
    try {
      apply_production(*grid, st.point, *rule);
    } catch (const std::exception& e) {
      throw bad(e.what());
    }
  }
  return make_design(*grid);
}

Design verify_log(const DerivationLog& log, const Grammar& grammar) {
  Design design = replay(log, grammar);

  const auto nonterminals =
      std::count_if(design.grid.symbols().begin(), design.grid.symbols().end(), is_nonterminal);
  Outcome actual = Outcome::Complete;
  if (nonterminals > 0) {
    actual = frontier(grammar, design.grid).empty() ? Outcome::Stuck : Outcome::StepLimit;
  }
  if (actual == Outcome::StepLimit &&
      !(log.generation.max_steps && log.steps.size() == *log.generation.max_steps)) {
    throw ReplayError(ReplayErrorKind::OutcomeMismatch,
                      "derivation stopped with a non-empty frontier before its step limit");
  }
  if (actual != log.outcome) {
    throw ReplayError(ReplayErrorKind::OutcomeMismatch,
                      "log records '" + std::string(outcome_name(log.outcome)) +
                          "' but replay ends '" + std::string(outcome_name(actual)) + "'");
  }
  if (design_hash(design) != log.design_hash) {
    throw ReplayError(ReplayErrorKind::DesignHashMismatch,
                      "replayed design does not hash to the recorded value");
  }

  GenerationResult again;
  try {
    again = generate(grammar, log.grid, log.generation);
  } catch (const std::exception& e) {
    throw ReplayError(ReplayErrorKind::RegenerationMismatch, e.what());
  }
  const auto& a = again.log.steps;
  const auto& b = log.steps;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    if (i >= a.size() || i >= b.size() || a[i] != b[i]) {
      throw ReplayError(ReplayErrorKind::RegenerationMismatch,
                        "logged configuration derives a different step", i);
    }
  }
  return design;
}

}  // namespace gridgram
