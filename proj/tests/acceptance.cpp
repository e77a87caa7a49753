// Acceptance checks, one result line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridgram/bench.hpp"
#include "gridgram/constraint_matcher.hpp"
#include "gridgram/generator.hpp"
#include "gridgram/grammar.hpp"
#include "gridgram/io.hpp"
#include "gridgram/validation.hpp"

using namespace gridgram;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CriterionResult {
  bool passed = true;
  std::string detail;
};

Grammar demo_grammar() {
  return load_grammar(std::string(GRIDGRAM_SOURCE_DIR) + "/grammars/demo_uav.yaml");
}

// Designs produced by criteria 1 and 5, audited by criterion 7.
std::vector<Design> g_audit_designs;

State random_state(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> pick(0, 6);
  State s;
  for (auto& sym : s.sym_at) sym = static_cast<Symbol>(pick(gen));
  return s;
}

DirectionAssignment random_assignment(std::mt19937_64& gen) {
  std::array<int, 7> v{0, 1, 2, 3, 4, 5, 6};
  std::shuffle(v.begin(), v.end(), gen);
  return DirectionAssignment(v);
}

CriterionResult throughput() {
  const Grammar demo = demo_grammar();
  const DirectMatcher matcher(demo);
  BenchOptions options;
  options.grid = GridConfig{3, "1"};
  options.count = 1000;
  options.threads = default_thread_count();
  options.profile = *named_profile("demo");
  options.keep_results = true;
  const BenchReport r = run_bench(demo, matcher, options);
  for (auto& res : r.results) g_audit_designs.push_back(res.design);
  CriterionResult out;
  out.passed = r.seconds < 10.0 && r.complete * 100 >= 95 * r.count && r.valid * 100 >= 95 * r.count;
  std::ostringstream d;
  d.precision(3);
  d << r.count << " designs in " << r.seconds << " s (" << r.designs_per_second
    << "/s, " << options.threads << " thread(s)), complete " << r.complete << ", valid "
    << r.valid;
  out.detail = d.str();
  return out;
}

CriterionResult grid_formula() {
  CriterionResult out;
  for (int n : {0, 1, 2, 3, 5}) {
    const std::size_t side = static_cast<std::size_t>(2 * n + 1);
    const std::size_t got = grid_new(GridConfig{n, "1"}).size();
    if (got != side * side * side) out.passed = false;
    out.detail += (out.detail.empty() ? "" : ", ") + std::string("n=") + std::to_string(n) + ":" +
                  std::to_string(got);
  }
  return out;
}

const char* kTenRules = R"(
name: equivalence
rules:
  - name: a
    contexts: [{ego: Unoccupied, front: Connector}]
    produce: {symbol: Rotor, connect: front}
  - name: b
    contexts: [{ego: Unoccupied, front: [Rotor, Unoccupied], rear: Unoccupied}]
    produce: {symbol: Empty}
  - name: c
    contexts:
      - {ego: Unoccupied, left: Connector, right: Connector}
      - {ego: Unoccupied, top: Connector, bottom: Connector}
    produce: {symbol: Connector, connect: left}
  - name: d
    contexts: [{ego: Unoccupied, front: Unoccupied, rear: Unoccupied, left: Unoccupied,
                right: Unoccupied, top: Unoccupied, bottom: Unoccupied}]
    produce: {symbol: Fuselage}
  - name: e
    contexts: [{ego: Unoccupied, top: Rotor, bottom: [Rotor, Connector]}]
    produce: {symbol: Wing}
  - name: f
    contexts: [{ego: Unoccupied, front: Rotor, rear: Rotor, left: Rotor, right: Rotor}]
    produce: {symbol: Empty}
  - name: g
    contexts: [{ego: Unoccupied, rear: [Connector, Rotor], top: Unoccupied}]
    produce: {symbol: Connector, connect: rear}
  - name: h
    contexts:
      - {ego: Unoccupied, front: Rotor, left: Unoccupied}
      - {ego: Unoccupied, front: Unoccupied, left: Rotor}
      - {ego: Unoccupied, right: Connector, bottom: Unoccupied}
    produce: {symbol: Empty}
  - name: i
    contexts: [{ego: Unoccupied, front: [Unoccupied, Rotor, Connector], rear: [Unoccupied, Rotor, Connector],
                left: [Unoccupied, Connector], right: [Unoccupied, Connector],
                top: Unoccupied, bottom: Unoccupied}]
    produce: {symbol: Empty}
  - name: j
    contexts: [{ego: Unoccupied, bottom: Connector, front: Connector, rear: Rotor}]
    produce: {symbol: Rotor, connect: bottom}
)";

CriterionResult matcher_equivalence() {
  const Grammar g = parse_grammar(kTenRules);
  std::mt19937_64 gen(2024);
  std::vector<DirectionAssignment> assignments{optimal_assignment(g).assignment};
  for (int i = 0; i < 10; ++i) assignments.push_back(random_assignment(gen));

  const std::array<Symbol, 3> reduced = {Symbol::Unoccupied, Symbol::Rotor, Symbol::Connector};
  std::size_t checks = 0, disagreements = 0, positives = 0;
  for (const auto& a : assignments) {
    std::vector<ContractUnion> unions;
    for (const Rule& r : g.rules) unions.push_back(rule_to_contract_union(r, a));
    for (int code = 0; code < 2187; ++code) {
      State s;
      int c = code;
      for (auto& sym : s.sym_at) {
        sym = reduced[static_cast<std::size_t>(c % 3)];
        c /= 3;
      }
      const ContractUnion su = state_to_contract_union(s, a);
      for (std::size_t r = 0; r < g.rules.size(); ++r) {
        const bool direct = matches(g.rules[r], s);
        positives += direct;
        disagreements += compose_matches(su, unions[r]) != direct;
        ++checks;
      }
    }
  }

  // Full alphabet: half the states drawn from a rule's own contexts with one
  // entry possibly perturbed, so both outcomes are well represented.
  std::vector<std::vector<Context>> contexts;
  for (const Rule& r : g.rules) contexts.push_back(expand_rule(r));
  const DirectionAssignment a = assignments[0];
  std::vector<ContractUnion> unions;
  for (const Rule& r : g.rules) unions.push_back(rule_to_contract_union(r, a));
  std::uniform_int_distribution<std::size_t> pick_rule(0, g.rules.size() - 1);
  std::uniform_int_distribution<int> pick_sym(0, 6), pick_dir(0, 6), coin(0, 1);
  std::size_t full_positives = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t r = pick_rule(gen);
    State s;
    if (coin(gen)) {
      std::uniform_int_distribution<std::size_t> pick_ctx(0, contexts[r].size() - 1);
      s = contexts[r][pick_ctx(gen)];
      if (coin(gen)) s.sym_at[static_cast<std::size_t>(pick_dir(gen))] = static_cast<Symbol>(pick_sym(gen));
    } else {
      s = random_state(gen);
    }
    const bool direct = matches(g.rules[r], s);
    full_positives += direct;
    disagreements += compose_matches(state_to_contract_union(s, a), unions[r]) != direct;
    ++checks;
  }
  CriterionResult out;
  out.passed = disagreements == 0 && positives > 0 && full_positives > 0;
  out.detail = std::to_string(checks) + " comparisons over " + std::to_string(assignments.size()) +
               " assignments, " + std::to_string(disagreements) + " disagreements";
  return out;
}

// Independent scan: every bijection, interval count per context computed from scratch.
std::uint64_t naive_minimum(const std::vector<Context>& contexts) {
  std::array<int, 7> values{0, 1, 2, 3, 4, 5, 6};
  std::uint64_t best = UINT64_MAX;
  do {
    std::uint64_t total = 0;
    for (const Context& c : contexts) {
      for (Symbol s : kAllSymbols) {
        bool prev = false;
        for (int v = 0; v < 7; ++v) {
          std::size_t d = 0;
          while (values[d] != v) ++d;
          const bool here = c.sym_at[d] == s;
          total += here && !prev;
          prev = here;
        }
      }
    }
    best = std::min(best, total);
  } while (std::next_permutation(values.begin(), values.end()));
  return best;
}

CriterionResult assignment_optimality() {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> bits(1, 0x7F), rule_count(1, 4), pick(0, 6);
  CriterionResult out;
  double slowest = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    Grammar g;
    const int n = rule_count(gen);
    for (int r = 0; r < n; ++r) {
      ContextPattern p;
      p.allowed[0] = SymbolSet{Symbol::Unoccupied};
      for (std::size_t d = 1; d < 7; ++d) {
        // Mostly singletons with the occasional two-symbol entry keeps the
        // naive scan fast while still producing several contexts.
        SymbolSet s{static_cast<Symbol>(pick(gen))};
        if (pick(gen) == 0) s.insert(static_cast<Symbol>(pick(gen)));
        p.allowed[d] = s;
      }
      g.rules.push_back(Rule{"r" + std::to_string(r), {p}, {Symbol::Empty, Direction::Ego}, 1});
    }
    std::vector<Context> contexts;
    for (const Rule& r : g.rules) {
      const auto c = expand_rule(r);
      contexts.insert(contexts.end(), c.begin(), c.end());
    }
    const auto start = Clock::now();
    const AssignmentResult result = optimal_assignment(g, default_thread_count());
    const double secs = seconds_since(start);
    slowest = std::max(slowest, secs);
    const std::uint64_t expected = naive_minimum(contexts);
    if (result.total != expected || secs >= 5.0) out.passed = false;
    out.detail += (out.detail.empty() ? "" : ", ") + std::to_string(result.total) + "=" +
                  std::to_string(expected);
  }
  std::ostringstream d;
  d.precision(3);
  d << "; slowest scan " << slowest << " s";
  out.detail += d.str();
  return out;
}

// Every single-field change to a log must make verification fail.
std::vector<std::function<void(nlohmann::ordered_json&)>> tamperings() {
  using J = nlohmann::ordered_json;
  return {
      [](J& j) { j["grammar_fingerprint"] = std::string(64, 'a'); },
      [](J& j) { j["grid"]["n_half"] = j["grid"]["n_half"].get<int>() + 1; },
      [](J& j) { j["grid"]["unit"] = "2"; },
      [](J& j) { j["generation"]["seed"] = j["generation"]["seed"].get<std::uint64_t>() + 1; },
      [](J& j) { j["generation"]["point_strategy"] = "scanline"; },
      [](J& j) { j["generation"]["rule_strategy"] = "first-match"; },
      [](J& j) { j["generation"]["max_steps"] = 1; },
      [](J& j) { j["steps"][5]["index"] = 6; },
      [](J& j) {
        auto p = j["steps"][5]["point"];
        p[0] = p[0].get<int>() == 0 ? 1 : 0;
        j["steps"][5]["point"] = p;
      },
      [](J& j) {
        j["steps"][5]["rule"] = j["steps"][5]["rule"] == "fill_empty" ? "seed_fuselage" : "fill_empty";
      },
      [](J& j) {
        std::string s = j["steps"][5]["pre_state"];
        s[6] = s[6] == 'B' ? 'U' : 'B';
        j["steps"][5]["pre_state"] = s;
      },
      [](J& j) { j["steps"].erase(j["steps"].size() - 1); },
      [](J& j) { j["outcome"] = "stuck"; },
      [](J& j) { j["design_hash"] = std::string(64, '0'); },
  };
}

CriterionResult determinism_and_replay() {
  const Grammar demo = demo_grammar();
  const GridConfig grid{3, "1"};
  std::mt19937_64 seeds(5);
  const auto tamper = tamperings();
  std::size_t identical = 0, detected = 0, attempts = 0;
  for (int i = 0; i < 100; ++i) {
    GenerationConfig cfg;
    cfg.seed = seeds();
    const GenerationResult r = generate(demo, grid, cfg);
    g_audit_designs.push_back(r.design);
    const std::string log_text = serialize_log(r.log);
    const std::string design_text = serialize_design(r.design);
    const Design again = verify_log(parse_log(log_text), demo);
    identical += serialize_design(again) == design_text &&
                 serialize_design(generate(demo, grid, cfg).design) == design_text;
    for (const auto& t : tamper) {
      auto j = nlohmann::ordered_json::parse(log_text);
      t(j);
      ++attempts;
      try {
        verify_log(parse_log(j.dump()), demo);
      } catch (const ReplayError&) {
        ++detected;
      } catch (const FormatError&) {
        ++detected;
      }
    }
  }
  CriterionResult out;
  out.passed = identical == 100 && detected == attempts;
  out.detail = std::to_string(identical) + "/100 byte-identical replays, " +
               std::to_string(detected) + "/" + std::to_string(attempts) + " tamperings detected";
  return out;
}

CriterionResult termination_and_monotonicity() {
  const Grammar demo = demo_grammar();
  const DirectMatcher matcher(demo);
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> n_half(0, 3), ps(0, 2), rs(0, 2);
  std::size_t bad = 0, complete = 0, total_steps = 0;
  for (int i = 0; i < 1000; ++i) {
    GenerationConfig cfg;
    cfg.seed = gen();
    cfg.point_strategy = static_cast<PointStrategy>(ps(gen));
    cfg.rule_strategy = static_cast<RuleStrategy>(rs(gen));
    const GridConfig grid{n_half(gen), "1"};
    Derivation d(demo, matcher, grid, cfg);
    std::size_t before = d.nonterminal_count();
    std::uint64_t steps = 0;
    while (d.step()) {
      ++steps;
      const std::size_t now = d.nonterminal_count();
      if (now + 1 != before) ++bad;
      before = now;
    }
    if (steps > grid_point_count(grid)) ++bad;
    complete += d.outcome() == Outcome::Complete;
    total_steps += steps;
  }
  CriterionResult out;
  out.passed = bad == 0;
  out.detail = "1000 derivations, " + std::to_string(total_steps) + " steps, " +
               std::to_string(bad) + " violations, " + std::to_string(complete) + " complete";
  return out;
}

CriterionResult edge_soundness() {
  std::size_t edges = 0, bad = 0;
  for (const Design& d : g_audit_designs) {
    for (const Edge& e : d.grid.edges()) {
      ++edges;
      const int dist = std::abs(e.a.x - e.b.x) + std::abs(e.a.y - e.b.y) + std::abs(e.a.z - e.b.z);
      const bool ok = dist == 1 && d.grid.contains(e.a) && d.grid.contains(e.b) &&
                      is_component(d.grid.at(e.a)) && is_component(d.grid.at(e.b));
      bad += !ok;
    }
    bad += !audit_grid(d.grid).empty();
  }
  CriterionResult out;
  out.passed = bad == 0 && g_audit_designs.size() == 1100;
  out.detail = std::to_string(g_audit_designs.size()) + " designs, " + std::to_string(edges) +
               " edges, " + std::to_string(bad) + " violations";
  return out;
}

Grammar fuzz_grammar(std::mt19937_64& gen, int id) {
  std::uniform_int_distribution<int> small(0, 4), bits(0, 0x7F), sym(0, 4), dir(0, 6), pct(0, 99);
  std::uniform_int_distribution<std::uint32_t> weight(1, 1'000'000);
  Grammar g;
  g.name = "fuzz grammar " + std::to_string(id);
  g.version = std::to_string(id) + ".0";
  const int rules = small(gen) + 1;
  for (int r = 0; r < rules; ++r) {
    Rule rule;
    rule.name = "rule_" + std::to_string(r) + (pct(gen) < 30 ? ".v2" : "");
    const int patterns = small(gen);
    for (int p = 0; p < patterns; ++p) {
      ContextPattern pat;
      pat.allowed[0] = pct(gen) < 95 ? SymbolSet{Symbol::Unoccupied} : SymbolSet{};
      for (std::size_t d = 1; d < 7; ++d) {
        const int roll = pct(gen);
        pat.allowed[d] = roll < 30 ? SymbolSet::all() : SymbolSet(static_cast<std::uint8_t>(bits(gen)));
      }
      rule.omega.push_back(pat);
    }
    rule.production.sym = static_cast<Symbol>(sym(gen));
    rule.production.dir =
        rule.production.sym == Symbol::Empty ? Direction::Ego : static_cast<Direction>(dir(gen));
    rule.weight = pct(gen) < 50 ? 1 : weight(gen);
    g.rules.push_back(rule);
  }
  return g;
}

CriterionResult round_trips() {
  std::size_t grammar_ok = 0, grammar_total = 0;
  auto check_grammar = [&](const Grammar& g) {
    ++grammar_total;
    const std::string text = serialize_grammar(g);
    const Grammar back = parse_grammar(text);
    grammar_ok += back == g && serialize_grammar(back) == text;
  };
  check_grammar(demo_grammar());
  std::mt19937_64 gen(31);
  for (int i = 0; i < 50; ++i) check_grammar(fuzz_grammar(gen, i));

  std::size_t ctx_ok = 0, ctx_total = 0;
  std::vector<DirectionAssignment> assignments;
  for (int i = 0; i < 20; ++i) assignments.push_back(random_assignment(gen));
  for (int i = 0; i < 1000; ++i) {
    const State s = random_state(gen);
    for (const auto& a : assignments) {
      ++ctx_total;
      ctx_ok += decode_context(encode_context(s, a), a) == s;
    }
  }
  CriterionResult out;
  out.passed = grammar_ok == grammar_total && ctx_ok == ctx_total;
  out.detail = std::to_string(grammar_ok) + "/" + std::to_string(grammar_total) + " grammars, " +
               std::to_string(ctx_ok) + "/" + std::to_string(ctx_total) + " contexts";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<CriterionResult()>>> criteria = {
      {"1 throughput", throughput},
      {"2 grid-formula", grid_formula},
      {"3 matcher-equivalence", matcher_equivalence},
      {"4 assignment-optimality", assignment_optimality},
      {"5 determinism-replay", determinism_and_replay},
      {"6 termination-monotonicity", termination_and_monotonicity},
      {"7 edge-soundness", edge_soundness},
      {"8 round-trips", round_trips},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = Clock::now();
    CriterionResult result;
    try {
      result = run();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", seconds_since(start));
    std::cout << (result.passed ? "PASS " : "FAIL ") << "criterion " << name << ": "
              << result.detail << " [" << timing << "]" << std::endl;
    failures += !result.passed;
  }
  return failures == 0 ? 0 : 1;
}
