#include <doctest.h>

#include <algorithm>
#include <map>

#include "gridgram/generator.hpp"
#include "gridgram/io.hpp"
#include "test_support.hpp"

using namespace gridgram;

namespace {

const char* kFillEmpty = R"(
rules:
  - name: fill
    contexts: [{ego: Unoccupied}]
    produce: {symbol: Empty}
)";

const char* kTwoRules = R"(
rules:
  - name: light
    contexts: [{ego: Unoccupied}]
    produce: {symbol: Empty}
  - name: heavy
    contexts: [{ego: Unoccupied}]
    produce: {symbol: Rotor}
    weight: 3
)";

GenerationConfig config_with(std::uint64_t seed, PointStrategy ps = PointStrategy::UniformRandomFrontier,
                             RuleStrategy rs = RuleStrategy::UniformRandom) {
  GenerationConfig c;
  c.seed = seed;
  c.point_strategy = ps;
  c.rule_strategy = rs;
  return c;
}

std::size_t count_symbol(const Grid& g, Symbol s) {
  return static_cast<std::size_t>(std::count(g.symbols().begin(), g.symbols().end(), s));
}

}  // namespace

TEST_CASE("rng follows the standard 64-bit Mersenne Twister") {
  Rng rng(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next();
  CHECK(v == 9981545732273789042ull);
}

TEST_CASE("bounded draws are in range and roughly uniform") {
  Rng rng(1);
  std::array<int, 6> hist{};
  for (int i = 0; i < 60000; ++i) {
    const auto d = rng.below(6);
    REQUIRE(d < 6);
    ++hist[d];
  }
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
  CHECK(rng.below(1) == 0);
  CHECK_THROWS(rng.below(0));
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.below(1000003) == b.below(1000003));
}

TEST_CASE("strategy names round-trip") {
  for (auto s : {PointStrategy::UniformRandomFrontier, PointStrategy::Scanline,
                 PointStrategy::NearestToOrigin}) {
    CHECK(point_strategy_from_name(point_strategy_name(s)) == s);
  }
  for (auto s : {RuleStrategy::UniformRandom, RuleStrategy::Weighted, RuleStrategy::FirstMatch}) {
    CHECK(rule_strategy_from_name(rule_strategy_name(s)) == s);
  }
  for (auto o : {Outcome::Complete, Outcome::Stuck, Outcome::StepLimit}) {
    CHECK(outcome_from_name(outcome_name(o)) == o);
  }
  GenerationConfig c;
  c.max_steps = 0;
  CHECK_THROWS(check_config(c));
}

TEST_CASE("empty grammar gets stuck immediately") {
  const Grammar g = parse_grammar("rules: []\n");
  const auto r = generate(g, GridConfig{2, "1"}, config_with(1));
  CHECK(r.log.outcome == Outcome::Stuck);
  CHECK(r.log.steps.empty());
  CHECK(r.design.nodes.empty());
  CHECK(r.design.edges.empty());
  CHECK(count_symbol(r.design.grid, Symbol::Unoccupied) == 125);
  CHECK(frontier(g, Grid(GridConfig{2, "1"})).empty());
}

TEST_CASE("fill-empty grammar rewrites every point once") {
  const Grammar g = parse_grammar(kFillEmpty);
  for (int n : {0, 1, 2}) {
    const auto r = generate(g, GridConfig{n, "1"}, config_with(5));
    const std::size_t size = grid_point_count(GridConfig{n, "1"});
    CHECK(r.log.outcome == Outcome::Complete);
    CHECK(r.log.steps.size() == size);
    CHECK(r.design.nodes.empty());
    CHECK(count_symbol(r.design.grid, Symbol::Empty) == size);
    std::set<Point> visited;
    for (const auto& s : r.log.steps) visited.insert(s.point);
    CHECK(visited.size() == size);
  }
  CHECK(frontier(g, Grid(GridConfig{1, "1"})).size() == 27);
}

TEST_CASE("free step examples") {
  const Grammar fill = parse_grammar(kFillEmpty);
  Rng rng(0);
  Grid done(GridConfig{0, "1"});
  done.set_symbol({0, 0, 0}, Symbol::Empty);
  CHECK_FALSE(step(fill, done, config_with(0), rng));

  const Grammar two = parse_grammar(kTwoRules);
  const Grid single(GridConfig{0, "1"});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng r(seed);
    auto s = step(two, single, config_with(seed, PointStrategy::UniformRandomFrontier,
                                           RuleStrategy::FirstMatch), r);
    REQUIRE(s);
    CHECK(s->first.rule_name == "light");
    CHECK(s->first.point == Point{0, 0, 0});
    CHECK(s->first.index == 0);
    CHECK(s->second.at({0, 0, 0}) == Symbol::Empty);
  }
}

TEST_CASE("scanline and nearest-to-origin point choice") {
  const Grammar g = parse_grammar(kFillEmpty);
  const auto scan = generate(g, GridConfig{1, "1"}, config_with(0, PointStrategy::Scanline));
  const Grid grid(GridConfig{1, "1"});
  for (std::size_t i = 0; i < scan.log.steps.size(); ++i) {
    CHECK(scan.log.steps[i].point == grid.point_at(i));
  }
  const auto near = generate(g, GridConfig{2, "1"}, config_with(0, PointStrategy::NearestToOrigin));
  auto norm = [](Point p) { return p.x * p.x + p.y * p.y + p.z * p.z; };
  CHECK(near.log.steps.front().point == Point{0, 0, 0});
  for (std::size_t i = 1; i < near.log.steps.size(); ++i) {
    const Point a = near.log.steps[i - 1].point;
    const Point b = near.log.steps[i].point;
    CHECK((norm(a) < norm(b) || (norm(a) == norm(b) && a < b)));
  }
}

TEST_CASE("rule strategies pick with the documented frequencies") {
  const Grammar g = parse_grammar(kTwoRules);
  std::map<std::string, int> uniform, weighted;
  const int runs = 4000;
  for (int seed = 0; seed < runs; ++seed) {
    const auto u = generate(g, GridConfig{0, "1"}, config_with(static_cast<std::uint64_t>(seed)));
    ++uniform[u.log.steps.at(0).rule_name];
    const auto w = generate(g, GridConfig{0, "1"},
                            config_with(static_cast<std::uint64_t>(seed),
                                        PointStrategy::UniformRandomFrontier,
                                        RuleStrategy::Weighted));
    ++weighted[w.log.steps.at(0).rule_name];
  }
  CHECK(std::abs(uniform["heavy"] - runs / 2) < 200);
  CHECK(std::abs(weighted["heavy"] - runs * 3 / 4) < 200);
}

TEST_CASE("incremental derivation agrees with recomputation from scratch") {
  const Grammar demo = testing::demo_grammar();
  const DirectMatcher matcher(demo);
  for (auto ps : {PointStrategy::UniformRandomFrontier, PointStrategy::Scanline,
                  PointStrategy::NearestToOrigin}) {
    for (auto rs : {RuleStrategy::UniformRandom, RuleStrategy::Weighted, RuleStrategy::FirstMatch}) {
      for (std::uint64_t seed : {3ull, 17ull}) {
        const GenerationConfig cfg = config_with(seed, ps, rs);
        Derivation d(demo, matcher, GridConfig{2, "1"}, cfg);
        Grid grid(GridConfig{2, "1"});
        Rng rng(seed);
        while (true) {
          CHECK(d.frontier() == frontier(demo, grid));
          const auto fast = d.step();
          const auto slow = step(demo, grid, cfg, rng);
          REQUIRE(fast.has_value() == slow.has_value());
          if (!fast) break;
          CHECK(*fast == slow->first);
          grid = slow->second;
          REQUIRE(d.grid() == grid);
        }
        CHECK(d.outcome() == Outcome::Complete);
      }
    }
  }
}

TEST_CASE("step limit and stuck outcomes") {
  const Grammar fill = parse_grammar(kFillEmpty);
  GenerationConfig cfg = config_with(2);
  cfg.max_steps = 5;
  const auto limited = generate(fill, GridConfig{1, "1"}, cfg);
  CHECK(limited.log.outcome == Outcome::StepLimit);
  CHECK(limited.log.steps.size() == 5);
  cfg.max_steps = 27;
  CHECK(generate(fill, GridConfig{1, "1"}, cfg).log.outcome == Outcome::Complete);

  const Grammar corner_only = parse_grammar(R"(
rules:
  - name: corner
    contexts: [{ego: Unoccupied, rear: Boundary, left: Boundary, bottom: Boundary}]
    produce: {symbol: Fuselage}
)");
  const auto stuck = generate(corner_only, GridConfig{1, "1"}, config_with(0));
  CHECK(stuck.log.outcome == Outcome::Stuck);
  CHECK(stuck.log.steps.size() == 1);
  CHECK(stuck.design.nodes.size() == 1);
}

TEST_CASE("generation refuses grammars with lint errors") {
  const Grammar bad = parse_grammar(R"(
rules:
  - name: r
    contexts: [{ego: Unoccupied, front: [Fuselage, Empty]}]
    produce: {symbol: Rotor, connect: front}
)");
  CHECK_THROWS_AS(generate(bad, GridConfig{1, "1"}, config_with(0)), LintFailure);
}

TEST_CASE("generation is deterministic and batches match single runs") {
  const Grammar demo = testing::demo_grammar();
  const DirectMatcher matcher(demo);
  const GridConfig grid{2, "1"};
  const auto batch = generate_batch(demo, grid, config_with(100), 12, matcher, 3);
  const auto serial = generate_batch(demo, grid, config_with(100), 12, matcher, 1);
  REQUIRE(batch.size() == 12);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto single = generate(demo, grid, config_with(100 + i));
    CHECK(batch[i].log == single.log);
    CHECK(batch[i].design == single.design);
    CHECK(serial[i].log == single.log);
    CHECK(batch[i].log.generation.seed == 100 + i);
  }
}

TEST_CASE("demo grammar at seed 42 reproduces the golden design") {
  const Grammar demo = testing::demo_grammar();
  const auto r = generate(demo, GridConfig{3, "1"}, config_with(42));
  CHECK(r.log.outcome == Outcome::Complete);
  CHECK(r.design.counts.at(Symbol::Fuselage) >= 1);
  CHECK(r.design.counts.at(Symbol::Rotor) >= 4);
  CHECK(serialize_design(r.design) == testing::golden("demo_design_seed42.json"));
  CHECK(serialize_log(r.log) == testing::golden("demo_log_seed42.json"));
}

TEST_CASE("replay reproduces designs and pinpoints tampering") {
  const Grammar demo = testing::demo_grammar();
  const auto r = generate(demo, GridConfig{2, "1"}, config_with(7));
  CHECK(serialize_design(replay(r.log, demo)) == serialize_design(r.design));
  CHECK(verify_log(r.log, demo) == r.design);

  DerivationLog bad = r.log;
  bad.steps[10].rule_name = bad.steps[10].rule_name == "fill_empty" ? "seed_fuselage" : "fill_empty";
  try {
    replay(bad, demo);
    FAIL("tampered log accepted");
  } catch (const ReplayError& e) {
    CHECK(e.kind() == ReplayErrorKind::StepVerification);
    CHECK(e.step_index() == 10);
  }

  DerivationLog empty = r.log;
  empty.steps.clear();
  const Design initial = replay(empty, demo);
  CHECK(count_symbol(initial.grid, Symbol::Unoccupied) == 125);
  CHECK(initial.nodes.empty());

  DerivationLog wrong_grammar = r.log;
  wrong_grammar.grammar_fingerprint = std::string(64, '0');
  try {
    replay(wrong_grammar, demo);
    FAIL("fingerprint mismatch accepted");
  } catch (const ReplayError& e) {
    CHECK(e.kind() == ReplayErrorKind::FingerprintMismatch);
  }

  DerivationLog wrong_outcome = r.log;
  wrong_outcome.outcome = Outcome::Stuck;
  CHECK_THROWS_AS(verify_log(wrong_outcome, demo), ReplayError);

  DerivationLog wrong_seed = r.log;
  wrong_seed.generation.seed = 8;
  try {
    verify_log(wrong_seed, demo);
    FAIL("seed change accepted");
  } catch (const ReplayError& e) {
    CHECK(e.kind() == ReplayErrorKind::RegenerationMismatch);
  }
}
