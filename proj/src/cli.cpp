#include "gridgram/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "gridgram/bench.hpp"
#include "gridgram/constraint_matcher.hpp"
#include "gridgram/generator.hpp"
#include "gridgram/grammar.hpp"
#include "gridgram/io.hpp"
#include "gridgram/validation.hpp"

namespace gridgram {

namespace {

namespace fs = std::filesystem;

// Raised for conditions that map to the usage exit status.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_readable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
}

Grammar read_grammar(const std::string& path) {
  require_readable(path);
  return parse_grammar(read_file(path));
}

std::string counts_line(const Design& design) {
  std::string out;
  for (const auto& [sym, n] : design.counts) {
    if (!out.empty()) out += " ";
    out += std::string(symbol_name(sym)) + "=" + std::to_string(n);
  }
  return out;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GrammarError& e) {
    err << "error: " << e.what() << "\n";
    return is_semantic(e.kind()) ? kExitCheckFailed : kExitParse;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const LintFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const ReplayError& e) {
    err << "replay failed: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const EmptyGrammarError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

struct StrategyOptions {
  std::string point = "uniform-random-frontier";
  std::string rule = "uniform-random";
};

void add_strategy_options(CLI::App* cmd, StrategyOptions& s) {
  cmd->add_option("--point-strategy", s.point, "Point choice")
      ->check(CLI::IsMember({"uniform-random-frontier", "scanline", "nearest-to-origin"}));
  cmd->add_option("--rule-strategy", s.rule, "Rule choice")
      ->check(CLI::IsMember({"uniform-random", "weighted", "first-match"}));
}

GenerationConfig make_generation(std::uint64_t seed, const StrategyOptions& s,
                                 std::optional<std::uint64_t> max_steps) {
  GenerationConfig c;
  c.seed = seed;
  c.point_strategy = *point_strategy_from_name(s.point);
  c.rule_strategy = *rule_strategy_from_name(s.rule);
  c.max_steps = max_steps;
  return c;
}

std::unique_ptr<RuleMatcher> make_matcher(const std::string& kind, const Grammar& grammar,
                                          const std::string& assignment_path, unsigned threads,
                                          std::ostream& err) {
  if (kind == "direct") return std::make_unique<DirectMatcher>(grammar);
  DirectionAssignment a;
  if (!assignment_path.empty()) {
    require_readable(assignment_path);
    a = DirectionAssignment::from_json(read_file(assignment_path));
  } else if (!grammar.rules.empty()) {
    a = optimal_assignment(grammar, threads).assignment;
  }
  const auto start = std::chrono::steady_clock::now();
  auto m = std::make_unique<ContractMatcher>(grammar, a);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  err << "contract matcher: assignment " << a.fingerprint() << ", built in " << std::fixed
      << std::setprecision(3) << secs << " s\n";
  return m;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gridgram: context-sensitive grid grammar for UAV topologies", "gridgram"};
  app.require_subcommand(1);
  const unsigned threads = default_thread_count();

  // generate
  std::string gen_grammar, gen_out_dir = ".", gen_matcher = "direct", gen_assignment;
  int gen_n_half = 3;
  std::uint64_t gen_seed = 0;
  std::size_t gen_count = 1;
  std::optional<std::uint64_t> gen_max_steps;
  StrategyOptions gen_strategies;
  auto* gen = app.add_subcommand("generate", "Derive designs and write design/log files");
  gen->add_option("grammar", gen_grammar, "Rule file")->required();
  gen->add_option("--n-half", gen_n_half, "Grid half-width")->check(CLI::Range(0, 64));
  gen->add_option("--seed", gen_seed, "First seed");
  gen->add_option("--count", gen_count, "Number of derivations (seeds seed..seed+count-1)");
  gen->add_option("--max-steps", gen_max_steps, "Step limit per derivation");
  gen->add_option("--matcher", gen_matcher, "Rule matcher")
      ->check(CLI::IsMember({"direct", "contract"}));
  gen->add_option("--assignment", gen_assignment, "Direction assignment file (contract matcher)");
  gen->add_option("--out-dir", gen_out_dir, "Output directory");
  add_strategy_options(gen, gen_strategies);

  // replay
  std::string replay_log, replay_grammar;
  auto* rep = app.add_subcommand("replay", "Verify a derivation log against a grammar");
  rep->add_option("log", replay_log, "Log file")->required();
  rep->add_option("grammar", replay_grammar, "Rule file")->required();

  // validate
  std::string val_design, val_profile = "structural";
  auto* val = app.add_subcommand("validate", "Check a design against a validation profile");
  val->add_option("design", val_design, "Design file")->required();
  val->add_option("--profile", val_profile,
                  "Profile name (none, structural, demo) or profile file");

  // lint
  std::string lint_path;
  auto* lint = app.add_subcommand("lint", "Report grammar diagnostics");
  lint->add_option("grammar", lint_path, "Rule file")->required();

  // assign-dirs
  std::string assign_grammar, assign_out;
  auto* assign = app.add_subcommand("assign-dirs", "Find the direction assignment with fewest constraints");
  assign->add_option("grammar", assign_grammar, "Rule file")->required();
  assign->add_option("--out", assign_out, "Write the assignment to this file");

  // export
  std::string export_design, export_format = "dot", export_out;
  auto* exp = app.add_subcommand("export", "Export a design's component graph");
  exp->add_option("design", export_design, "Design file")->required();
  exp->add_option("--format", export_format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
  exp->add_option("--out", export_out, "Output file (default: standard output)");

  // bench
  std::string bench_grammar, bench_matcher = "direct", bench_profile = "none", bench_assignment;
  int bench_n_half = 3;
  std::size_t bench_count = 1000;
  std::uint64_t bench_seed = 0;
  StrategyOptions bench_strategies;
  auto* bench = app.add_subcommand("bench", "Measure generation throughput");
  bench->add_option("grammar", bench_grammar, "Rule file")->required();
  bench->add_option("--n-half", bench_n_half, "Grid half-width")->check(CLI::Range(0, 64));
  bench->add_option("--count", bench_count, "Number of derivations");
  bench->add_option("--seed", bench_seed, "First seed");
  bench->add_option("--matcher", bench_matcher, "direct, contract or both")
      ->check(CLI::IsMember({"direct", "contract", "both"}));
  bench->add_option("--assignment", bench_assignment, "Direction assignment file (contract matcher)");
  bench->add_option("--profile", bench_profile, "Validation profile applied to every design");
  add_strategy_options(bench, bench_strategies);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (gen->parsed()) {
    return guarded(err, [&] {
      if (gen_count == 0) throw UsageError("--count must be at least 1");
      if (gen_max_steps && *gen_max_steps == 0) throw UsageError("--max-steps must be at least 1");
      const Grammar grammar = read_grammar(gen_grammar);
      std::error_code ec;
      fs::create_directories(gen_out_dir, ec);
      if (!fs::is_directory(gen_out_dir)) throw UsageError("cannot create '" + gen_out_dir + "'");
      auto matcher = make_matcher(gen_matcher, grammar, gen_assignment, threads, err);
      const GridConfig grid{gen_n_half, "1"};
      const auto start = std::chrono::steady_clock::now();
      const auto results =
          generate_batch(grammar, grid, make_generation(gen_seed, gen_strategies, gen_max_steps),
                         gen_count, *matcher, threads);
      for (const GenerationResult& r : results) {
        const std::string seed = std::to_string(r.log.generation.seed);
        write_file((fs::path(gen_out_dir) / ("design_" + seed + ".json")).string(),
                   serialize_design(r.design));
        write_file((fs::path(gen_out_dir) / ("log_" + seed + ".json")).string(), serialize_log(r.log));
        out << "seed=" << seed << " outcome=" << outcome_name(r.log.outcome)
            << " steps=" << r.log.steps.size() << " " << counts_line(r.design) << "\n";
      }
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      err << "generated " << results.size() << " design(s) in " << std::fixed
          << std::setprecision(3) << secs << " s\n";
      return int{kExitOk};
    });
  }

  if (rep->parsed()) {
    return guarded(err, [&] {
      require_readable(replay_log);
      const Grammar grammar = read_grammar(replay_grammar);
      const DerivationLog log = parse_log(read_file(replay_log));
      const Design design = verify_log(log, grammar);
      out << "replay ok: " << log.steps.size() << " step(s), outcome "
          << outcome_name(log.outcome) << ", design " << design_hash(design) << "\n";
      return int{kExitOk};
    });
  }

  if (val->parsed()) {
    return guarded(err, [&] {
      require_readable(val_design);
      ValidationProfile profile;
      try {
        profile = load_profile(val_profile);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const Design design = parse_design(read_file(val_design));
      const ValidationReport report = validate_design(design, profile);
      for (const ValidationCheck& c : report.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
      }
      out << (report.ok() ? "valid" : "invalid") << " (profile " << profile.name << ")\n";
      return int{report.ok() ? kExitOk : kExitCheckFailed};
    });
  }

  if (lint->parsed()) {
    return guarded(err, [&] {
      const Grammar grammar = read_grammar(lint_path);
      const auto diagnostics = lint_grammar(grammar);
      std::size_t errors = 0, warnings = 0, infos = 0;
      for (const Diagnostic& d : diagnostics) {
        out << severity_name(d.severity) << " " << d.code
            << (d.rule.empty() ? "" : " [" + d.rule + "]") << ": " << d.message << "\n";
        if (d.severity == Severity::Error) ++errors;
        if (d.severity == Severity::Warning) ++warnings;
        if (d.severity == Severity::Info) ++infos;
      }
      out << grammar.rules.size() << " rule(s): " << errors << " error(s), " << warnings
          << " warning(s), " << infos << " info\n";
      return int{errors ? kExitCheckFailed : kExitOk};
    });
  }

  if (assign->parsed()) {
    return guarded(err, [&] {
      const Grammar grammar = read_grammar(assign_grammar);
      const auto start = std::chrono::steady_clock::now();
      const AssignmentResult result = optimal_assignment(grammar, threads);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      out << result.assignment.to_json();
      out << "total_constraints=" << result.total << " contexts=" << result.contexts
          << " scanned=" << result.scanned << " optimal_ties=" << result.optimal_ties << "\n";
      err << "scan took " << std::fixed << std::setprecision(3) << secs << " s\n";
      if (!assign_out.empty()) write_file(assign_out, result.assignment.to_json());
      return int{kExitOk};
    });
  }

  if (exp->parsed()) {
    return guarded(err, [&] {
      require_readable(export_design);
      const Design design = parse_design(read_file(export_design));
      const std::string text = export_format == "dot" ? export_dot(design) : export_graph_json(design);
      if (export_out.empty()) {
        out << text;
      } else {
        write_file(export_out, text);
      }
      return int{kExitOk};
    });
  }

  if (bench->parsed()) {
    return guarded(err, [&] {
      if (bench_count == 0) throw UsageError("--count must be at least 1");
      const Grammar grammar = read_grammar(bench_grammar);
      BenchOptions options;
      options.grid = GridConfig{bench_n_half, "1"};
      options.base = make_generation(bench_seed, bench_strategies, std::nullopt);
      options.count = bench_count;
      options.threads = threads;
      if (bench_profile != "none") {
        try {
          options.profile = load_profile(bench_profile);
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
      }
      std::vector<std::string> kinds;
      if (bench_matcher == "both") {
        kinds = {"direct", "contract"};
      } else {
        kinds = {bench_matcher};
      }
      std::vector<BenchReport> reports;
      for (const std::string& kind : kinds) {
        auto matcher = make_matcher(kind, grammar, bench_assignment, threads, err);
        reports.push_back(run_bench(grammar, *matcher, options));
      }
      out << std::fixed << std::setprecision(3);
      for (const BenchReport& r : reports) {
        out << "matcher=" << r.matcher << " designs=" << r.count << " seconds=" << r.seconds
            << " designs_per_second=" << std::setprecision(1) << r.designs_per_second
            << " mean_steps=" << r.mean_steps << std::setprecision(3) << " complete=" << r.complete
            << " stuck=" << r.stuck << " step_limit=" << r.step_limit << " valid=" << r.valid
            << "\n";
      }
      if (reports.size() == 2) {
        std::size_t same = 0;
        for (std::size_t i = 0; i < bench_count; ++i) {
          same += reports[0].design_hashes[i] == reports[1].design_hashes[i];
        }
        out << "\n" << std::left << std::setw(10) << "matcher" << std::setw(12) << "seconds"
            << std::setw(14) << "designs/s" << "\n";
        for (const BenchReport& r : reports) {
          out << std::setw(10) << r.matcher << std::setw(12) << std::setprecision(3) << r.seconds
              << std::setw(14) << std::setprecision(1) << r.designs_per_second << "\n";
        }
        out << "identical designs per seed: " << same << "/" << bench_count << "\n";
        if (same != bench_count) return int{kExitInternal};
      }
      return int{kExitOk};
    });
  }
  return kExitUsage;
}

}  // namespace gridgram
