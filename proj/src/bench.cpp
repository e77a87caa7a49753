#include "gridgram/bench.hpp"

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

namespace gridgram {

BenchReport run_bench(const Grammar& grammar, const RuleMatcher& matcher,
                      const BenchOptions& options) {
  BenchReport report;
  report.matcher = std::string(matcher.name());
  report.count = options.count;

  const auto start = std::chrono::steady_clock::now();
  std::vector<GenerationResult> results = generate_batch(
      grammar, options.grid, options.base, options.count, matcher, options.threads);
  std::uint64_t steps = 0;
  for (const GenerationResult& r : results) {
    steps += r.log.steps.size();
    switch (r.log.outcome) {
      case Outcome::Complete: ++report.complete; break;
      case Outcome::Stuck: ++report.stuck; break;
      case Outcome::StepLimit: ++report.step_limit; break;
    }
    if (!options.profile || validate_design(r.design, *options.profile).ok()) ++report.valid;
    report.design_hashes.push_back(r.log.design_hash);
  }
  const auto stop = std::chrono::steady_clock::now();

  report.seconds = std::chrono::duration<double>(stop - start).count();
  report.designs_per_second =
      report.seconds > 0.0 ? static_cast<double>(options.count) / report.seconds : 0.0;
  report.mean_steps =
      options.count ? static_cast<double>(steps) / static_cast<double>(options.count) : 0.0;
  if (options.keep_results) report.results = std::move(results);
  return report;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("GRIDGRAM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace gridgram
