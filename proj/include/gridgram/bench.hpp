#pragma once

// Batch generation with throughput and validity statistics.

#include <optional>
#include <string>
#include <vector>

#include "gridgram/generator.hpp"
#include "gridgram/validation.hpp"

namespace gridgram {

struct BenchOptions {
  GridConfig grid;
  GenerationConfig base;
  std::size_t count = 0;
  unsigned threads = 1;
  std::optional<ValidationProfile> profile;
  bool keep_results = false;
};

struct BenchReport {
  std::string matcher;
  std::size_t count = 0;
  std::size_t complete = 0;
  std::size_t stuck = 0;
  std::size_t step_limit = 0;
  // Designs passing the profile; equals count when no profile is given.
  std::size_t valid = 0;
  double seconds = 0.0;
  double designs_per_second = 0.0;
  double mean_steps = 0.0;
  std::vector<std::string> design_hashes;
  std::vector<GenerationResult> results;
};

BenchReport run_bench(const Grammar& grammar, const RuleMatcher& matcher,
                      const BenchOptions& options);

// GRIDGRAM_THREADS if set and positive, else the hardware concurrency.
unsigned default_thread_count();

}  // namespace gridgram
