#ifndef LCGLN_EXPERIMENT_H_
#define LCGLN_EXPERIMENT_H_

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lcgln/config.h"
#include "lcgln/problem.h"
#include "lcgln/results.h"

namespace lcgln {

struct RunSpec {
  Method method = Method::kPfl;
  int samples = 0;
  int fakes = 0;
  int seed = 0;
  std::string config_hash;
};

// Hash of everything that determines a run apart from its seed.
std::string RunHash(const ExperimentConfig& config, Method method, int samples,
                    int fakes);

// methods x samples x fakes x seeds, in that nesting order.
std::vector<RunSpec> ExpandGrid(const ExperimentConfig& config);

// Builds the benchmark for one run. `rng` is the run's data stream.
Benchmark MakeBenchmark(const ExperimentConfig& config, int fakes,
                        std::mt19937_64& rng);

// Runs one grid cell. Failures are captured in the result, never thrown.
RunResult ExecuteRun(const ExperimentConfig& config, const RunSpec& spec);

struct RunOptions {
  std::string results_path;
  std::string timings_path;  // empty disables timing output
  // Called under the writer lock after each completed run.
  std::function<void(const RunResult&)> on_result;
};

struct ExperimentOutcome {
  std::vector<RunResult> results;  // grid order, including resumed rows
  int executed = 0;
  int skipped = 0;  // already present in the results file
  int failed = 0;   // error rows among `results`
};

// Validates the config, then runs every grid cell whose (hash, seed) pair is
// not yet in the results file, appending one flushed row per run.
ExperimentOutcome RunExperiment(const ExperimentConfig& config,
                                const RunOptions& options);

}  // namespace lcgln

#endif  // LCGLN_EXPERIMENT_H_
