#ifndef LCGLN_RESULTS_H_
#define LCGLN_RESULTS_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lcgln {

struct StageTimings {
  double wall_seconds = 0.0;
  double sample_seconds = 0.0;
  double fit_seconds = 0.0;
  double train_seconds = 0.0;
};

struct RunResult {
  std::string config_hash;
  std::string problem;
  std::string method;
  int samples = 0;
  int fakes = 0;
  int seed = 0;
  bool ok = true;
  double normalized_regret = 0.0;
  double raw_regret = 0.0;
  double prediction_loss = 0.0;
  std::string error;  // set when !ok; commas and newlines are replaced
  // Not part of the results row: wall-clock values differ between otherwise
  // identical runs, so they go to a separate timings file.
  StageTimings timings;
};

std::string ResultsHeader();
std::string FormatResultRow(const RunResult& result);
// Throws IngestionError on a malformed row.
RunResult ParseResultRow(const std::string& line);

// Reads a results file. A truncated final line (interrupted write) is
// skipped; any other malformed row raises IngestionError.
std::vector<RunResult> ReadResults(std::istream& in);
std::vector<RunResult> ReadResultsFile(const std::string& path);

std::string TimingsHeader();
std::string FormatTimingsRow(const RunResult& result);

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;  // sample stddev (n - 1) / sqrt(n); 0 for n = 1
};

// Throws ContractError on an empty input.
MeanSem Summarize(std::span<const double> values);

struct Summary {
  std::string problem;
  std::string method;
  int samples = 0;
  int fakes = 0;
  int count = 0;
  double mean = 0.0;
  double sem = 0.0;

  bool operator==(const Summary&) const = default;
};

// Groups successful runs by (problem, method, samples, fakes), sorted by
// those keys, and summarizes normalized test regret.
std::vector<Summary> SummarizeResults(std::span<const RunResult> results);

}  // namespace lcgln

#endif  // LCGLN_RESULTS_H_
