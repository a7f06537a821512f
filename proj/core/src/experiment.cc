#include "lcgln/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <utility>

#include "lcgln/budget.h"
#include "lcgln/errors.h"
#include "lcgln/inventory.h"
#include "lcgln/portfolio.h"
#include "lcgln/train.h"

namespace lcgln {

namespace {

std::mt19937_64 Stream(std::uint64_t base_seed, std::uint64_t seed,
                       std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed),
                    static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

// Drops a partial trailing line left by an interrupted append so new rows
// start on a fresh line.
void TrimPartialLine(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec || size == 0) return;
  std::ifstream in(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.back() == '\n') return;
  const auto last = text.find_last_of('\n');
  std::filesystem::resize_file(path, last == std::string::npos ? 0 : last + 1);
}

void EnsureHeader(const std::filesystem::path& path, const std::string& header) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::error_code ec;
  if (std::filesystem::exists(path, ec) && std::filesystem::file_size(path, ec) > 0) {
    TrimPartialLine(path);
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    if (first != header) {
      throw IngestionError(path.string() + ": existing file has a different header");
    }
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << header << '\n';
  if (!out.flush()) throw IngestionError("cannot write " + path.string());
}

}  // namespace

std::string RunHash(const ExperimentConfig& config, Method method, int samples,
                    int fakes) {
  return Fnv1aHex(SharedSettings(config) + "method=" + std::string(MethodName(method)) +
                  "\nsamples=" + std::to_string(samples) +
                  "\nfakes=" + std::to_string(fakes) + "\n");
}

std::vector<RunSpec> ExpandGrid(const ExperimentConfig& config) {
  std::vector<RunSpec> grid;
  for (Method m : config.methods) {
    for (int k : config.samples) {
      for (int f : config.fakes) {
        const std::string hash = RunHash(config, m, k, f);
        for (int s = 0; s < config.seeds; ++s) grid.push_back({m, k, f, s, hash});
      }
    }
  }
  return grid;
}

Benchmark MakeBenchmark(const ExperimentConfig& config, int fakes,
                        std::mt19937_64& rng) {
  switch (config.problem) {
    case ProblemKind::kInventory:
      return MakeInventoryBenchmark(config.inventory, rng);
    case ProblemKind::kBudget: {
      BudgetConfig budget = config.budget;
      budget.fake_targets = fakes;
      return MakeBudgetBenchmark(std::move(budget), rng);
    }
    case ProblemKind::kPortfolio:
      return MakePortfolioBenchmark(config.portfolio, rng);
  }
  throw ConfigError("unknown problem");
}

RunResult ExecuteRun(const ExperimentConfig& config, const RunSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  RunResult r;
  r.config_hash = spec.config_hash;
  r.problem = std::string(ProblemName(config.problem));
  r.method = std::string(MethodName(spec.method));
  r.samples = spec.samples;
  r.fakes = spec.fakes;
  r.seed = spec.seed;
  try {
    // One stream per run: data generation first, then model draws. In
    // model-only mode the data comes from a stream shared by all seeds.
    std::mt19937_64 rng = Stream(config.base_seed, spec.seed, 0);
    Benchmark benchmark;
    if (config.reseed == ReseedMode::kDataAndModel) {
      benchmark = MakeBenchmark(config, spec.fakes, rng);
    } else {
      std::mt19937_64 data_rng = Stream(config.base_seed, 0, 1);
      benchmark = MakeBenchmark(config, spec.fakes, data_rng);
    }
    CheckMethodApplies(spec.method, *benchmark.problem);
    const LcglnConfig lcgln = config.Resolved();
    DenseNet model;
    switch (spec.method) {
      case Method::kPfl:
        model = TrainPfl(benchmark, lcgln.predictor, rng).model;
        break;
      case Method::kDflPortfolio:
        model = TrainDflPortfolio(benchmark, lcgln.predictor, rng).model;
        break;
      case Method::kLcgln:
      case Method::kLcglnGaussian: {
        LcglnResult out = TrainLcgln(benchmark, spec.samples, lcgln, rng,
                                     spec.method == Method::kLcgln
                                         ? SamplerKind::kModelBased
                                         : SamplerKind::kGaussian);
        r.timings.sample_seconds = out.sample_seconds;
        r.timings.fit_seconds = out.fit_seconds;
        r.timings.train_seconds = out.train_seconds;
        model = std::move(out.predictor.model);
        break;
      }
    }
    const Evaluation e = Evaluate(model, *benchmark.problem, benchmark.data.test);
    if (!std::isfinite(e.normalized_regret)) {
      throw NumericalError("normalized test regret is not finite");
    }
    r.normalized_regret = e.normalized_regret;
    r.raw_regret = e.raw_regret;
    r.prediction_loss = e.prediction_loss;
  } catch (const std::exception& e) {
    r.ok = false;
    r.normalized_regret = r.raw_regret = r.prediction_loss = 0.0;
    r.error = e.what();
  }
  r.timings.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

ExperimentOutcome RunExperiment(const ExperimentConfig& config,
                                const RunOptions& options) {
  config.Validate();
  if (options.results_path.empty()) throw ConfigError("out: results path is empty");
  const std::vector<RunSpec> grid = ExpandGrid(config);

  EnsureHeader(options.results_path, ResultsHeader());
  if (!options.timings_path.empty()) EnsureHeader(options.timings_path, TimingsHeader());

  std::map<std::pair<std::string, int>, RunResult> done;
  for (auto& r : ReadResultsFile(options.results_path)) {
    done.emplace(std::make_pair(r.config_hash, r.seed), std::move(r));
  }

  ExperimentOutcome outcome;
  outcome.results.resize(grid.size());
  std::vector<size_t> pending;
  for (size_t i = 0; i < grid.size(); ++i) {
    const auto it = done.find({grid[i].config_hash, grid[i].seed});
    if (it != done.end()) {
      outcome.results[i] = it->second;
      ++outcome.skipped;
    } else {
      pending.push_back(i);
    }
  }

  std::ofstream results(options.results_path, std::ios::binary | std::ios::app);
  std::ofstream timings;
  if (!options.timings_path.empty()) {
    timings.open(options.timings_path, std::ios::binary | std::ios::app);
  }
  std::mutex writer;
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t j = next++; j < pending.size(); j = next++) {
      const size_t i = pending[j];
      RunResult r = ExecuteRun(config, grid[i]);
      std::lock_guard lock(writer);
      results << FormatResultRow(r) << '\n' << std::flush;
      if (timings.is_open()) timings << FormatTimingsRow(r) << '\n' << std::flush;
      if (options.on_result) options.on_result(r);
      outcome.results[i] = std::move(r);
      ++outcome.executed;
    }
  };

  int workers = config.workers > 0
                    ? config.workers
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, static_cast<int>(pending.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (!results) throw IngestionError("write failed for " + options.results_path);

  for (const auto& r : outcome.results) outcome.failed += r.ok ? 0 : 1;
  return outcome;
}

}  // namespace lcgln
