#ifndef LCGLN_CONFIG_H_
#define LCGLN_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lcgln/budget.h"
#include "lcgln/inventory.h"
#include "lcgln/portfolio.h"
#include "lcgln/train.h"

namespace lcgln {

enum class ProblemKind { kInventory, kBudget, kPortfolio };

std::string_view ProblemName(ProblemKind kind);
std::optional<ProblemKind> ParseProblem(std::string_view name);
std::vector<ProblemKind> AllProblems();

// How repetitions differ: fresh data and model per seed, or a fixed dataset
// (drawn from base_seed) with only the model streams reseeded.
enum class ReseedMode { kDataAndModel, kModelOnly };

std::string_view ReseedName(ReseedMode mode);

inline constexpr int kAllowedSamples[] = {2, 4, 8, 16, 32};
inline constexpr int kAllowedFakes[] = {0, 5, 50, 500};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::kInventory;
  std::vector<Method> methods = {Method::kPfl, Method::kLcgln};
  std::vector<int> samples = {32};
  std::vector<int> fakes = {0};
  int seeds = 5;
  std::uint64_t base_seed = 0;
  ReseedMode reseed = ReseedMode::kDataAndModel;
  int workers = 0;  // 0 = hardware concurrency
  std::string out_dir;

  InventoryConfig inventory;
  BudgetConfig budget;
  PortfolioConfig portfolio;
  // Unset means the per-problem default: 500 units for portfolio, 10 otherwise.
  std::optional<std::vector<int>> predictor_hidden;
  // Unset means the per-problem default from DefaultSamplerRate().
  std::optional<double> sampler_lr;
  LcglnConfig lcgln;

  // Throws ConfigError naming the offending key.
  void Validate() const;
  // Predictor settings with the per-problem hidden width and sampler rate
  // resolved. The sampler mirrors the predictor architecture.
  LcglnConfig Resolved() const;
};

// Sampler learning rate picked per problem from {0.01, 0.05, 0.1, 0.5, 1} by
// mean best validation regret of the trained predictor. Portfolio uses 0.001:
// every rate in that grid diverges with the 250-input, 500-unit sampler.
double DefaultSamplerRate(ProblemKind problem);

// Applies one `key = value` setting. Throws ConfigError naming the key on an
// unknown key or a malformed value.
void ApplySetting(ExperimentConfig& config, std::string_view key,
                  std::string_view value);

// Flat text: one `key = value` per line, `#` starts a comment.
ExperimentConfig ParseConfig(std::string_view text);
ExperimentConfig LoadConfig(const std::string& path);

// Every key with its effective value, one per line, sorted by key. Parsing
// the output yields an equivalent config.
std::string EffectiveConfig(const ExperimentConfig& config);

// Canonical text of everything that determines a run except the grid axes
// and scheduling knobs (methods, samples, fakes, seeds, workers, out).
std::string SharedSettings(const ExperimentConfig& config);

// 64-bit FNV-1a, printed as 16 lowercase hex digits.
std::string Fnv1aHex(std::string_view text);

}  // namespace lcgln

#endif  // LCGLN_CONFIG_H_
