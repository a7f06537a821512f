#ifndef LCGLN_BUDGET_H_
#define LCGLN_BUDGET_H_

#include <Eigen/Dense>
#include <random>

#include "lcgln/problem.h"

namespace lcgln {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct BudgetConfig {
  int users = 10;
  int websites = 5;
  int budget = 2;
  // Extra uninformative websites whose CTRs are pure noise. They join the
  // selectable set, which is what makes the task harder as the count grows.
  int fake_targets = 0;
  // users x users feature mixing matrix; drawn N(0, 1) when empty.
  Eigen::MatrixXd mixing;
  SplitSizes sizes = {80, 20, 100};

  int total_websites() const { return websites + fake_targets; }
  void Validate() const;
};

// Expected number of users who click at least once:
//   sum_u (1 - prod_w (1 - a_w * ctr[w, u])).
// `ctr` is (websites x users); entries are clamped to [0, 1].
double BudgetObjective(const Eigen::VectorXd& selection, const RowMatrix& ctr);

// Exact maximizer over all subsets of exactly `budget` websites, enumerated
// in lexicographic order; ties keep the lexicographically smallest subset.
Eigen::VectorXd SolveBudget(const RowMatrix& ctr, int budget);

// Exact minimizer over the same feasible set (same tie rule).
Eigen::VectorXd WorstBudgetSelection(const RowMatrix& ctr, int budget);

// Base CTRs y_w ~ U[0,1]^users for the real websites with features
// x_w = A y_w, followed by `fake_targets` websites whose CTRs are uniform and
// whose features are A z for an independent uniform z. Features and targets
// are flattened website-major, `users` entries per website.
SplitDataset GenerateBudget(const BudgetConfig& config, std::mt19937_64& rng);

class BudgetProblem final : public DecisionProblem {
 public:
  explicit BudgetProblem(BudgetConfig config);

  std::string_view name() const override { return "budget"; }
  Sense sense() const override { return Sense::kMaximize; }
  int feature_dim() const override {
    return config_.total_websites() * config_.users;
  }
  int target_dim() const override {
    return config_.total_websites() * config_.users;
  }

  // One shared CTR model per website.
  int prediction_tiles() const override { return config_.total_websites(); }

  Decision Solve(const Eigen::VectorXd& prediction) const override;
  double Objective(const Decision& decision,
                   const Eigen::VectorXd& target) const override;
  Decision WorstDecision(const Eigen::VectorXd& target) const override;

  RowMatrix AsMatrix(const Eigen::VectorXd& flat) const;
  const BudgetConfig& config() const { return config_; }

 private:
  BudgetConfig config_;
};

Benchmark MakeBudgetBenchmark(BudgetConfig config, std::mt19937_64& rng);

}  // namespace lcgln

#endif  // LCGLN_BUDGET_H_
