#include "lcgln/budget.h"

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "lcgln/errors.h"

namespace lcgln {
namespace {

double Coverage(const std::vector<int>& chosen, const RowMatrix& ctr) {
  double total = 0.0;
  for (Eigen::Index u = 0; u < ctr.cols(); ++u) {
    double miss = 1.0;
    for (int w : chosen) miss *= 1.0 - ctr(w, u);
    total += 1.0 - miss;
  }
  return total;
}

// Bitmask brute force; ties go to the lexicographically smallest index list.
std::vector<int> BruteForce(const RowMatrix& ctr, int budget, bool maximize) {
  const int n = static_cast<int>(ctr.rows());
  std::vector<int> best;
  double best_value = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != budget) continue;
    std::vector<int> chosen;
    for (int w = 0; w < n; ++w) {
      if (mask & (1u << w)) chosen.push_back(w);
    }
    const double value = Coverage(chosen, ctr);
    const bool better = maximize ? value > best_value : value < best_value;
    if (best.empty() || better || (value == best_value && chosen < best)) {
      best = chosen;
      best_value = value;
    }
  }
  return best;
}

std::vector<int> Chosen(const Eigen::VectorXd& selection) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < selection.size(); ++i) {
    if (selection[i] == 1.0) out.push_back(static_cast<int>(i));
  }
  return out;
}

RowMatrix RandomCtr(int websites, int users, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RowMatrix m(websites, users);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = unit(rng);
  return m;
}

TEST(BudgetObjectiveTest, HandValues) {
  RowMatrix ctr(2, 1);
  ctr << 0.5, 0.5;
  EXPECT_DOUBLE_EQ(BudgetObjective(Eigen::Vector2d(1, 1), ctr), 0.75);
  EXPECT_DOUBLE_EQ(BudgetObjective(Eigen::Vector2d(0, 0), ctr), 0.0);

  std::mt19937_64 rng(1);
  const RowMatrix many = RandomCtr(5, 10, rng);
  for (int w = 0; w < 5; ++w) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(5);
    e[w] = 1.0;
    EXPECT_NEAR(BudgetObjective(e, many), many.row(w).sum(), 1e-12);
  }
}

TEST(BudgetSolveTest, HandCases) {
  RowMatrix ctr(3, 1);
  ctr << 0.3, 0.7, 0.1;
  EXPECT_EQ(Chosen(SolveBudget(ctr, 1)), (std::vector<int>{1}));

  const RowMatrix equal = RowMatrix::Constant(4, 3, 0.4);
  EXPECT_EQ(Chosen(SolveBudget(equal, 2)), (std::vector<int>{0, 1}));
  EXPECT_EQ(Chosen(SolveBudget(equal, 3)), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(Chosen(WorstBudgetSelection(equal, 2)), (std::vector<int>{0, 1}));
}

TEST(BudgetSolveTest, BudgetAboveWebsitesIsContractError) {
  const RowMatrix ctr = RowMatrix::Constant(3, 2, 0.5);
  EXPECT_THROW(SolveBudget(ctr, 4), ContractError);
  EXPECT_THROW(SolveBudget(ctr, 0), ContractError);
}

TEST(BudgetSolveTest, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int websites = 3 + trial % 8;
    const int budget = 1 + trial % 3;
    const RowMatrix ctr = RandomCtr(websites, 10, rng);
    EXPECT_EQ(Chosen(SolveBudget(ctr, budget)), BruteForce(ctr, budget, true));
    EXPECT_EQ(Chosen(WorstBudgetSelection(ctr, budget)), BruteForce(ctr, budget, false));
  }
}

TEST(BudgetProblemTest, Dimensions) {
  BudgetConfig config;
  EXPECT_EQ(BudgetProblem(config).target_dim(), 50);
  EXPECT_EQ(BudgetProblem(config).prediction_tiles(), 5);
  config.fake_targets = 500;
  EXPECT_EQ(BudgetProblem(config).target_dim(), 5050);
  EXPECT_EQ(BudgetProblem(config).feature_dim(), 5050);
}

TEST(BudgetProblemTest, GeneratedData) {
  BudgetConfig config;
  config.fake_targets = 5;
  config.sizes = {8, 4, 4};
  std::mt19937_64 rng(3);
  const SplitDataset data = GenerateBudget(config, rng);
  ASSERT_EQ(data.train.size(), 8u);
  for (const Instance& inst : data.train) {
    EXPECT_EQ(inst.target.size(), 100);
    EXPECT_EQ(inst.features.size(), 100);
    EXPECT_GE(inst.target.minCoeff(), 0.0);
    EXPECT_LE(inst.target.maxCoeff(), 1.0);
  }
  std::mt19937_64 again(3);
  const SplitDataset repeat = GenerateBudget(config, again);
  EXPECT_EQ(repeat.test.back().target, data.test.back().target);
}

TEST(BudgetProblemTest, RealFeaturesAreMixedTargets) {
  BudgetConfig config;
  config.fake_targets = 2;
  config.mixing = Eigen::MatrixXd::Identity(10, 10) * 2.0;
  config.sizes = {3, 1, 1};
  std::mt19937_64 rng(4);
  const SplitDataset data = GenerateBudget(config, rng);
  for (const Instance& inst : data.train) {
    // With A = 2I the five real websites' features are exactly 2 * CTR.
    EXPECT_EQ(inst.features.head(50), 2.0 * inst.target.head(50));
    EXPECT_NE(inst.features.tail(20), 2.0 * inst.target.tail(20));
  }
}

TEST(BudgetProblemTest, WorstDecisionIsMinimalFeasibleObjective) {
  BudgetConfig config;
  const BudgetProblem problem(config);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const RowMatrix ctr = RandomCtr(5, 10, rng);
    const Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(ctr.data(), ctr.size());
    const std::vector<int> worst = BruteForce(ctr, 2, false);
    EXPECT_NEAR(problem.Objective(problem.WorstDecision(flat), flat), Coverage(worst, ctr),
                1e-12);
  }
}

TEST(BudgetProblemTest, SameDecisionMeansZeroRegret) {
  const BudgetProblem problem{BudgetConfig{}};
  std::mt19937_64 rng(6);
  const RowMatrix ctr = RandomCtr(5, 10, rng);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ctr.data(), ctr.size());
  // Halving the CTRs of unchosen websites only lowers the other pairs.
  Eigen::VectorXd shrunk = y;
  const Eigen::VectorXd chosen = problem.Solve(y);
  for (int w = 0; w < 5; ++w) {
    if (chosen[w] == 0.0) shrunk.segment(w * 10, 10) *= 0.5;
  }
  ASSERT_EQ(problem.Solve(shrunk), chosen);
  EXPECT_EQ(problem.Regret(shrunk, y), 0.0);
  EXPECT_GT(problem.Regret(y, shrunk), -1e-12);
}

}  // namespace
}  // namespace lcgln
