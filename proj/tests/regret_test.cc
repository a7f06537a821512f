#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "lcgln/budget.h"
#include "lcgln/errors.h"
#include "lcgln/inventory.h"
#include "lcgln/portfolio.h"
#include "lcgln/train.h"
#include "toy_problem.h"

namespace lcgln {
namespace {

using testing::RandomNormal;
using testing::RandomSimplex;

struct Case {
  std::shared_ptr<const DecisionProblem> problem;
  std::function<Eigen::VectorXd(std::mt19937_64&)> draw;
};

std::vector<Case> AllCases() {
  std::vector<Case> cases;
  cases.push_back({std::make_shared<InventoryProblem>(InventoryConfig{}),
                   [](std::mt19937_64& rng) { return RandomSimplex(5, rng); }});
  cases.push_back({std::make_shared<BudgetProblem>(BudgetConfig{}),
                   [](std::mt19937_64& rng) {
                     std::uniform_real_distribution<double> unit(0.0, 1.0);
                     Eigen::VectorXd v(50);
                     for (auto& x : v) x = unit(rng);
                     return v;
                   }});
  std::mt19937_64 rng(99);
  Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(
      8, 8, [&] { return std::normal_distribution<double>()(rng); });
  Eigen::MatrixXd sigma = b * b.transpose() / 8.0;
  sigma.diagonal().array() += 0.2;
  cases.push_back({std::make_shared<PortfolioProblem>(sigma, 0.1, 8),
                   [](std::mt19937_64& rng) { return RandomNormal(8, rng); }});
  return cases;
}

TEST(RegretAxiomsTest, ZeroAtTruthAndNonnegative) {
  std::mt19937_64 rng(1);
  for (const Case& c : AllCases()) {
    for (int pair = 0; pair < 200; ++pair) {
      const Eigen::VectorXd y = c.draw(rng);
      const Eigen::VectorXd yhat = c.draw(rng);
      const double raw_self =
          c.problem->TaskLoss(c.problem->Solve(y), y) - c.problem->OptimalLoss(y);
      EXPECT_LE(std::abs(raw_self), 1e-9) << c.problem->name();
      EXPECT_EQ(c.problem->Regret(y, y), 0.0) << c.problem->name();
      EXPECT_GE(c.problem->Regret(yhat, y), 0.0) << c.problem->name();
      EXPECT_GE(c.problem->WorstCaseLoss(y), c.problem->OptimalLoss(y)) << c.problem->name();
    }
  }
}

TEST(RegretAxiomsTest, WorstDecisionsNormalizeToOne) {
  std::mt19937_64 rng(2);
  for (const Case& c : AllCases()) {
    std::vector<Instance> instances(200);
    std::vector<Decision> worst;
    for (auto& inst : instances) {
      inst.target = c.draw(rng);
      inst.features = Eigen::VectorXd::Zero(c.problem->feature_dim());
      worst.push_back(c.problem->WorstDecision(inst.target));
    }
    const RegretEvaluator evaluator(*c.problem, instances);
    EXPECT_NEAR(evaluator.EvaluateDecisions(worst).normalized_regret, 1.0, 1e-6)
        << c.problem->name();

    std::vector<Decision> optimal;
    for (const auto& inst : instances) optimal.push_back(c.problem->Solve(inst.target));
    EXPECT_EQ(evaluator.EvaluateDecisions(optimal).normalized_regret, 0.0)
        << c.problem->name();
  }
}

TEST(NormalizedRegretTest, RatioOfSums) {
  const std::vector<double> regrets = {1.0, 0.0, 3.0};
  const std::vector<double> worst = {2.0, 1e-12, 6.0};
  EXPECT_DOUBLE_EQ(NormalizedRegret(regrets, worst), 4.0 / (8.0 + 1e-12));
  const std::vector<double> short_list = {1.0};
  EXPECT_THROW(NormalizedRegret(regrets, short_list), ShapeError);
}

}  // namespace
}  // namespace lcgln
