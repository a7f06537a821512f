#include <benchmark/benchmark.h>

#include <random>

#include "lcgln/budget.h"
#include "lcgln/inventory.h"
#include "lcgln/portfolio.h"

namespace lcgln {
namespace {

void BM_InventorySolve(benchmark::State& state) {
  const InventoryConfig config;
  Eigen::VectorXd p(5);
  p << 0.1, 0.3, 0.2, 0.25, 0.15;
  for (auto _ : state) benchmark::DoNotOptimize(SolveInventoryOrder(config, p));
}
BENCHMARK(BM_InventorySolve);

void BM_BudgetSolve(benchmark::State& state) {
  BudgetConfig config;
  config.fake_targets = static_cast<int>(state.range(0));
  const BudgetProblem problem(config);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd ctr(problem.target_dim());
  for (auto& v : ctr) v = unit(rng);
  for (auto _ : state) benchmark::DoNotOptimize(problem.Solve(ctr));
}
BENCHMARK(BM_BudgetSolve)->Arg(0)->Arg(50)->Arg(500);

void BM_PortfolioSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = normal(rng);
  Eigen::MatrixXd sigma = b * b.transpose() / n;
  sigma.diagonal().array() += 0.5;
  const PortfolioProblem problem(sigma, 0.1, n);
  Eigen::VectorXd y(n);
  for (auto& v : y) v = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(problem.Solve(y));
}
BENCHMARK(BM_PortfolioSolve)->Arg(10)->Arg(50);

}  // namespace
}  // namespace lcgln
