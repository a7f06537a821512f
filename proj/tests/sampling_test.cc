#include "lcgln/sampling.h"

#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lcgln/budget.h"
#include "lcgln/errors.h"
#include "lcgln/inventory.h"
#include "lcgln/log.h"
#include "toy_problem.h"

namespace lcgln {
namespace {

int CountAnchors(const std::vector<SampleTriple>& s) {
  int n = 0;
  for (const auto& t : s) n += IsAnchor(t) ? 1 : 0;
  return n;
}

Benchmark SmallInventory(std::mt19937_64& rng) {
  InventoryConfig config;
  config.sizes = {40, 10, 10};
  return MakeInventoryBenchmark(config, rng);
}

TEST(MbsTest, CountsAndAnchors) {
  std::mt19937_64 data_rng(1);
  const Benchmark b = SmallInventory(data_rng);
  for (int k : {1, 2, 4, 8}) {
    std::mt19937_64 rng(2);
    const auto s = MbsGenerate(*b.problem, b.data.train, SamplerConfig{}, k, rng);
    EXPECT_EQ(s.size(), 40u * k);
    for (size_t i = 0; i < 40; ++i) EXPECT_TRUE(IsAnchor(s[i]));
    for (const auto& t : s) EXPECT_GE(t.regret, 0.0);
  }
}

TEST(MbsTest, SingleSampleIsAnchorsOnly) {
  std::mt19937_64 data_rng(1);
  const Benchmark b = SmallInventory(data_rng);
  std::mt19937_64 rng(3);
  const auto s = MbsGenerate(*b.problem, b.data.train, SamplerConfig{}, 1, rng);
  EXPECT_EQ(s.size(), 40u);
  EXPECT_EQ(CountAnchors(s), 40);
  EXPECT_THROW(MbsGenerate(*b.problem, b.data.train, SamplerConfig{}, 0, rng),
               ContractError);
}

TEST(MbsTest, RegretsReverifyExactly) {
  std::mt19937_64 data_rng(4);
  BudgetConfig config;
  config.sizes = {10, 2, 2};
  const Benchmark b = MakeBudgetBenchmark(config, data_rng);
  std::mt19937_64 rng(5);
  const auto s = MbsGenerate(*b.problem, b.data.train, SamplerConfig{}, 4, rng);
  ASSERT_EQ(s.size(), 40u);
  for (const auto& t : s) EXPECT_EQ(t.regret, b.problem->Regret(t.prediction, t.target));
}

TEST(MbsTest, Deterministic) {
  std::mt19937_64 data_rng(1);
  const Benchmark b = SmallInventory(data_rng);
  std::mt19937_64 r1(6);
  std::mt19937_64 r2(6);
  const auto a = MbsGenerate(*b.problem, b.data.train, SamplerConfig{}, 4, r1);
  const auto c = MbsGenerate(*b.problem, b.data.train, SamplerConfig{}, 4, r2);
  ASSERT_EQ(a.size(), c.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].prediction, c[i].prediction);
    EXPECT_EQ(a[i].regret, c[i].regret);
  }
}

TEST(MbsTest, TrajectoryApproachesTargets) {
  std::mt19937_64 rng(7);
  const Benchmark b = testing::MakeLinearBenchmark(5, 3, {50, 5, 5}, rng);
  SamplerConfig config;
  config.learning_rate = 0.05;
  const int k = 16;
  const auto s = MbsGenerate(*b.problem, b.data.train, config, k, rng);
  ASSERT_EQ(s.size(), 50u * k);
  std::vector<double> mean_distance;
  for (int epoch = 1; epoch < k; ++epoch) {
    double total = 0.0;
    for (size_t i = 0; i < 50; ++i) {
      const auto& t = s[epoch * 50 + i];
      total += (t.prediction - t.target).norm();
    }
    mean_distance.push_back(total / 50.0);
  }
  for (size_t e = 1; e < mean_distance.size(); ++e) {
    EXPECT_LE(mean_distance[e], mean_distance[e - 1]) << "epoch " << e + 1;
  }
  EXPECT_LT(mean_distance.back(), 0.5 * mean_distance.front());
}

// Delegates to the box problem, but after `reliable` solves every second
// solve fails.
class FlakyProblem final : public DecisionProblem {
 public:
  FlakyProblem(int feature_dim, int target_dim, int reliable)
      : box_(feature_dim, target_dim), reliable_(reliable) {}
  std::string_view name() const override { return "flaky"; }
  Sense sense() const override { return Sense::kMinimize; }
  int feature_dim() const override { return box_.feature_dim(); }
  int target_dim() const override { return box_.target_dim(); }
  Decision Solve(const Eigen::VectorXd& prediction) const override {
    if (++calls_ > reliable_ && calls_ % 2 == 0) throw SolverError("flaky solve");
    return box_.Solve(prediction);
  }
  double Objective(const Decision& d, const Eigen::VectorXd& y) const override {
    return box_.Objective(d, y);
  }
  Decision WorstDecision(const Eigen::VectorXd& y) const override {
    return box_.WorstDecision(y);
  }

 private:
  testing::BoxProblem box_;
  int reliable_;
  mutable int calls_ = 0;
};

TEST(MbsTest, SolverFailureSkipsAndWarns) {
  std::mt19937_64 rng(8);
  const Benchmark b = testing::MakeLinearBenchmark(5, 3, {20, 5, 5}, rng);
  const FlakyProblem flaky(5, 3, 20);  // the 20 optimal-loss solves succeed
  std::vector<std::string> warnings;
  const LogSink previous =
      SetWarningSink([&](std::string_view m) { warnings.emplace_back(m); });
  const auto s = MbsGenerate(flaky, b.data.train, SamplerConfig{}, 4, rng);
  SetWarningSink(previous);
  EXPECT_EQ(warnings.size(), 30u);
  EXPECT_EQ(s.size(), 80u - 30u);
  EXPECT_EQ(CountAnchors(s), 20);
}

TEST(GaussianTest, CountsAndSigmaZero) {
  std::mt19937_64 data_rng(1);
  const Benchmark b = SmallInventory(data_rng);
  std::mt19937_64 rng(9);
  const auto s = GaussianGenerate(*b.problem, b.data.train, 0.0, 8, rng);
  EXPECT_EQ(s.size(), 320u);
  EXPECT_EQ(CountAnchors(s), 320);
  const auto noisy = GaussianGenerate(*b.problem, b.data.train, 0.2, 8, rng);
  EXPECT_EQ(noisy.size(), 320u);
  for (const auto& t : noisy) {
    EXPECT_NEAR(t.prediction.sum(), 1.0, 1e-12);
    EXPECT_GE(t.prediction.minCoeff(), 0.0);
  }
}

TEST(GaussianTest, NoiseIsCentered) {
  std::mt19937_64 rng(10);
  const Benchmark b = testing::MakeLinearBenchmark(2, 4, {1, 1, 1}, rng);
  const double sigma = 0.3;
  const int draws = 10000;
  const auto s = GaussianGenerate(*b.problem, b.data.train, sigma, draws + 1, rng);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
  for (size_t i = 1; i < s.size(); ++i) mean += s[i].prediction - s[i].target;
  mean /= draws;
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 3.0 * sigma / 100.0);
}

TEST(TriplesCsvTest, RoundTrip) {
  std::mt19937_64 data_rng(1);
  const Benchmark b = SmallInventory(data_rng);
  std::mt19937_64 rng(11);
  const auto s = MbsGenerate(*b.problem, b.data.train, SamplerConfig{}, 3, rng);
  std::stringstream buffer;
  WriteTriplesCsv(buffer, s);
  const auto back = ReadTriplesCsv(buffer);
  ASSERT_EQ(back.size(), s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back[i].prediction, s[i].prediction);
    EXPECT_EQ(back[i].target, s[i].target);
    EXPECT_EQ(back[i].regret, s[i].regret);
  }
}

TEST(TriplesCsvTest, RejectsMalformedRows) {
  std::istringstream bad("pred_0,target_0,regret\n0.1,0.2\n");
  EXPECT_THROW(ReadTriplesCsv(bad), IngestionError);
  std::istringstream junk("pred_0,target_0,regret\n0.1,x,0\n");
  EXPECT_THROW(ReadTriplesCsv(junk), IngestionError);
}

}  // namespace
}  // namespace lcgln
