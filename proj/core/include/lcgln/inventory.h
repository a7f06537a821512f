#ifndef LCGLN_INVENTORY_H_
#define LCGLN_INVENTORY_H_

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "lcgln/problem.h"

namespace lcgln {

// Linear and quadratic coefficients of ordering (c0, q0), shortage (cb, qb),
// and holding (ch, qh) costs.
struct InventoryCosts {
  double c0 = 10.0;
  double q0 = 2.0;
  double cb = 30.0;
  double qb = 14.0;
  double ch = 10.0;
  double qh = 2.0;
};

struct InventoryConfig {
  int feature_dim = 20;
  std::vector<double> demands = {1.0, 2.0, 5.0, 10.0, 20.0};
  InventoryCosts costs;
  // feature_dim x demands.size(). Drawn i.i.d. N(0, theta_scale^2) from the
  // data stream when left empty.
  Eigen::MatrixXd theta;
  double theta_scale = 1.0;
  SplitSizes sizes = {400, 100, 400};

  void Validate() const;
};

// Order quantity plus the implied shortage/holding amounts per demand level.
struct InventoryOrder {
  double order = 0.0;
  Eigen::VectorXd shortage;  // max(d - a, 0)
  Eigen::VectorXd holding;   // max(a - d, 0)
};

// Cost of ordering `order` units when `demand` is realized.
double InventoryCost(const InventoryCosts& costs, double demand, double order);

// Expected cost under a demand distribution over config.demands.
double InventoryExpectedCost(const InventoryConfig& config,
                             const Eigen::VectorXd& probabilities,
                             double order);

// Exact minimizer over order >= 0. The expected cost is convex and piecewise
// quadratic with breakpoints at the demand levels, so the minimizer is the
// best of each segment's clipped stationary point.
double SolveInventoryOrder(const InventoryConfig& config,
                           const Eigen::VectorXd& probabilities);

InventoryOrder MakeInventoryOrder(const InventoryConfig& config, double order);

// Features x ~ N(0, I); p = softmax(theta^T x); target = one-hot of a demand
// index sampled from p; latent = p.
SplitDataset GenerateInventory(const InventoryConfig& config,
                               std::mt19937_64& rng);

// Decisions are laid out as [order, shortage..., holding...].
class InventoryProblem final : public DecisionProblem {
 public:
  explicit InventoryProblem(InventoryConfig config);

  std::string_view name() const override { return "inventory"; }
  Sense sense() const override { return Sense::kMinimize; }
  int feature_dim() const override { return config_.feature_dim; }
  int target_dim() const override {
    return static_cast<int>(config_.demands.size());
  }
  bool simplex_targets() const override { return true; }
  PredictionLoss prediction_loss() const override { return PredictionLoss::kNll; }
  Activation output_activation() const override { return Activation::kSoftmax; }

  Decision Solve(const Eigen::VectorXd& prediction) const override;
  double Objective(const Decision& decision,
                   const Eigen::VectorXd& target) const override;
  // Ordering nothing.
  Decision WorstDecision(const Eigen::VectorXd& target) const override;

  Decision ToDecision(double order) const;
  const InventoryConfig& config() const { return config_; }

 private:
  InventoryConfig config_;
};

Benchmark MakeInventoryBenchmark(InventoryConfig config, std::mt19937_64& rng);

}  // namespace lcgln

#endif  // LCGLN_INVENTORY_H_
