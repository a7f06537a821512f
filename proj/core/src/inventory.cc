#include "lcgln/inventory.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lcgln/errors.h"

namespace lcgln {

namespace {

void CheckDistribution(const InventoryConfig& config, const Eigen::VectorXd& p) {
  if (p.size() != static_cast<Eigen::Index>(config.demands.size())) {
    throw ShapeError("inventory distribution has dimension " +
                     std::to_string(p.size()) + ", expected " +
                     std::to_string(config.demands.size()));
  }
  if ((p.array() < -1e-12).any() || std::abs(p.sum() - 1.0) > 1e-6) {
    throw ContractError("inventory distribution is not on the simplex");
  }
}

}  // namespace

void InventoryConfig::Validate() const {
  if (feature_dim <= 0) throw ConfigError("inventory feature_dim must be > 0");
  if (demands.empty()) throw ConfigError("inventory needs demand levels");
  for (size_t i = 0; i < demands.size(); ++i) {
    if (!(demands[i] > 0.0) || (i > 0 && !(demands[i] > demands[i - 1]))) {
      throw ConfigError("inventory demands must be positive and strictly increasing");
    }
  }
  for (double c : {costs.c0, costs.q0, costs.cb, costs.qb, costs.ch, costs.qh}) {
    if (!(c > 0.0)) throw ConfigError("inventory cost coefficients must be > 0");
  }
  if (theta.size() != 0 &&
      (theta.rows() != feature_dim ||
       theta.cols() != static_cast<Eigen::Index>(demands.size()))) {
    throw ConfigError("inventory theta must be feature_dim x |demands|");
  }
  if (!(theta_scale > 0.0)) throw ConfigError("inventory theta_scale must be > 0");
  if (sizes.train < 1 || sizes.validation < 1 || sizes.test < 1) {
    throw ConfigError("inventory split sizes must be >= 1");
  }
}

double InventoryCost(const InventoryCosts& c, double demand, double order) {
  const double shortage = std::max(demand - order, 0.0);
  const double holding = std::max(order - demand, 0.0);
  return c.c0 * order + 0.5 * c.q0 * order * order + c.cb * shortage +
         0.5 * c.qb * shortage * shortage + c.ch * holding +
         0.5 * c.qh * holding * holding;
}

double InventoryExpectedCost(const InventoryConfig& config,
                             const Eigen::VectorXd& probabilities,
                             double order) {
  CheckDistribution(config, probabilities);
  if (order < 0.0) throw ContractError("inventory order must be >= 0");
  double total = 0.0;
  for (size_t i = 0; i < config.demands.size(); ++i) {
    total += probabilities[i] * InventoryCost(config.costs, config.demands[i], order);
  }
  return total;
}

double SolveInventoryOrder(const InventoryConfig& config,
                           const Eigen::VectorXd& probabilities) {
  CheckDistribution(config, probabilities);
  const auto& d = config.demands;
  const auto& c = config.costs;
  const size_t k = d.size();

  // Segment s spans [lo, hi] where demands d[0..s-1] <= a are in holding and
  // d[s..k-1] >= a are in shortage.
  std::vector<double> candidates = {0.0};
  candidates.insert(candidates.end(), d.begin(), d.end());
  for (size_t s = 0; s <= k; ++s) {
    double p_hold = 0.0, pd_hold = 0.0, p_short = 0.0, pd_short = 0.0;
    for (size_t i = 0; i < k; ++i) {
      if (i < s) {
        p_hold += probabilities[i];
        pd_hold += probabilities[i] * d[i];
      } else {
        p_short += probabilities[i];
        pd_short += probabilities[i] * d[i];
      }
    }
    // d/da = c0 + q0 a - cb P_s - qb (PD_s - a P_s) + ch P_h + qh (a P_h - PD_h)
    const double curvature = c.q0 + c.qb * p_short + c.qh * p_hold;
    const double slope_at_zero =
        c.c0 - c.cb * p_short - c.qb * pd_short + c.ch * p_hold - c.qh * pd_hold;
    const double lo = s == 0 ? 0.0 : d[s - 1];
    const double hi = s == k ? std::numeric_limits<double>::infinity() : d[s];
    candidates.push_back(std::clamp(-slope_at_zero / curvature, lo, hi));
  }
  double best = candidates.front();
  double best_cost = std::numeric_limits<double>::infinity();
  for (double a : candidates) {
    const double cost = InventoryExpectedCost(config, probabilities, a);
    if (cost < best_cost) {
      best_cost = cost;
      best = a;
    }
  }
  return best;
}

InventoryOrder MakeInventoryOrder(const InventoryConfig& config, double order) {
  if (order < 0.0) throw ContractError("inventory order must be >= 0");
  const auto k = static_cast<Eigen::Index>(config.demands.size());
  InventoryOrder out;
  out.order = order;
  out.shortage.resize(k);
  out.holding.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    out.shortage[i] = std::max(config.demands[i] - order, 0.0);
    out.holding[i] = std::max(order - config.demands[i], 0.0);
  }
  return out;
}

SplitDataset GenerateInventory(const InventoryConfig& config,
                               std::mt19937_64& rng) {
  config.Validate();
  const int k = static_cast<int>(config.demands.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd theta = config.theta;
  if (theta.size() == 0) {
    theta.resize(config.feature_dim, k);
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      theta.data()[i] = config.theta_scale * normal(rng);
    }
  }
  auto draw = [&](int count) {
    std::vector<Instance> out;
    out.reserve(count);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int n = 0; n < count; ++n) {
      Instance inst;
      inst.features.resize(config.feature_dim);
      for (auto& v : inst.features) v = normal(rng);
      inst.latent = SoftmaxColumns(theta.transpose() * inst.features).col(0);
      const double r = unit(rng);
      int realized = k - 1;
      double cumulative = 0.0;
      for (int i = 0; i < k; ++i) {
        cumulative += inst.latent[i];
        if (r < cumulative) {
          realized = i;
          break;
        }
      }
      inst.target = Eigen::VectorXd::Unit(k, realized);
      out.push_back(std::move(inst));
    }
    return out;
  };
  SplitDataset data;
  data.train = draw(config.sizes.train);
  data.validation = draw(config.sizes.validation);
  data.test = draw(config.sizes.test);
  return data;
}

InventoryProblem::InventoryProblem(InventoryConfig config)
    : config_(std::move(config)) {
  config_.Validate();
}

Decision InventoryProblem::ToDecision(double order) const {
  const InventoryOrder o = MakeInventoryOrder(config_, order);
  const auto k = o.shortage.size();
  Decision d(1 + 2 * k);
  d[0] = o.order;
  d.segment(1, k) = o.shortage;
  d.segment(1 + k, k) = o.holding;
  return d;
}

Decision InventoryProblem::Solve(const Eigen::VectorXd& prediction) const {
  return ToDecision(SolveInventoryOrder(config_, prediction));
}

double InventoryProblem::Objective(const Decision& decision,
                                   const Eigen::VectorXd& target) const {
  CheckTargetDim(target, "target");
  if (decision.size() != 1 + 2 * target_dim()) {
    throw ShapeError("inventory decision has the wrong layout");
  }
  return InventoryExpectedCost(config_, target, decision[0]);
}

Decision InventoryProblem::WorstDecision(const Eigen::VectorXd& target) const {
  CheckTargetDim(target, "target");
  return ToDecision(0.0);
}

Benchmark MakeInventoryBenchmark(InventoryConfig config, std::mt19937_64& rng) {
  Benchmark b;
  b.data = GenerateInventory(config, rng);
  b.problem = std::make_shared<InventoryProblem>(std::move(config));
  return b;
}

}  // namespace lcgln
