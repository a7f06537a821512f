#include "lcgln/problem.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lcgln/errors.h"

namespace lcgln {

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "unknown";
}

const std::vector<Instance>& SplitDataset::split(Split s) const {
  switch (s) {
    case Split::kTrain:
      return train;
    case Split::kValidation:
      return validation;
    case Split::kTest:
      return test;
  }
  return test;
}

Eigen::MatrixXd FeatureMatrix(std::span<const Instance> instances) {
  if (instances.empty()) return {};
  Eigen::MatrixXd m(instances.front().features.size(),
                    static_cast<Eigen::Index>(instances.size()));
  for (size_t i = 0; i < instances.size(); ++i) m.col(i) = instances[i].features;
  return m;
}

Eigen::MatrixXd TargetMatrix(std::span<const Instance> instances) {
  if (instances.empty()) return {};
  Eigen::MatrixXd m(instances.front().target.size(),
                    static_cast<Eigen::Index>(instances.size()));
  for (size_t i = 0; i < instances.size(); ++i) m.col(i) = instances[i].target;
  return m;
}

void DecisionProblem::CheckTargetDim(const Eigen::VectorXd& v,
                                     std::string_view what) const {
  if (v.size() != target_dim()) {
    throw ShapeError(std::string(name()) + ": " + std::string(what) +
                     " has dimension " + std::to_string(v.size()) +
                     ", expected " + std::to_string(target_dim()));
  }
}

double DecisionProblem::TaskLoss(const Decision& decision,
                                 const Eigen::VectorXd& target) const {
  const double value = Objective(decision, target);
  return sense() == Sense::kMinimize ? value : -value;
}

double DecisionProblem::OptimalLoss(const Eigen::VectorXd& target) const {
  return TaskLoss(Solve(target), target);
}

double DecisionProblem::WorstCaseLoss(const Eigen::VectorXd& target) const {
  return TaskLoss(WorstDecision(target), target);
}

double DecisionProblem::Regret(const Eigen::VectorXd& prediction,
                               const Eigen::VectorXd& target) const {
  return RegretGivenOptimal(prediction, target, OptimalLoss(target));
}

double DecisionProblem::RegretGivenOptimal(const Eigen::VectorXd& prediction,
                                           const Eigen::VectorXd& target,
                                           double optimal_loss) const {
  CheckTargetDim(prediction, "prediction");
  return DecisionRegret(Solve(prediction), target, optimal_loss);
}

double DecisionProblem::DecisionRegret(const Decision& decision,
                                       const Eigen::VectorXd& target,
                                       double optimal_loss) const {
  const double raw = TaskLoss(decision, target) - optimal_loss;
  if (!std::isfinite(raw)) {
    throw SolverError(std::string(name()) + ": non-finite regret");
  }
  if (raw < -1e-9 * std::max(1.0, std::abs(optimal_loss))) {
    throw SolverError(std::string(name()) +
                      ": decision beats the oracle by " + std::to_string(-raw));
  }
  return std::max(raw, 0.0);
}

double DecisionProblem::WorstRegret(const Eigen::VectorXd& target) const {
  return std::max(WorstCaseLoss(target) - OptimalLoss(target), 0.0);
}

double DecisionProblem::PredictionError(const Eigen::VectorXd& prediction,
                                        const Eigen::VectorXd& target) const {
  if (prediction_loss() == PredictionLoss::kNll) {
    Eigen::Index cls = 0;
    target.maxCoeff(&cls);
    return NllLoss(prediction, static_cast<int>(cls));
  }
  return MseLoss(prediction, target);
}

double NormalizedRegret(std::span<const double> regrets,
                        std::span<const double> worst_regrets) {
  if (regrets.size() != worst_regrets.size()) {
    throw ShapeError("regret and worst-regret lists differ in length");
  }
  const double num = std::accumulate(regrets.begin(), regrets.end(), 0.0);
  const double den =
      std::accumulate(worst_regrets.begin(), worst_regrets.end(), 0.0);
  if (den <= 0.0) return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return num / den;
}

}  // namespace lcgln
