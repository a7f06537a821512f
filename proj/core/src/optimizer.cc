#include "lcgln/optimizer.h"

#include <cmath>
#include <string>

#include "lcgln/errors.h"

namespace lcgln {

std::string_view OptimizerName(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be a positive finite number");
  }
  if (epochs < 1) throw ConfigError("epoch count must be at least 1");
  if (optimizer == OptimizerKind::kAdam &&
      (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0 ||
       !(epsilon > 0.0))) {
    throw ConfigError("adam needs beta1, beta2 in [0, 1) and epsilon > 0");
  }
}

Optimizer::Optimizer(const TrainConfig& config, Eigen::Index num_parameters)
    : config_(config) {
  config_.Validate();
  if (config_.optimizer == OptimizerKind::kAdam) {
    first_moment_ = Eigen::VectorXd::Zero(num_parameters);
    second_moment_ = Eigen::VectorXd::Zero(num_parameters);
  }
}

void Optimizer::Step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != grad.size()) {
    throw ShapeError("gradient size " + std::to_string(grad.size()) +
                     " does not match parameter count " +
                     std::to_string(params.size()));
  }
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw NumericalError("non-finite gradient at parameter index " +
                           std::to_string(i) + " (step " +
                           std::to_string(step_ + 1) + ")");
    }
  }
  ++step_;
  if (config_.optimizer == OptimizerKind::kSgd) {
    params -= config_.learning_rate * grad;
    return;
  }
  if (first_moment_.size() != grad.size()) {
    throw ShapeError("optimizer state was sized for a different model");
  }
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  first_moment_ = b1 * first_moment_ + (1.0 - b1) * grad;
  second_moment_ = b2 * second_moment_ + (1.0 - b2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  params.array() -= config_.learning_rate * (first_moment_.array() / c1) /
                    ((second_moment_.array() / c2).sqrt() + config_.epsilon);
}

}  // namespace lcgln
