#ifndef LCGLN_OPTIMIZER_H_
#define LCGLN_OPTIMIZER_H_

#include <Eigen/Dense>
#include <cstdint>
#include <string_view>

namespace lcgln {

enum class OptimizerKind { kSgd, kAdam };
enum class BatchMode { kFull, kPerInstance };

std::string_view OptimizerName(OptimizerKind kind);

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 300;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  BatchMode batch = BatchMode::kFull;

  // Throws ConfigError on a non-positive rate or epoch count.
  void Validate() const;
};

// First-order optimizer over a flat parameter vector. Adam keeps
// bias-corrected first and second moments; SGD is stateless.
class Optimizer {
 public:
  Optimizer(const TrainConfig& config, Eigen::Index num_parameters);

  // Throws NumericalError (parameters untouched) if `grad` has NaN/Inf.
  void Step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  std::int64_t steps() const { return step_; }

 private:
  TrainConfig config_;
  Eigen::VectorXd first_moment_;
  Eigen::VectorXd second_moment_;
  std::int64_t step_ = 0;
};

}  // namespace lcgln

#endif  // LCGLN_OPTIMIZER_H_
