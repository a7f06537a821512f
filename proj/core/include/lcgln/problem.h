#ifndef LCGLN_PROBLEM_H_
#define LCGLN_PROBLEM_H_

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "lcgln/net.h"

namespace lcgln {

enum class Sense { kMinimize, kMaximize };
enum class Split { kTrain, kValidation, kTest };

std::string_view SplitName(Split split);

struct Instance {
  Eigen::VectorXd features;
  Eigen::VectorXd target;  // what regret and the surrogate are measured against
  Eigen::VectorXd latent;  // generator truth hidden from learners (may be empty)
};

struct SplitSizes {
  int train = 0;
  int validation = 0;
  int test = 0;
};

struct SplitDataset {
  std::vector<Instance> train;
  std::vector<Instance> validation;
  std::vector<Instance> test;

  const std::vector<Instance>& split(Split s) const;
};

// Stacks instance features (or targets) as columns.
Eigen::MatrixXd FeatureMatrix(std::span<const Instance> instances);
Eigen::MatrixXd TargetMatrix(std::span<const Instance> instances);

using Decision = Eigen::VectorXd;

// A predict-then-optimize task: exact solver, objective, and the worst-case
// decision used to normalize regret.
//
// Objective() is in the problem's native sense (a cost when minimizing, a
// reward when maximizing). TaskLoss() and everything derived from it are
// sense-adjusted so that lower is always better.
class DecisionProblem {
 public:
  virtual ~DecisionProblem() = default;

  virtual std::string_view name() const = 0;
  virtual Sense sense() const = 0;
  virtual int feature_dim() const = 0;
  virtual int target_dim() const = 0;

  // Targets and predictions live on the probability simplex.
  virtual bool simplex_targets() const { return false; }
  virtual PredictionLoss prediction_loss() const { return PredictionLoss::kMse; }
  virtual Activation output_activation() const { return Activation::kLinear; }
  // Number of items that share one predictive model. Features and targets
  // split into this many equal consecutive blocks, one per item.
  virtual int prediction_tiles() const { return 1; }

  virtual Decision Solve(const Eigen::VectorXd& prediction) const = 0;
  virtual double Objective(const Decision& decision,
                           const Eigen::VectorXd& target) const = 0;
  virtual Decision WorstDecision(const Eigen::VectorXd& target) const = 0;

  double TaskLoss(const Decision& decision, const Eigen::VectorXd& target) const;
  double OptimalLoss(const Eigen::VectorXd& target) const;
  double WorstCaseLoss(const Eigen::VectorXd& target) const;

  // TaskLoss(Solve(prediction)) - TaskLoss(Solve(target)), clamped at zero.
  // Throws SolverError if the raw difference is materially negative.
  double Regret(const Eigen::VectorXd& prediction,
                const Eigen::VectorXd& target) const;
  // Same as Regret() with a precomputed OptimalLoss(target).
  double RegretGivenOptimal(const Eigen::VectorXd& prediction,
                            const Eigen::VectorXd& target,
                            double optimal_loss) const;
  double DecisionRegret(const Decision& decision, const Eigen::VectorXd& target,
                        double optimal_loss) const;
  double WorstRegret(const Eigen::VectorXd& target) const;

  // Prediction loss of one sample under prediction_loss().
  double PredictionError(const Eigen::VectorXd& prediction,
                         const Eigen::VectorXd& target) const;

 protected:
  void CheckTargetDim(const Eigen::VectorXd& v, std::string_view what) const;
};

// A problem together with the data it was generated from. Some problems
// depend on their data (portfolio covariance comes from the training split).
struct Benchmark {
  std::shared_ptr<const DecisionProblem> problem;
  SplitDataset data;
};

// Ratio-of-sums normalization: sum(regret) / sum(worst regret).
double NormalizedRegret(std::span<const double> regrets,
                        std::span<const double> worst_regrets);

}  // namespace lcgln

#endif  // LCGLN_PROBLEM_H_
