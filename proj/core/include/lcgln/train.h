#ifndef LCGLN_TRAIN_H_
#define LCGLN_TRAIN_H_

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "lcgln/net.h"
#include "lcgln/optimizer.h"
#include "lcgln/picnn.h"
#include "lcgln/problem.h"
#include "lcgln/sampling.h"

namespace lcgln {

enum class Method { kPfl, kDflPortfolio, kLcgln, kLcglnGaussian };

std::string_view MethodName(Method method);
std::optional<Method> ParseMethod(std::string_view name);
std::span<const Method> AllMethods();

// Throws ContractError when `method` cannot run on `problem`.
void CheckMethodApplies(Method method, const DecisionProblem& problem);

struct PredictorConfig {
  std::vector<int> hidden = {10};
  Activation hidden_activation = Activation::kRelu;
  TrainConfig train;  // adam, lr 1e-3, 300 epochs, full batch
  int patience = 30;  // epochs without validation improvement; 0 disables
  bool keep_checkpoints = false;
};

struct SurrogateConfig {
  std::vector<int> hidden = {2};
  int context_width = 2;
  TrainConfig train = {.learning_rate = 1e-3,
                       .epochs = 20,
                       .batch = BatchMode::kPerInstance};
  // Fit L to R / s with s = mean nonzero regret in the sample set. A positive
  // rescaling leaves the direction of dL/dy_hat unchanged.
  bool normalize_regret = true;
};

struct LcglnConfig {
  PredictorConfig predictor;
  SurrogateConfig surrogate;
  SamplerConfig sampler;
  double gaussian_sigma = 0.1;
};

struct FitReport {
  double final_error = 0.0;    // mean squared error over S after fitting
  std::vector<double> trace;   // mean squared error after each epoch
  double anchor_residual = 0.0;  // mean |L(y, y)| over anchors, regret units
  double regret_scale = 1.0;
  double initial_error = 0.0;
};

// Least-squares fit of model(prediction, target) to regret / regret_scale.
// Projects the constrained weights after every optimizer step. On a
// non-finite loss the last good parameters are restored and NumericalError
// is thrown.
FitReport FitSurrogate(Picnn& model, std::span<const SampleTriple> samples,
                       const TrainConfig& config, double regret_scale = 1.0,
                       std::mt19937_64* shuffle_rng = nullptr);

// Mean nonzero regret of a sample set (1 when every regret is zero).
double RegretScale(std::span<const SampleTriple> samples);

struct Evaluation {
  double normalized_regret = 0.0;
  double raw_regret = 0.0;        // mean per-instance regret
  double prediction_loss = 0.0;   // mean NLL or MSE
};

// Scores predictors on a fixed instance list. Optimal and worst-case losses
// are solved once up front.
class RegretEvaluator {
 public:
  RegretEvaluator(const DecisionProblem& problem,
                  std::span<const Instance> instances);

  Evaluation Evaluate(const DenseNet& model) const;
  Evaluation EvaluatePredictions(const Eigen::MatrixXd& predictions) const;
  Evaluation EvaluateDecisions(std::span<const Decision> decisions) const;
  double PredictionLoss(const DenseNet& model) const;

  std::span<const double> optimal_losses() const { return optimal_; }
  std::span<const double> worst_regrets() const { return worst_regret_; }

 private:
  const DecisionProblem* problem_;
  std::span<const Instance> instances_;
  Eigen::MatrixXd features_;
  std::vector<double> optimal_;
  std::vector<double> worst_regret_;
};

Evaluation Evaluate(const DenseNet& model, const DecisionProblem& problem,
                    std::span<const Instance> instances);

struct TrainingTrace {
  std::vector<double> validation_scores;   // index 0 = untrained model
  int best_epoch = 0;
  std::vector<Eigen::VectorXd> checkpoints;  // only with keep_checkpoints
};

struct TrainedPredictor {
  DenseNet model;
  TrainingTrace trace;
};

DenseNet MakePredictor(const DecisionProblem& problem,
                       const PredictorConfig& config, std::mt19937_64& rng);

// Prediction-focused baseline: NLL or MSE against the targets; keeps the
// parameters with the best validation prediction loss.
TrainedPredictor TrainPfl(const Benchmark& benchmark,
                          const PredictorConfig& config, std::mt19937_64& rng);

// Exact decision-focused baseline for the portfolio problem: the regret
// gradient flows through the affine closed-form solution. Selects on
// validation regret.
TrainedPredictor TrainDflPortfolio(const Benchmark& benchmark,
                                   const PredictorConfig& config,
                                   std::mt19937_64& rng);

// Mean surrogate value of model predictions and its gradient w.r.t. the
// predictor's parameters.
NetGradient SurrogateLossGradient(const DenseNet& model, const Picnn& surrogate,
                                  const Eigen::MatrixXd& features,
                                  const Eigen::MatrixXd& targets);

// Trains a fresh predictor on the fitted surrogate, selecting on true
// validation regret.
TrainedPredictor TrainOnSurrogate(const Benchmark& benchmark,
                                  const Picnn& surrogate,
                                  const PredictorConfig& config,
                                  std::mt19937_64& rng);

enum class SamplerKind { kModelBased, kGaussian };

struct LcglnResult {
  std::vector<SampleTriple> samples;
  Picnn surrogate;
  FitReport fit;
  TrainedPredictor predictor;
  double sample_seconds = 0.0;
  double fit_seconds = 0.0;
  double train_seconds = 0.0;
};

// Generate samples, fit the surrogate, train the predictor through it.
LcglnResult TrainLcgln(const Benchmark& benchmark, int samples,
                       const LcglnConfig& config, std::mt19937_64& rng,
                       SamplerKind sampler = SamplerKind::kModelBased);

}  // namespace lcgln

#endif  // LCGLN_TRAIN_H_
