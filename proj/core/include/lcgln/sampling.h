#ifndef LCGLN_SAMPLING_H_
#define LCGLN_SAMPLING_H_

#include <Eigen/Dense>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "lcgln/net.h"
#include "lcgln/optimizer.h"
#include "lcgln/problem.h"

namespace lcgln {

// One surrogate training example: a prediction, the target it is scored
// against, and the exact regret of acting on the prediction.
struct SampleTriple {
  Eigen::VectorXd prediction;
  Eigen::VectorXd target;
  double regret = 0.0;
};

// Anchors pin the zero-regret point: prediction == target, regret == 0.
bool IsAnchor(const SampleTriple& triple);

struct SamplerConfig {
  std::vector<int> hidden = {10};  // mirrors the predictive model
  Activation hidden_activation = Activation::kRelu;
  double learning_rate = 0.1;
  OptimizerKind optimizer = OptimizerKind::kSgd;
};

// Model-based sampling. Emits one anchor (y_i, y_i, 0) per instance, then
// runs `samples - 1` epochs of per-instance MSE training of a sampling model
// that mirrors the predictor; each instance's current output is recorded
// (before that instance's update) with its exact regret. Yields N * samples
// triples unless a solve fails, in which case the triple is skipped and a
// warning is logged.
std::vector<SampleTriple> MbsGenerate(const DecisionProblem& problem,
                                      std::span<const Instance> instances,
                                      const SamplerConfig& config, int samples,
                                      std::mt19937_64& rng);

// Anchors plus `samples - 1` perturbations y + sigma * N(0, I) per instance.
// Simplex-valued targets are clamped at zero and renormalized.
std::vector<SampleTriple> GaussianGenerate(const DecisionProblem& problem,
                                           std::span<const Instance> instances,
                                           double sigma, int samples,
                                           std::mt19937_64& rng);

// Cache format: header "pred_0..pred_{n-1},target_0..target_{n-1},regret",
// one triple per row, 17 significant digits.
void WriteTriplesCsv(std::ostream& out, std::span<const SampleTriple> triples);
std::vector<SampleTriple> ReadTriplesCsv(std::istream& in);

}  // namespace lcgln

#endif  // LCGLN_SAMPLING_H_
