#include "lcgln/train.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "lcgln/errors.h"
#include "lcgln/portfolio.h"

namespace lcgln {

namespace {

constexpr std::array kMethods = {Method::kPfl, Method::kDflPortfolio,
                                 Method::kLcgln, Method::kLcglnGaussian};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<int> ClassIndices(const Eigen::MatrixXd& targets) {
  std::vector<int> classes(targets.cols());
  for (Eigen::Index c = 0; c < targets.cols(); ++c) {
    Eigen::Index k = 0;
    targets.col(c).maxCoeff(&k);
    classes[c] = static_cast<int>(k);
  }
  return classes;
}

// Gradient callback: (model, features, targets) -> NetGradient of the mean
// loss over the given columns.
using GradientFn = std::function<NetGradient(
    const DenseNet&, const Eigen::MatrixXd&, const Eigen::MatrixXd&)>;
// Validation score; lower is better.
using ScoreFn = std::function<double(const DenseNet&)>;

TrainedPredictor TrainWithSelection(DenseNet model, const PredictorConfig& config,
                                    std::span<const Instance> train,
                                    const GradientFn& gradient,
                                    const ScoreFn& score, std::mt19937_64& rng) {
  config.train.Validate();
  if (train.empty()) throw ContractError("training split is empty");
  const Eigen::MatrixXd features = FeatureMatrix(train);
  const Eigen::MatrixXd targets = TargetMatrix(train);
  Optimizer optimizer(config.train, model.num_parameters());

  TrainedPredictor result;
  auto record = [&](double s) {
    if (!std::isfinite(s)) throw NumericalError("non-finite validation score");
    result.trace.validation_scores.push_back(s);
    if (config.keep_checkpoints) result.trace.checkpoints.push_back(model.parameters());
  };
  record(score(model));
  double best_score = result.trace.validation_scores.front();
  Eigen::VectorXd best_params = model.parameters();

  std::vector<Eigen::Index> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= config.train.epochs; ++epoch) {
    if (config.train.batch == BatchMode::kFull) {
      optimizer.Step(model.parameters(),
                     gradient(model, features, targets).params);
    } else {
      std::shuffle(order.begin(), order.end(), rng);
      for (Eigen::Index i : order) {
        optimizer.Step(model.parameters(),
                       gradient(model, features.col(i), targets.col(i)).params);
      }
    }
    const double s = score(model);
    record(s);
    if (s < best_score) {
      best_score = s;
      best_params = model.parameters();
      result.trace.best_epoch = epoch;
    }
    if (config.patience > 0 && epoch - result.trace.best_epoch >= config.patience) {
      break;
    }
  }
  model.parameters() = best_params;
  result.model = std::move(model);
  return result;
}

}  // namespace

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kPfl:
      return "pfl";
    case Method::kDflPortfolio:
      return "dfl_portfolio";
    case Method::kLcgln:
      return "lcgln";
    case Method::kLcglnGaussian:
      return "lcgln_gaussian";
  }
  return "unknown";
}

std::optional<Method> ParseMethod(std::string_view name) {
  for (Method m : kMethods) {
    if (MethodName(m) == name) return m;
  }
  return std::nullopt;
}

std::span<const Method> AllMethods() { return kMethods; }

void CheckMethodApplies(Method method, const DecisionProblem& problem) {
  if (method == Method::kDflPortfolio &&
      dynamic_cast<const PortfolioProblem*>(&problem) == nullptr) {
    throw ContractError("dfl_portfolio only applies to the portfolio problem, not " +
                        std::string(problem.name()));
  }
}

double RegretScale(std::span<const SampleTriple> samples) {
  double total = 0.0;
  int count = 0;
  for (const auto& s : samples) {
    if (s.regret > 0.0) {
      total += s.regret;
      ++count;
    }
  }
  return count == 0 ? 1.0 : total / count;
}

FitReport FitSurrogate(Picnn& model, std::span<const SampleTriple> samples,
                       const TrainConfig& config, double regret_scale,
                       std::mt19937_64* shuffle_rng) {
  config.Validate();
  if (samples.empty()) throw ContractError("surrogate fit needs at least one sample");
  if (!(regret_scale > 0.0)) throw ContractError("regret scale must be > 0");
  const auto n = static_cast<Eigen::Index>(samples.size());
  const int dim = model.shape().target_dim;
  Eigen::MatrixXd preds(dim, n);
  Eigen::MatrixXd targets(dim, n);
  Eigen::RowVectorXd regrets(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (samples[j].prediction.size() != dim || samples[j].target.size() != dim) {
      throw ShapeError("sample dimension does not match the surrogate");
    }
    preds.col(j) = samples[j].prediction;
    targets.col(j) = samples[j].target;
    regrets[j] = samples[j].regret / regret_scale;
  }
  auto error = [&] {
    return (model.ForwardBatch(preds, targets) - regrets).squaredNorm() /
           static_cast<double>(n);
  };

  model.EnforceNonnegativity();
  Optimizer optimizer(config, model.num_parameters());
  FitReport report;
  report.regret_scale = regret_scale;
  report.initial_error = error();
  Eigen::VectorXd last_good = model.parameters();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);

  auto step = [&](const PicnnGradient& g) {
    optimizer.Step(model.parameters(), g.params);
    model.EnforceNonnegativity();
  };
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    try {
      if (config.batch == BatchMode::kFull) {
        const Eigen::RowVectorXd residual =
            model.ForwardBatch(preds, targets) - regrets;
        step(model.Backward(preds, targets,
                            (2.0 / static_cast<double>(n)) * residual));
      } else {
        if (shuffle_rng != nullptr) {
          std::shuffle(order.begin(), order.end(), *shuffle_rng);
        }
        Eigen::MatrixXd p(dim, 1), t(dim, 1);
        for (Eigen::Index j : order) {
          p = preds.col(j);
          t = targets.col(j);
          const double residual = model.ForwardBatch(p, t)(0) - regrets[j];
          step(model.Backward(p, t, Eigen::RowVectorXd::Constant(1, 2.0 * residual)));
        }
      }
      const double e = error();
      if (!std::isfinite(e)) throw NumericalError("surrogate loss became non-finite");
      report.trace.push_back(e);
      last_good = model.parameters();
    } catch (const NumericalError&) {
      model.parameters() = last_good;
      throw;
    }
  }
  report.final_error = report.trace.empty() ? report.initial_error : report.trace.back();

  double residual = 0.0;
  int anchors = 0;
  for (const auto& s : samples) {
    if (!IsAnchor(s)) continue;
    residual += std::abs(model.Forward(s.prediction, s.target));
    ++anchors;
  }
  report.anchor_residual = anchors == 0 ? 0.0 : regret_scale * residual / anchors;
  return report;
}

RegretEvaluator::RegretEvaluator(const DecisionProblem& problem,
                                 std::span<const Instance> instances)
    : problem_(&problem), instances_(instances) {
  features_ = FeatureMatrix(instances);
  optimal_.reserve(instances.size());
  worst_regret_.reserve(instances.size());
  for (const auto& inst : instances) {
    const double opt = problem.OptimalLoss(inst.target);
    optimal_.push_back(opt);
    worst_regret_.push_back(
        std::max(problem.WorstCaseLoss(inst.target) - opt, 0.0));
  }
}

Evaluation RegretEvaluator::Evaluate(const DenseNet& model) const {
  if (instances_.empty()) return {};
  return EvaluatePredictions(model.ForwardBatch(features_));
}

Evaluation RegretEvaluator::EvaluatePredictions(
    const Eigen::MatrixXd& predictions) const {
  if (predictions.cols() != static_cast<Eigen::Index>(instances_.size())) {
    throw ShapeError("one prediction column per instance is required");
  }
  std::vector<Decision> decisions;
  decisions.reserve(instances_.size());
  double loss = 0.0;
  for (size_t i = 0; i < instances_.size(); ++i) {
    const Eigen::VectorXd p = predictions.col(i);
    decisions.push_back(problem_->Solve(p));
    loss += problem_->PredictionError(p, instances_[i].target);
  }
  Evaluation e = EvaluateDecisions(decisions);
  e.prediction_loss = loss / static_cast<double>(instances_.size());
  return e;
}

Evaluation RegretEvaluator::EvaluateDecisions(
    std::span<const Decision> decisions) const {
  if (decisions.size() != instances_.size()) {
    throw ShapeError("one decision per instance is required");
  }
  std::vector<double> regrets(instances_.size());
  for (size_t i = 0; i < instances_.size(); ++i) {
    regrets[i] =
        problem_->DecisionRegret(decisions[i], instances_[i].target, optimal_[i]);
  }
  Evaluation e;
  e.normalized_regret = NormalizedRegret(regrets, worst_regret_);
  e.raw_regret = regrets.empty()
                     ? 0.0
                     : std::accumulate(regrets.begin(), regrets.end(), 0.0) /
                           static_cast<double>(regrets.size());
  return e;
}

double RegretEvaluator::PredictionLoss(const DenseNet& model) const {
  if (instances_.empty()) return 0.0;
  const Eigen::MatrixXd predictions = model.ForwardBatch(features_);
  double loss = 0.0;
  for (size_t i = 0; i < instances_.size(); ++i) {
    loss += problem_->PredictionError(predictions.col(i), instances_[i].target);
  }
  return loss / static_cast<double>(instances_.size());
}

Evaluation Evaluate(const DenseNet& model, const DecisionProblem& problem,
                    std::span<const Instance> instances) {
  return RegretEvaluator(problem, instances).Evaluate(model);
}

DenseNet MakePredictor(const DecisionProblem& problem,
                       const PredictorConfig& config, std::mt19937_64& rng) {
  const int tiles = problem.prediction_tiles();
  DenseNet net = DenseNet::Mlp(problem.feature_dim() / tiles, config.hidden,
                               problem.target_dim() / tiles, config.hidden_activation,
                               problem.output_activation(), tiles);
  net.InitializeUniform(rng);
  return net;
}

TrainedPredictor TrainPfl(const Benchmark& benchmark,
                          const PredictorConfig& config, std::mt19937_64& rng) {
  const DecisionProblem& problem = *benchmark.problem;
  DenseNet model = MakePredictor(problem, config, rng);
  const RegretEvaluator validation(problem, benchmark.data.validation);
  GradientFn gradient;
  if (problem.prediction_loss() == PredictionLoss::kNll) {
    gradient = [](const DenseNet& m, const Eigen::MatrixXd& x,
                  const Eigen::MatrixXd& y) {
      return NllGradient(m, x, ClassIndices(y));
    };
  } else {
    gradient = [](const DenseNet& m, const Eigen::MatrixXd& x,
                  const Eigen::MatrixXd& y) { return MseGradient(m, x, y); };
  }
  return TrainWithSelection(
      std::move(model), config, benchmark.data.train, gradient,
      [&](const DenseNet& m) { return validation.PredictionLoss(m); }, rng);
}

TrainedPredictor TrainDflPortfolio(const Benchmark& benchmark,
                                   const PredictorConfig& config,
                                   std::mt19937_64& rng) {
  const auto* portfolio =
      dynamic_cast<const PortfolioProblem*>(benchmark.problem.get());
  if (portfolio == nullptr) {
    throw ContractError("dfl_portfolio only applies to the portfolio problem");
  }
  DenseNet model = MakePredictor(*portfolio, config, rng);
  const RegretEvaluator validation(*portfolio, benchmark.data.validation);
  auto gradient = [portfolio](const DenseNet& m, const Eigen::MatrixXd& x,
                              const Eigen::MatrixXd& y) {
    const Eigen::MatrixXd pred = m.ForwardBatch(x);
    Eigen::MatrixXd upstream(pred.rows(), pred.cols());
    const double inv_batch = 1.0 / static_cast<double>(pred.cols());
    for (Eigen::Index c = 0; c < pred.cols(); ++c) {
      upstream.col(c) = inv_batch * portfolio->RegretGradient(pred.col(c), y.col(c));
    }
    return UpstreamGradient(m, x, upstream);
  };
  return TrainWithSelection(
      std::move(model), config, benchmark.data.train, gradient,
      [&](const DenseNet& m) { return validation.Evaluate(m).normalized_regret; },
      rng);
}

NetGradient SurrogateLossGradient(const DenseNet& model, const Picnn& surrogate,
                                  const Eigen::MatrixXd& features,
                                  const Eigen::MatrixXd& targets) {
  const Eigen::MatrixXd pred = model.ForwardBatch(features);
  const double inv_batch = 1.0 / static_cast<double>(pred.cols());
  const Eigen::RowVectorXd weights = Eigen::RowVectorXd::Constant(pred.cols(), inv_batch);
  const PicnnGradient g = surrogate.Backward(pred, targets, weights);
  NetGradient grad = UpstreamGradient(model, features, g.pred);
  grad.loss = surrogate.ForwardBatch(pred, targets).sum() * inv_batch;
  return grad;
}

TrainedPredictor TrainOnSurrogate(const Benchmark& benchmark,
                                  const Picnn& surrogate,
                                  const PredictorConfig& config,
                                  std::mt19937_64& rng) {
  const DecisionProblem& problem = *benchmark.problem;
  if (surrogate.shape().target_dim != problem.target_dim()) {
    throw ShapeError("surrogate dimension does not match the problem");
  }
  DenseNet model = MakePredictor(problem, config, rng);
  const RegretEvaluator validation(problem, benchmark.data.validation);
  auto gradient = [&surrogate](const DenseNet& m, const Eigen::MatrixXd& x,
                               const Eigen::MatrixXd& y) {
    return SurrogateLossGradient(m, surrogate, x, y);
  };
  return TrainWithSelection(
      std::move(model), config, benchmark.data.train, gradient,
      [&](const DenseNet& m) { return validation.Evaluate(m).normalized_regret; },
      rng);
}

LcglnResult TrainLcgln(const Benchmark& benchmark, int samples,
                       const LcglnConfig& config, std::mt19937_64& rng,
                       SamplerKind sampler) {
  const DecisionProblem& problem = *benchmark.problem;
  LcglnResult result;

  auto start = std::chrono::steady_clock::now();
  result.samples =
      sampler == SamplerKind::kModelBased
          ? MbsGenerate(problem, benchmark.data.train, config.sampler, samples, rng)
          : GaussianGenerate(problem, benchmark.data.train, config.gaussian_sigma,
                             samples, rng);
  result.sample_seconds = Seconds(start);

  start = std::chrono::steady_clock::now();
  result.surrogate = Picnn({.target_dim = problem.target_dim(),
                            .hidden = config.surrogate.hidden,
                            .context_width = config.surrogate.context_width});
  result.surrogate.Initialize(rng);
  const double scale =
      config.surrogate.normalize_regret ? RegretScale(result.samples) : 1.0;
  result.fit = FitSurrogate(result.surrogate, result.samples,
                            config.surrogate.train, scale, &rng);
  result.fit_seconds = Seconds(start);

  start = std::chrono::steady_clock::now();
  result.predictor = TrainOnSurrogate(benchmark, result.surrogate, config.predictor, rng);
  result.train_seconds = Seconds(start);
  return result;
}

}  // namespace lcgln
