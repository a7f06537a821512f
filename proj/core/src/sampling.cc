#include "lcgln/sampling.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

#include "lcgln/errors.h"
#include "lcgln/log.h"

namespace lcgln {

namespace {

void CheckSampleCount(int samples) {
  if (samples < 1) throw ContractError("sample count K must be >= 1");
}

void AppendAnchors(std::span<const Instance> instances,
                   std::vector<SampleTriple>& out) {
  for (const auto& inst : instances) out.push_back({inst.target, inst.target, 0.0});
}

// Appends (prediction, target, regret) or logs and skips on solver failure.
void AppendScored(const DecisionProblem& problem, Eigen::VectorXd prediction,
                  const Instance& inst, double optimal_loss,
                  std::vector<SampleTriple>& out) {
  try {
    const double regret =
        problem.RegretGivenOptimal(prediction, inst.target, optimal_loss);
    out.push_back({std::move(prediction), inst.target, regret});
  } catch (const SolverError& e) {
    LogWarning(std::string("skipping sample: ") + e.what());
  } catch (const ContractError& e) {
    LogWarning(std::string("skipping sample: ") + e.what());
  }
}

}  // namespace

bool IsAnchor(const SampleTriple& triple) {
  return triple.regret == 0.0 && triple.prediction == triple.target;
}

std::vector<SampleTriple> MbsGenerate(const DecisionProblem& problem,
                                      std::span<const Instance> instances,
                                      const SamplerConfig& config, int samples,
                                      std::mt19937_64& rng) {
  CheckSampleCount(samples);
  std::vector<SampleTriple> out;
  out.reserve(instances.size() * samples);
  AppendAnchors(instances, out);
  if (samples == 1 || instances.empty()) return out;

  std::vector<double> optimal(instances.size());
  for (size_t i = 0; i < instances.size(); ++i) {
    optimal[i] = problem.OptimalLoss(instances[i].target);
  }
  const int tiles = problem.prediction_tiles();
  DenseNet sampler = DenseNet::Mlp(problem.feature_dim() / tiles, config.hidden,
                                   problem.target_dim() / tiles,
                                   config.hidden_activation,
                                   problem.output_activation(), tiles);
  sampler.InitializeUniform(rng);
  TrainConfig train;
  train.learning_rate = config.learning_rate;
  train.optimizer = config.optimizer;
  train.batch = BatchMode::kPerInstance;
  Optimizer optimizer(train, sampler.num_parameters());

  for (int k = 1; k < samples; ++k) {
    for (size_t i = 0; i < instances.size(); ++i) {
      const Instance& inst = instances[i];
      Eigen::VectorXd prediction = sampler.Forward(inst.features);
      const NetGradient grad = MseGradient(sampler, inst.features, inst.target);
      optimizer.Step(sampler.parameters(), grad.params);
      AppendScored(problem, std::move(prediction), inst, optimal[i], out);
    }
  }
  return out;
}

std::vector<SampleTriple> GaussianGenerate(const DecisionProblem& problem,
                                           std::span<const Instance> instances,
                                           double sigma, int samples,
                                           std::mt19937_64& rng) {
  CheckSampleCount(samples);
  if (!(sigma >= 0.0)) throw ContractError("gaussian sigma must be >= 0");
  std::vector<SampleTriple> out;
  out.reserve(instances.size() * samples);
  AppendAnchors(instances, out);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    if (samples == 1) break;
    const double optimal = problem.OptimalLoss(inst.target);
    for (int k = 1; k < samples; ++k) {
      Eigen::VectorXd prediction = inst.target;
      for (auto& v : prediction) v += sigma * normal(rng);
      if (problem.simplex_targets()) {
        prediction = prediction.cwiseMax(0.0);
        const double total = prediction.sum();
        prediction = total > 0.0 ? Eigen::VectorXd(prediction / total) : inst.target;
      }
      AppendScored(problem, std::move(prediction), inst, optimal, out);
    }
  }
  return out;
}

void WriteTriplesCsv(std::ostream& out, std::span<const SampleTriple> triples) {
  if (triples.empty()) return;
  const Eigen::Index n = triples.front().prediction.size();
  for (Eigen::Index i = 0; i < n; ++i) out << "pred_" << i << ',';
  for (Eigen::Index i = 0; i < n; ++i) out << "target_" << i << ',';
  out << "regret\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (const auto& t : triples) {
    if (t.prediction.size() != n || t.target.size() != n) {
      throw ShapeError("sample triples have inconsistent dimensions");
    }
    for (double v : t.prediction) {
      put(v);
      out << ',';
    }
    for (double v : t.target) {
      put(v);
      out << ',';
    }
    put(t.regret);
    out << '\n';
  }
}

std::vector<SampleTriple> ReadTriplesCsv(std::istream& in) {
  std::vector<SampleTriple> triples;
  std::string line;
  if (!std::getline(in, line)) return triples;
  const auto columns = static_cast<Eigen::Index>(
      std::count(line.begin(), line.end(), ',') + 1);
  if (columns < 3 || columns % 2 == 0) {
    throw IngestionError("sample cache header has " + std::to_string(columns) +
                         " columns");
  }
  const Eigen::Index n = (columns - 1) / 2;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> values;
    values.reserve(columns);
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const char* end = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(cell.data(), end, v);
      if (ec != std::errc() || ptr != end) {
        throw IngestionError("sample cache row " + std::to_string(row) +
                             ", column " + std::to_string(values.size() + 1) +
                             ": cannot parse '" + cell + "'");
      }
      values.push_back(v);
    }
    if (static_cast<Eigen::Index>(values.size()) != columns) {
      throw IngestionError("sample cache row " + std::to_string(row) +
                           " has " + std::to_string(values.size()) +
                           " columns, expected " + std::to_string(columns));
    }
    SampleTriple t;
    t.prediction = Eigen::Map<Eigen::VectorXd>(values.data(), n);
    t.target = Eigen::Map<Eigen::VectorXd>(values.data() + n, n);
    t.regret = values.back();
    triples.push_back(std::move(t));
  }
  return triples;
}

}  // namespace lcgln
