#include "lcgln/budget.h"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "lcgln/errors.h"

namespace lcgln {

namespace {

// Visits every size-`budget` subset of [0, n) in lexicographic order and
// keeps the first one whose score is strictly better than all before it.
template <typename Better>
Eigen::VectorXd EnumerateSubsets(const RowMatrix& ctr, int budget,
                                 Better better) {
  const int n = static_cast<int>(ctr.rows());
  if (budget < 1 || budget > n) {
    throw ContractError("budget " + std::to_string(budget) +
                        " must lie in [1, " + std::to_string(n) + "]");
  }
  const RowMatrix clamped = ctr.cwiseMax(0.0).cwiseMin(1.0);
  const Eigen::Index users = clamped.cols();
  if (budget == 2) {
    // Pair value: s_i + s_j - <y_i, y_j>.
    const Eigen::VectorXd totals = clamped.rowwise().sum();
    const Eigen::MatrixXd overlap = clamped * clamped.transpose();
    int best_i = 0, best_j = 1;
    double best_value = totals[0] + totals[1] - overlap(0, 1);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double value = totals[i] + totals[j] - overlap(j, i);
        if (better(value, best_value)) {
          best_value = value;
          best_i = i;
          best_j = j;
        }
      }
    }
    Eigen::VectorXd selection = Eigen::VectorXd::Zero(n);
    selection[best_i] = 1.0;
    selection[best_j] = 1.0;
    return selection;
  }
  std::vector<int> idx(budget);
  for (int i = 0; i < budget; ++i) idx[i] = i;
  std::vector<int> best_idx = idx;
  bool have_best = false;
  double best_value = 0.0;
  Eigen::RowVectorXd miss(users);
  while (true) {
    miss.setOnes();
    for (int w : idx) miss.array() *= 1.0 - clamped.row(w).array();
    const double value = static_cast<double>(users) - miss.sum();
    if (!have_best || better(value, best_value)) {
      best_value = value;
      best_idx = idx;
      have_best = true;
    }
    int pos = budget - 1;
    while (pos >= 0 && idx[pos] == n - budget + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int j = pos + 1; j < budget; ++j) idx[j] = idx[j - 1] + 1;
  }
  Eigen::VectorXd selection = Eigen::VectorXd::Zero(n);
  for (int w : best_idx) selection[w] = 1.0;
  return selection;
}

}  // namespace

void BudgetConfig::Validate() const {
  if (users < 1 || websites < 1) {
    throw ConfigError("budget needs at least one user and one website");
  }
  if (fake_targets < 0) throw ConfigError("budget fake_targets must be >= 0");
  if (budget < 1 || budget > websites) {
    throw ConfigError("budget B must satisfy 1 <= B <= websites");
  }
  if (mixing.size() != 0 && (mixing.rows() != users || mixing.cols() != users)) {
    throw ConfigError("budget mixing matrix must be users x users");
  }
  if (sizes.train < 1 || sizes.validation < 1 || sizes.test < 1) {
    throw ConfigError("budget split sizes must be >= 1");
  }
}

double BudgetObjective(const Eigen::VectorXd& selection, const RowMatrix& ctr) {
  if (selection.size() != ctr.rows()) {
    throw ShapeError("budget selection has " + std::to_string(selection.size()) +
                     " entries for " + std::to_string(ctr.rows()) + " websites");
  }
  Eigen::RowVectorXd miss = Eigen::RowVectorXd::Ones(ctr.cols());
  for (Eigen::Index w = 0; w < ctr.rows(); ++w) {
    if (selection[w] == 0.0) continue;
    miss.array() *=
        1.0 - selection[w] * ctr.row(w).array().max(0.0).min(1.0);
  }
  return static_cast<double>(ctr.cols()) - miss.sum();
}

Eigen::VectorXd SolveBudget(const RowMatrix& ctr, int budget) {
  return EnumerateSubsets(ctr, budget,
                          [](double v, double best) { return v > best; });
}

Eigen::VectorXd WorstBudgetSelection(const RowMatrix& ctr, int budget) {
  return EnumerateSubsets(ctr, budget,
                          [](double v, double best) { return v < best; });
}

SplitDataset GenerateBudget(const BudgetConfig& config, std::mt19937_64& rng) {
  config.Validate();
  const int u = config.users;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd mixing = config.mixing;
  if (mixing.size() == 0) {
    mixing.resize(u, u);
    for (Eigen::Index i = 0; i < mixing.size(); ++i) mixing.data()[i] = normal(rng);
  }
  auto draw = [&](int count) {
    std::vector<Instance> out;
    out.reserve(count);
    const int total = config.total_websites();
    for (int n = 0; n < count; ++n) {
      Instance inst;
      inst.target.resize(static_cast<Eigen::Index>(total) * u);
      inst.features.resize(static_cast<Eigen::Index>(total) * u);
      Eigen::VectorXd ctr(u);
      for (int w = 0; w < config.websites; ++w) {
        for (auto& v : ctr) v = unit(rng);
        inst.target.segment(static_cast<Eigen::Index>(w) * u, u) = ctr;
        inst.features.segment(static_cast<Eigen::Index>(w) * u, u) = mixing * ctr;
      }
      // Fake websites: CTRs and features come from independent draws, so
      // the features carry no information about the CTRs.
      Eigen::VectorXd decoy(u);
      for (int w = config.websites; w < total; ++w) {
        for (auto& v : ctr) v = unit(rng);
        for (auto& v : decoy) v = unit(rng);
        inst.target.segment(static_cast<Eigen::Index>(w) * u, u) = ctr;
        inst.features.segment(static_cast<Eigen::Index>(w) * u, u) = mixing * decoy;
      }
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

BudgetProblem::BudgetProblem(BudgetConfig config) : config_(std::move(config)) {
  config_.Validate();
}

RowMatrix BudgetProblem::AsMatrix(const Eigen::VectorXd& flat) const {
  CheckTargetDim(flat, "CTR vector");
  return Eigen::Map<const RowMatrix>(flat.data(), config_.total_websites(),
                                     config_.users);
}

Decision BudgetProblem::Solve(const Eigen::VectorXd& prediction) const {
  return SolveBudget(AsMatrix(prediction), config_.budget);
}

double BudgetProblem::Objective(const Decision& decision,
                                const Eigen::VectorXd& target) const {
  return BudgetObjective(decision, AsMatrix(target));
}

Decision BudgetProblem::WorstDecision(const Eigen::VectorXd& target) const {
  return WorstBudgetSelection(AsMatrix(target), config_.budget);
}

Benchmark MakeBudgetBenchmark(BudgetConfig config, std::mt19937_64& rng) {
  Benchmark b;
  b.data = GenerateBudget(config, rng);
  b.problem = std::make_shared<BudgetProblem>(std::move(config));
  return b;
}

}  // namespace lcgln
