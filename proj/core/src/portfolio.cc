#include "lcgln/portfolio.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "lcgln/errors.h"

namespace lcgln {

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string Trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void PortfolioConfig::Validate() const {
  if (assets < 2) throw ConfigError("portfolio needs at least two assets");
  if (!(risk_aversion > 0.0)) throw ConfigError("portfolio risk_aversion must be > 0");
  if (lookback < 1) throw ConfigError("portfolio lookback must be >= 1");
  if (source == ReturnsSource::kSynthetic && periods < lookback + 10) {
    throw ConfigError("portfolio periods too short for the lookback window");
  }
  if (source == ReturnsSource::kFile && returns_path.empty()) {
    throw ConfigError("portfolio file mode needs returns_path");
  }
  if (factor.factors < 0 || factor.burn_in < 0) {
    throw ConfigError("portfolio factor model counts must be >= 0");
  }
  if (!(train_fraction > 0.0) || !(validation_fraction > 0.0) ||
      train_fraction + validation_fraction >= 1.0) {
    throw ConfigError("portfolio split fractions must be positive and sum < 1");
  }
  if (!(ridge_factor > 0.0)) throw ConfigError("portfolio ridge_factor must be > 0");
}

ReturnsTable ReadReturnsCsv(std::istream& in) {
  ReturnsTable table;
  std::string line;
  if (!std::getline(in, line)) throw IngestionError("returns file is empty");
  for (auto& id : SplitCsvLine(line)) table.asset_ids.push_back(Trim(id));
  const auto cols = table.asset_ids.size();
  if (cols == 0) throw IngestionError("returns header row has no assets");
  std::vector<std::vector<double>> rows;
  int row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (Trim(line).empty()) continue;
    const auto cells = SplitCsvLine(line);
    if (cells.size() != cols) {
      throw IngestionError("returns row " + std::to_string(row_number) +
                           " has " + std::to_string(cells.size()) +
                           " columns, expected " + std::to_string(cols));
    }
    std::vector<double> values(cols);
    for (size_t c = 0; c < cols; ++c) {
      const std::string cell = Trim(cells[c]);
      const char* end = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(cell.data(), end, values[c]);
      if (cell.empty() || ec != std::errc() || ptr != end ||
          !std::isfinite(values[c])) {
        throw IngestionError("returns row " + std::to_string(row_number) +
                             ", column " + std::to_string(c + 1) +
                             ": cannot parse '" + cell + "'");
      }
    }
    rows.push_back(std::move(values));
  }
  table.returns.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < cols; ++c) table.returns(r, c) = rows[r][c];
  }
  return table;
}

ReturnsTable LoadReturnsCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open returns file '" + path + "'");
  return ReadReturnsCsv(in);
}

Eigen::MatrixXd SimulateFactorReturns(const FactorModelParams& p, int assets,
                                      int periods, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd loadings(assets, p.factors);
  for (Eigen::Index i = 0; i < loadings.size(); ++i) {
    loadings.data()[i] = p.loading_scale * normal(rng);
  }
  Eigen::VectorXd factor = Eigen::VectorXd::Zero(p.factors);
  Eigen::VectorXd idio = Eigen::VectorXd::Zero(assets);
  Eigen::MatrixXd returns(periods, assets);
  for (int t = -p.burn_in; t < periods; ++t) {
    for (auto& f : factor) f = p.factor_persistence * f + p.factor_vol * normal(rng);
    for (auto& e : idio) e = p.idio_persistence * e + p.idio_vol * normal(rng);
    if (t < 0) continue;
    returns.row(t) =
        (p.return_scale *
         ((loadings * factor + idio).array() + p.mean_return)).matrix().transpose();
  }
  return returns;
}

Eigen::MatrixXd CovarianceEstimate(const Eigen::MatrixXd& returns, double ridge) {
  if (returns.rows() < 2) {
    throw ContractError("covariance needs at least two periods");
  }
  const Eigen::RowVectorXd mean = returns.colwise().mean();
  const Eigen::MatrixXd centered = returns.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered /
                        static_cast<double>(returns.rows() - 1);
  cov = 0.5 * (cov + cov.transpose());
  cov.diagonal().array() += ridge;
  return cov;
}

SplitDataset WindowReturns(const Eigen::MatrixXd& returns, int lookback,
                           double train_fraction, double validation_fraction) {
  const Eigen::Index periods = returns.rows();
  const Eigen::Index assets = returns.cols();
  if (periods <= lookback + 2) {
    throw ContractError("returns series too short for the lookback window");
  }
  std::vector<Instance> all;
  for (Eigen::Index t = lookback; t < periods; ++t) {
    Instance inst;
    inst.features.resize(lookback * assets);
    for (int l = 0; l < lookback; ++l) {
      inst.features.segment(l * assets, assets) =
          returns.row(t - lookback + l).transpose();
    }
    inst.target = returns.row(t).transpose();
    all.push_back(std::move(inst));
  }
  const auto n = static_cast<Eigen::Index>(all.size());
  const auto n_train = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::floor(train_fraction * n)));
  const auto n_val = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::floor(validation_fraction * n)));
  if (n_train + n_val >= n) {
    throw ContractError("returns series too short for a three-way split");
  }
  SplitDataset data;
  data.train.assign(all.begin(), all.begin() + n_train);
  data.validation.assign(all.begin() + n_train, all.begin() + n_train + n_val);
  data.test.assign(all.begin() + n_train + n_val, all.end());
  return data;
}

PortfolioProblem::PortfolioProblem(Eigen::MatrixXd covariance,
                                   double risk_aversion, int feature_dim)
    : covariance_(std::move(covariance)),
      risk_aversion_(risk_aversion),
      feature_dim_(feature_dim) {
  if (covariance_.rows() != covariance_.cols() || covariance_.rows() < 1) {
    throw ShapeError("portfolio covariance must be square");
  }
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw ContractError("portfolio covariance is not symmetric");
  }
  if (!(risk_aversion_ > 0.0)) {
    throw ContractError("portfolio risk aversion must be > 0");
  }
  cholesky_.compute(covariance_);
  if (cholesky_.info() != Eigen::Success) {
    throw SolverError("portfolio covariance is not positive definite; add a ridge");
  }
  const Eigen::Index n = covariance_.rows();
  inv_ones_ = cholesky_.solve(Eigen::VectorXd::Ones(n));
  ones_inv_ones_ = inv_ones_.sum();
  if (!(ones_inv_ones_ > 0.0) || !inv_ones_.allFinite()) {
    throw SolverError("portfolio covariance is numerically singular");
  }
  const Eigen::MatrixXd inverse = cholesky_.solve(Eigen::MatrixXd::Identity(n, n));
  jacobian_ = (inverse - inv_ones_ * inv_ones_.transpose() / ones_inv_ones_) /
              (2.0 * risk_aversion_);
  jacobian_ = 0.5 * (jacobian_ + jacobian_.transpose());
  offset_ = inv_ones_ / ones_inv_ones_;
}

Decision PortfolioProblem::Solve(const Eigen::VectorXd& prediction) const {
  CheckTargetDim(prediction, "prediction");
  const Eigen::VectorXd inv_pred = cholesky_.solve(prediction);
  const double two_gamma = 2.0 * risk_aversion_;
  const double lambda = (inv_pred.sum() - two_gamma) / ones_inv_ones_;
  Decision a = (inv_pred - lambda * inv_ones_) / two_gamma;
  if (!a.allFinite()) throw SolverError("portfolio solve produced non-finite weights");
  return a;
}

double PortfolioProblem::Objective(const Decision& decision,
                                   const Eigen::VectorXd& target) const {
  CheckTargetDim(target, "target");
  CheckTargetDim(decision, "decision");
  return target.dot(decision) -
         risk_aversion_ * decision.dot(covariance_ * decision);
}

Decision PortfolioProblem::WorstDecision(const Eigen::VectorXd& target) const {
  CheckTargetDim(target, "target");
  Eigen::Index worst = 0;
  target.minCoeff(&worst);
  return Eigen::VectorXd::Unit(target.size(), worst);
}

Eigen::VectorXd PortfolioProblem::RegretGradient(
    const Eigen::VectorXd& prediction, const Eigen::VectorXd& target) const {
  const Decision a = Solve(prediction);
  const Eigen::VectorXd objective_grad =
      target - 2.0 * risk_aversion_ * (covariance_ * a);
  return -(jacobian_ * objective_grad);
}

Benchmark MakePortfolioBenchmark(const PortfolioConfig& config,
                                 std::mt19937_64& rng) {
  config.Validate();
  Eigen::MatrixXd returns;
  if (config.source == ReturnsSource::kFile) {
    ReturnsTable table = LoadReturnsCsv(config.returns_path);
    if (static_cast<int>(table.asset_ids.size()) != config.assets) {
      throw ConfigError("returns file has " +
                        std::to_string(table.asset_ids.size()) +
                        " assets but the config expects " +
                        std::to_string(config.assets));
    }
    returns = std::move(table.returns);
  } else {
    returns = SimulateFactorReturns(config.factor, config.assets, config.periods, rng);
  }
  Benchmark b;
  b.data = WindowReturns(returns, config.lookback, config.train_fraction,
                         config.validation_fraction);
  const Eigen::MatrixXd train_targets =
      TargetMatrix(b.data.train).transpose();  // periods x assets
  const Eigen::MatrixXd sample = CovarianceEstimate(train_targets, 0.0);
  double ridge = config.ridge_factor * sample.trace() / config.assets;
  if (!(ridge > 0.0)) ridge = config.ridge_factor;
  b.problem = std::make_shared<PortfolioProblem>(
      CovarianceEstimate(train_targets, ridge), config.risk_aversion,
      config.lookback * config.assets);
  return b;
}

}  // namespace lcgln
