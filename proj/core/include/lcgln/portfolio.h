#ifndef LCGLN_PORTFOLIO_H_
#define LCGLN_PORTFOLIO_H_

#include <Eigen/Dense>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "lcgln/problem.h"

namespace lcgln {

// Low-rank factor model with AR(1) dynamics:
//   f_t = phi_f f_{t-1} + sigma_f eta_t,   e_t = phi_e e_{t-1} + sigma_e xi_t,
//   r_t = scale * (mean + L f_t + e_t).
struct FactorModelParams {
  int factors = 3;
  double loading_scale = 1.0;
  double factor_persistence = 0.8;
  double factor_vol = 1.0;
  double idio_persistence = 0.9;
  double idio_vol = 1.0;
  double mean_return = 0.0;
  double return_scale = 1.0;
  int burn_in = 50;
};

enum class ReturnsSource { kSynthetic, kFile };

struct PortfolioConfig {
  int assets = 50;
  double risk_aversion = 0.1;
  int lookback = 5;
  int periods = 2500;  // synthetic series length before windowing
  ReturnsSource source = ReturnsSource::kSynthetic;
  std::string returns_path;
  FactorModelParams factor;
  double train_fraction = 0.70;
  double validation_fraction = 0.15;
  // Covariance ridge = ridge_factor * trace(S) / N.
  double ridge_factor = 1e-4;

  void Validate() const;
};

struct ReturnsTable {
  std::vector<std::string> asset_ids;
  Eigen::MatrixXd returns;  // periods x assets
};

// Comma-separated returns: a header row of asset identifiers, then one row of
// decimal returns per period. Ragged or non-numeric rows throw IngestionError
// naming the offending (1-based) row and column.
ReturnsTable ReadReturnsCsv(std::istream& in);
ReturnsTable LoadReturnsCsv(const std::string& path);

// Simulates `periods` rows of returns for `assets` assets.
Eigen::MatrixXd SimulateFactorReturns(const FactorModelParams& params,
                                      int assets, int periods,
                                      std::mt19937_64& rng);

// Unbiased sample covariance of the rows of `returns` plus ridge * I.
Eigen::MatrixXd CovarianceEstimate(const Eigen::MatrixXd& returns, double ridge);

// Builds trailing-window instances and a chronological train/val/test split.
SplitDataset WindowReturns(const Eigen::MatrixXd& returns, int lookback,
                           double train_fraction, double validation_fraction);

// max_a  y^T a - gamma a^T Sigma a   s.t.  sum(a) = 1.
//
// The KKT system has the closed form a = Sigma^{-1}(y - lambda 1) / (2 gamma),
// which is affine in y: a = M y + m with
//   M = (Sigma^{-1} - Sigma^{-1} 1 1^T Sigma^{-1} / (1^T Sigma^{-1} 1)) / (2 gamma),
//   m = Sigma^{-1} 1 / (1^T Sigma^{-1} 1).
class PortfolioProblem final : public DecisionProblem {
 public:
  // Throws SolverError if `covariance` is not positive definite.
  PortfolioProblem(Eigen::MatrixXd covariance, double risk_aversion,
                   int feature_dim);

  std::string_view name() const override { return "portfolio"; }
  Sense sense() const override { return Sense::kMaximize; }
  int feature_dim() const override { return feature_dim_; }
  int target_dim() const override { return static_cast<int>(covariance_.rows()); }

  Decision Solve(const Eigen::VectorXd& prediction) const override;
  double Objective(const Decision& decision,
                   const Eigen::VectorXd& target) const override;
  // All weight on the asset with the lowest true return.
  Decision WorstDecision(const Eigen::VectorXd& target) const override;

  const Eigen::MatrixXd& covariance() const { return covariance_; }
  double risk_aversion() const { return risk_aversion_; }
  const Eigen::MatrixXd& solution_jacobian() const { return jacobian_; }
  const Eigen::VectorXd& solution_offset() const { return offset_; }

  // d regret / d prediction through the affine solution map.
  Eigen::VectorXd RegretGradient(const Eigen::VectorXd& prediction,
                                 const Eigen::VectorXd& target) const;

 private:
  Eigen::MatrixXd covariance_;
  Eigen::LLT<Eigen::MatrixXd> cholesky_;
  double risk_aversion_;
  int feature_dim_;
  Eigen::VectorXd inv_ones_;  // Sigma^{-1} 1
  double ones_inv_ones_;      // 1^T Sigma^{-1} 1
  Eigen::MatrixXd jacobian_;
  Eigen::VectorXd offset_;
};

// Generates (or loads) returns, windows them, and estimates the covariance on
// the training targets.
Benchmark MakePortfolioBenchmark(const PortfolioConfig& config,
                                 std::mt19937_64& rng);

}  // namespace lcgln

#endif  // LCGLN_PORTFOLIO_H_
