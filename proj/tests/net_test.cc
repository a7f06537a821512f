#include "lcgln/net.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fd.h"
#include "lcgln/errors.h"
#include "toy_problem.h"

namespace lcgln {
namespace {

using testing::CentralDifference;
using testing::MaxRelativeError;
using testing::RandomNormal;

TEST(DenseNetTest, ZeroWeightsReturnBias) {
  DenseNet net(3, {{2, Activation::kLinear}});
  net.bias(0) << 0.5, -1.5;
  const Eigen::VectorXd out = net.Forward(Eigen::Vector3d(4.0, -2.0, 7.0));
  EXPECT_DOUBLE_EQ(out[0], 0.5);
  EXPECT_DOUBLE_EQ(out[1], -1.5);
}

TEST(DenseNetTest, IdentityLayer) {
  DenseNet net(2, {{2, Activation::kLinear}});
  net.weight(0).setIdentity();
  const Eigen::VectorXd out = net.Forward(Eigen::Vector2d(1.0, -2.0));
  EXPECT_DOUBLE_EQ(out[0], 1.0);
  EXPECT_DOUBLE_EQ(out[1], -2.0);
}

TEST(DenseNetTest, SoftplusAtZero) {
  DenseNet net(1, {{1, Activation::kSoftplus}});
  net.weight(0)(0, 0) = 1.0;
  EXPECT_NEAR(net.Forward(Eigen::VectorXd::Zero(1))[0], std::log(2.0), 1e-12);
}

TEST(DenseNetTest, SoftplusIsOverflowSafe) {
  EXPECT_DOUBLE_EQ(Softplus(1000.0), 1000.0);
  EXPECT_NEAR(Softplus(-1000.0), 0.0, 1e-300);
  EXPECT_TRUE(std::isfinite(Softplus(800.0)));
}

TEST(DenseNetTest, WrongInputDimensionThrows) {
  DenseNet net(3, {{2, Activation::kLinear}});
  EXPECT_THROW(net.Forward(Eigen::VectorXd::Zero(2)), ShapeError);
}

TEST(DenseNetTest, SoftmaxOnlyOnFinalLayer) {
  EXPECT_THROW(DenseNet(2, {{3, Activation::kSoftmax}, {1, Activation::kLinear}}),
               ContractError);
}

TEST(DenseNetTest, SoftmaxOutputsAreDistributions) {
  std::mt19937_64 rng(3);
  const std::vector<int> hidden = {8};
  DenseNet net = DenseNet::Mlp(4, hidden, 5, Activation::kRelu, Activation::kSoftmax);
  net.InitializeUniform(rng);
  net.parameters() *= 20.0;  // push logits far apart
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd p = net.Forward(RandomNormal(4, rng) * 5.0);
    EXPECT_NEAR(p.sum(), 1.0, 1e-9);
    EXPECT_GE(p.minCoeff(), 0.0);
  }
}

TEST(DenseNetTest, InitializationBounds) {
  std::mt19937_64 rng(1);
  const std::vector<int> hidden = {16};
  DenseNet net = DenseNet::Mlp(9, hidden, 3, Activation::kRelu, Activation::kLinear);
  net.InitializeUniform(rng);
  EXPECT_LE(net.weight(0).cwiseAbs().maxCoeff(), 1.0 / 3.0);
  EXPECT_LE(net.weight(1).cwiseAbs().maxCoeff(), 1.0 / 4.0);
  EXPECT_EQ(net.bias(0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(net.bias(1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(NetGradientTest, ScalarMseHandCase) {
  DenseNet net(1, {{1, Activation::kLinear}});
  net.weight(0)(0, 0) = 2.0;
  const NetGradient g =
      MseGradient(net, Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1));
  EXPECT_DOUBLE_EQ(g.loss, 4.0);
  EXPECT_DOUBLE_EQ(g.params[0], 4.0);  // weight precedes bias
}

TEST(NetGradientTest, ZeroNetworkHasZeroInputAndWeightGradients) {
  DenseNet net(3, {{4, Activation::kSoftplus}, {2, Activation::kLinear}});
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 5);
  const Eigen::MatrixXd upstream = Eigen::MatrixXd::Random(2, 5);
  const NetGradient g = UpstreamGradient(net, x, upstream);
  EXPECT_EQ(g.input.cwiseAbs().maxCoeff(), 0.0);
  Eigen::VectorXd out_bias = upstream.rowwise().sum();
  const Eigen::Index last_bias = net.num_parameters() - 2;
  EXPECT_NEAR(g.params[last_bias], out_bias[0], 1e-12);
  EXPECT_NEAR(g.params[last_bias + 1], out_bias[1], 1e-12);
  // First layer (12 weights + 4 biases) sees only zero downstream weights.
  EXPECT_EQ(g.params.head(16).cwiseAbs().maxCoeff(), 0.0);
}

struct GradientCase {
  Activation hidden;
  Activation output;
  PredictionLoss loss;
  int tiles;
};

class NetGradientFdTest : public ::testing::TestWithParam<GradientCase> {};

TEST_P(NetGradientFdTest, MatchesCentralDifferences) {
  const GradientCase c = GetParam();
  std::mt19937_64 rng(11);
  const int in = 4;
  const int out = 3;
  const int batch = 3;
  const std::vector<int> hidden = {6, 5};
  for (int draw = 0; draw < 50; ++draw) {
    DenseNet net = DenseNet::Mlp(in, hidden, out, c.hidden, c.output, c.tiles);
    net.InitializeUniform(rng);
    net.parameters() += RandomNormal(static_cast<int>(net.num_parameters()), rng) * 0.1;
    const Eigen::MatrixXd x =
        Eigen::MatrixXd::NullaryExpr(net.input_dim(), batch, [&] {
          return std::normal_distribution<double>()(rng);
        });
    Eigen::MatrixXd target(net.output_dim(), batch);
    std::vector<int> classes(batch);
    for (int j = 0; j < batch; ++j) {
      target.col(j) = RandomNormal(net.output_dim(), rng);
      classes[j] = static_cast<int>(rng() % out);
    }
    auto loss_of = [&](const DenseNet& m, const Eigen::MatrixXd& inputs) {
      return c.loss == PredictionLoss::kMse ? MseGradient(m, inputs, target)
                                            : NllGradient(m, inputs, classes);
    };
    const NetGradient g = loss_of(net, x);

    const Eigen::VectorXd fd_params = CentralDifference(
        [&](const Eigen::VectorXd& p) {
          DenseNet m = net;
          m.parameters() = p;
          return loss_of(m, x).loss;
        },
        net.parameters());
    EXPECT_LT(MaxRelativeError(g.params, fd_params), 1e-4) << "draw " << draw;

    const Eigen::VectorXd flat_x = x.reshaped();
    const Eigen::VectorXd fd_input = CentralDifference(
        [&](const Eigen::VectorXd& v) {
          return loss_of(net, v.reshaped(x.rows(), x.cols())).loss;
        },
        flat_x);
    const Eigen::VectorXd analytic_input = g.input.reshaped();
    EXPECT_LT(MaxRelativeError(analytic_input, fd_input), 1e-4) << "draw " << draw;
  }
}

INSTANTIATE_TEST_SUITE_P(
    Losses, NetGradientFdTest,
    ::testing::Values(
        GradientCase{Activation::kSoftplus, Activation::kLinear, PredictionLoss::kMse, 1},
        GradientCase{Activation::kSoftplus, Activation::kSoftmax, PredictionLoss::kNll, 1},
        GradientCase{Activation::kSoftplus, Activation::kSoftmax, PredictionLoss::kMse, 1},
        GradientCase{Activation::kSoftplus, Activation::kLinear, PredictionLoss::kMse, 3}));

TEST(DenseNetTest, TilesShareOneModelPerBlock) {
  std::mt19937_64 rng(5);
  const std::vector<int> hidden = {4};
  DenseNet tiled = DenseNet::Mlp(3, hidden, 2, Activation::kRelu, Activation::kLinear, 4);
  tiled.InitializeUniform(rng);
  DenseNet single = DenseNet::Mlp(3, hidden, 2, Activation::kRelu, Activation::kLinear);
  single.parameters() = tiled.parameters();
  EXPECT_EQ(tiled.input_dim(), 12);
  EXPECT_EQ(tiled.output_dim(), 8);

  const Eigen::VectorXd x = RandomNormal(12, rng);
  const Eigen::VectorXd y = tiled.Forward(x);
  for (int t = 0; t < 4; ++t) {
    const Eigen::VectorXd expected = single.Forward(x.segment(3 * t, 3));
    EXPECT_NEAR((y.segment(2 * t, 2) - expected).norm(), 0.0, 1e-14);
  }
}

TEST(PredictionLossTest, HandValues) {
  EXPECT_DOUBLE_EQ(MseLoss(Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)), 0.0);
  EXPECT_DOUBLE_EQ(MseLoss(Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4)), 12.5);
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(5, 0.2);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(NllLoss(uniform, k), std::log(5.0), 1e-12);
}

TEST(PredictionLossTest, NllFloorsZeroProbability) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
  p[0] = 1.0;
  EXPECT_NEAR(NllLoss(p, 1), -std::log(kNllProbabilityFloor), 1e-9);
}

TEST(PredictionLossTest, Errors) {
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(5, 0.2);
  EXPECT_THROW(NllLoss(uniform, 5), ContractError);
  EXPECT_THROW(NllLoss(uniform, -1), ContractError);
  EXPECT_THROW(NllLoss(Eigen::Vector2d(0.9, 0.9), 0), ContractError);
  EXPECT_THROW(MseLoss(Eigen::Vector2d(0, 0), Eigen::Vector3d(0, 0, 0)), ShapeError);

  DenseNet linear(2, {{3, Activation::kLinear}});
  const std::vector<int> classes = {0};
  EXPECT_THROW(NllGradient(linear, Eigen::MatrixXd::Zero(2, 1), classes), ContractError);
}

}  // namespace
}  // namespace lcgln
