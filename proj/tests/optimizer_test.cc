#include "lcgln/optimizer.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "lcgln/errors.h"

namespace lcgln {
namespace {

TrainConfig Sgd(double lr) {
  TrainConfig c;
  c.optimizer = OptimizerKind::kSgd;
  c.learning_rate = lr;
  return c;
}

TEST(OptimizerTest, SgdStep) {
  Optimizer opt(Sgd(0.1), 1);
  Eigen::VectorXd p = Eigen::VectorXd::Constant(1, 1.0);
  opt.Step(p, Eigen::VectorXd::Constant(1, 2.0));
  EXPECT_DOUBLE_EQ(p[0], 0.8);
}

TEST(OptimizerTest, SgdZeroGradientLeavesParameters) {
  Optimizer opt(Sgd(0.1), 2);
  Eigen::VectorXd p(2);
  p << 1.5, -3.0;
  const Eigen::VectorXd before = p;
  opt.Step(p, Eigen::VectorXd::Zero(2));
  EXPECT_EQ(p, before);
}

TEST(OptimizerTest, AdamFirstStepMovesByLearningRate) {
  TrainConfig c;
  c.learning_rate = 1e-3;
  Optimizer opt(c, 3);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd g(3);
  g << 5.0, -0.01, 200.0;
  opt.Step(p, g);
  for (int i = 0; i < 3; ++i) {
    const double expected = c.learning_rate * std::abs(g[i]) / (std::abs(g[i]) + c.epsilon);
    EXPECT_NEAR(std::abs(p[i]), expected, 1e-15);
    EXPECT_LT(p[i] * g[i], 0.0);
  }
  EXPECT_EQ(opt.steps(), 1);
}

TEST(OptimizerTest, NonFiniteGradientFailsFast) {
  Optimizer opt(Sgd(0.1), 2);
  Eigen::VectorXd p = Eigen::VectorXd::Ones(2);
  Eigen::VectorXd g(2);
  g << 1.0, std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(opt.Step(p, g), NumericalError);
  EXPECT_EQ(p, Eigen::VectorXd::Ones(2));
  g[1] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(opt.Step(p, g), NumericalError);
}

TEST(OptimizerTest, GradientSizeMismatch) {
  Optimizer opt(Sgd(0.1), 2);
  Eigen::VectorXd p = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(opt.Step(p, Eigen::VectorXd::Ones(3)), ShapeError);
}

TEST(TrainConfigTest, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.learning_rate = 0.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c.learning_rate = 1e-3;
  c.epochs = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(OptimizerTest, AdamMinimizesQuadratic) {
  TrainConfig c;
  c.learning_rate = 0.01;
  Optimizer opt(c, 2);
  Eigen::VectorXd p(2);
  p << 3.0, -2.0;
  for (int i = 0; i < 5000; ++i) opt.Step(p, 2.0 * p);
  EXPECT_LT(p.norm(), 0.02);
}

}  // namespace
}  // namespace lcgln
