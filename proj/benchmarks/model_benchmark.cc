#include <benchmark/benchmark.h>

#include <random>

#include "lcgln/net.h"
#include "lcgln/picnn.h"

namespace lcgln {
namespace {

Eigen::MatrixXd Random(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  return Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return normal(rng); });
}

void BM_PicnnForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  Picnn model({.target_dim = n, .hidden = {2}, .context_width = 2});
  model.Initialize(rng);
  const Eigen::MatrixXd pred = Random(n, 64, rng);
  const Eigen::MatrixXd target = Random(n, 64, rng);
  for (auto _ : state) benchmark::DoNotOptimize(model.ForwardBatch(pred, target));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_PicnnForward)->Arg(5)->Arg(50)->Arg(5050);

void BM_PicnnBackward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  Picnn model({.target_dim = n, .hidden = {2}, .context_width = 2});
  model.Initialize(rng);
  const Eigen::MatrixXd pred = Random(n, 64, rng);
  const Eigen::MatrixXd target = Random(n, 64, rng);
  const Eigen::RowVectorXd upstream = Eigen::RowVectorXd::Constant(64, 1.0 / 64);
  for (auto _ : state) benchmark::DoNotOptimize(model.Backward(pred, target, upstream));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_PicnnBackward)->Arg(5)->Arg(50)->Arg(5050);

void BM_NetMseGradient(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  const std::vector<int> widths = {hidden};
  DenseNet net = DenseNet::Mlp(250, widths, 50, Activation::kRelu, Activation::kLinear);
  net.InitializeUniform(rng);
  const Eigen::MatrixXd x = Random(250, 128, rng);
  const Eigen::MatrixXd y = Random(50, 128, rng);
  for (auto _ : state) benchmark::DoNotOptimize(MseGradient(net, x, y));
  state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_NetMseGradient)->Arg(10)->Arg(500);

}  // namespace
}  // namespace lcgln
