#ifndef LCGLN_NET_H_
#define LCGLN_NET_H_

#include <Eigen/Dense>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace lcgln {

enum class Activation { kLinear, kRelu, kSoftplus, kSoftmax };

std::string_view ActivationName(Activation activation);

struct DenseLayerSpec {
  int output_dim = 0;
  Activation activation = Activation::kLinear;
};

// Gradient of a scalar loss. `params` uses the same flat layout as
// DenseNet::parameters(); `input` holds dL/dx with one column per sample.
struct NetGradient {
  double loss = 0.0;
  Eigen::VectorXd params;
  Eigen::MatrixXd input;
};

// Feedforward stack of dense layers. All weights and biases live in one flat
// vector so optimizers, checkpoints, and finite-difference checks can treat
// the network as a point in R^p. Softmax is only allowed on the final layer.
//
// Samples are columns throughout: ForwardBatch takes an (input_dim x batch)
// matrix and returns (output_dim x batch).
//
// With tiles > 1 the same layers are applied to each of `tiles` consecutive
// input blocks of size tile_input_dim, and the per-block outputs are stacked
// in the same order (one shared model per item, e.g. per website).
class DenseNet {
 public:
  DenseNet() = default;
  DenseNet(int tile_input_dim, std::vector<DenseLayerSpec> layers, int tiles = 1);

  static DenseNet Mlp(int tile_input_dim, std::span<const int> hidden,
                      int tile_output_dim, Activation hidden_activation,
                      Activation output_activation, int tiles = 1);

  // Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
  void InitializeUniform(std::mt19937_64& rng);

  int input_dim() const { return input_dim_ * tiles_; }
  int output_dim() const;
  int tiles() const { return tiles_; }
  int tile_input_dim() const { return input_dim_; }
  int tile_output_dim() const;
  int num_layers() const { return static_cast<int>(layers_.size()); }
  const DenseLayerSpec& layer(int i) const { return layers_.at(i); }
  int layer_input_dim(int i) const;

  Eigen::Map<const Eigen::MatrixXd> weight(int i) const;
  Eigen::Map<Eigen::MatrixXd> weight(int i);
  Eigen::Map<const Eigen::VectorXd> bias(int i) const;
  Eigen::Map<Eigen::VectorXd> bias(int i);

  const Eigen::VectorXd& parameters() const { return params_; }
  Eigen::VectorXd& parameters() { return params_; }
  Eigen::Index num_parameters() const { return params_.size(); }

  Eigen::VectorXd Forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd ForwardBatch(const Eigen::MatrixXd& inputs) const;

  // Reverse pass for an arbitrary upstream dL/d(output). The returned
  // parameter gradient is summed over columns; callers that want a mean loss
  // scale `upstream` accordingly.
  NetGradient Backward(const Eigen::MatrixXd& inputs,
                       const Eigen::MatrixXd& upstream) const;

 private:
  struct Trace {
    std::vector<Eigen::MatrixXd> activations;  // activations[0] = inputs
    std::vector<Eigen::MatrixXd> pre;
  };

  // Runs on inputs already reshaped to one column per (sample, tile).
  Trace Run(const Eigen::MatrixXd& tiled_inputs) const;
  Eigen::MatrixXd ToTiles(const Eigen::MatrixXd& inputs) const;

  int input_dim_ = 0;
  int tiles_ = 1;
  std::vector<DenseLayerSpec> layers_;
  std::vector<Eigen::Index> weight_offset_;
  std::vector<Eigen::Index> bias_offset_;
  Eigen::VectorXd params_;
};

// Mean over samples of the mean squared componentwise error.
NetGradient MseGradient(const DenseNet& net, const Eigen::MatrixXd& inputs,
                        const Eigen::MatrixXd& targets);

// Mean categorical negative log-likelihood. Requires a softmax output layer.
NetGradient NllGradient(const DenseNet& net, const Eigen::MatrixXd& inputs,
                        std::span<const int> classes);

// Chains a caller-supplied dL/dy_hat (one column per sample) into the
// parameters. `loss` is left at zero.
NetGradient UpstreamGradient(const DenseNet& net,
                             const Eigen::MatrixXd& inputs,
                             const Eigen::MatrixXd& upstream);

inline constexpr double kNllProbabilityFloor = 1e-12;

enum class PredictionLoss { kMse, kNll };

std::string_view PredictionLossName(PredictionLoss loss);

double MseLoss(const Eigen::VectorXd& prediction,
               const Eigen::VectorXd& target);

// -log(max(p[cls], floor)); `probabilities` must lie on the simplex.
double NllLoss(const Eigen::VectorXd& probabilities, int cls);

double Softplus(double x);
double Sigmoid(double x);

// Column-wise numerically stable softmax.
Eigen::MatrixXd SoftmaxColumns(const Eigen::MatrixXd& logits);

}  // namespace lcgln

#endif  // LCGLN_NET_H_
