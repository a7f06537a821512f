#include "lcgln/net.h"

#include <cmath>
#include <string>

#include "lcgln/errors.h"

namespace lcgln {

namespace {

std::string DimMessage(std::string_view what, Eigen::Index expected,
                       Eigen::Index got) {
  return std::string(what) + ": expected dimension " +
         std::to_string(expected) + ", got " + std::to_string(got);
}

void CheckSimplex(const Eigen::VectorXd& p) {
  if ((p.array() < 0.0).any() || std::abs(p.sum() - 1.0) > 1e-6) {
    throw ContractError("probability vector is not on the simplex");
  }
}

}  // namespace

std::string_view ActivationName(Activation activation) {
  switch (activation) {
    case Activation::kLinear:
      return "linear";
    case Activation::kRelu:
      return "relu";
    case Activation::kSoftplus:
      return "softplus";
    case Activation::kSoftmax:
      return "softmax";
  }
  return "unknown";
}

std::string_view PredictionLossName(PredictionLoss loss) {
  return loss == PredictionLoss::kMse ? "mse" : "nll";
}

double Softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Eigen::MatrixXd SoftmaxColumns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double peak = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - peak).exp();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

DenseNet::DenseNet(int tile_input_dim, std::vector<DenseLayerSpec> layers, int tiles)
    : input_dim_(tile_input_dim), tiles_(tiles), layers_(std::move(layers)) {
  if (input_dim_ <= 0 || layers_.empty()) {
    throw ShapeError("DenseNet needs a positive input dimension and layers");
  }
  if (tiles_ < 1) throw ShapeError("DenseNet tile count must be >= 1");
  Eigen::Index offset = 0;
  int fan_in = input_dim_;
  for (size_t i = 0; i < layers_.size(); ++i) {
    const auto& spec = layers_[i];
    if (spec.output_dim <= 0) throw ShapeError("layer width must be positive");
    if (spec.activation == Activation::kSoftmax && i + 1 != layers_.size()) {
      throw ContractError("softmax is only supported on the final layer");
    }
    weight_offset_.push_back(offset);
    offset += static_cast<Eigen::Index>(spec.output_dim) * fan_in;
    bias_offset_.push_back(offset);
    offset += spec.output_dim;
    fan_in = spec.output_dim;
  }
  params_ = Eigen::VectorXd::Zero(offset);
}

DenseNet DenseNet::Mlp(int tile_input_dim, std::span<const int> hidden,
                       int tile_output_dim, Activation hidden_activation,
                       Activation output_activation, int tiles) {
  std::vector<DenseLayerSpec> layers;
  for (int width : hidden) layers.push_back({width, hidden_activation});
  layers.push_back({tile_output_dim, output_activation});
  return DenseNet(tile_input_dim, std::move(layers), tiles);
}

void DenseNet::InitializeUniform(std::mt19937_64& rng) {
  for (int i = 0; i < num_layers(); ++i) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer_input_dim(i)));
    std::uniform_real_distribution<double> dist(-bound, bound);
    auto w = weight(i);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = dist(rng);
    bias(i).setZero();
  }
}

int DenseNet::output_dim() const { return tiles_ * layers_.back().output_dim; }

int DenseNet::tile_output_dim() const { return layers_.back().output_dim; }

int DenseNet::layer_input_dim(int i) const {
  return i == 0 ? input_dim_ : layers_.at(i - 1).output_dim;
}

Eigen::Map<const Eigen::MatrixXd> DenseNet::weight(int i) const {
  return {params_.data() + weight_offset_.at(i), layers_[i].output_dim,
          layer_input_dim(i)};
}

Eigen::Map<Eigen::MatrixXd> DenseNet::weight(int i) {
  return {params_.data() + weight_offset_.at(i), layers_[i].output_dim,
          layer_input_dim(i)};
}

Eigen::Map<const Eigen::VectorXd> DenseNet::bias(int i) const {
  return {params_.data() + bias_offset_.at(i), layers_[i].output_dim};
}

Eigen::Map<Eigen::VectorXd> DenseNet::bias(int i) {
  return {params_.data() + bias_offset_.at(i), layers_[i].output_dim};
}

Eigen::MatrixXd DenseNet::ToTiles(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != input_dim()) {
    throw ShapeError(DimMessage("DenseNet input", input_dim(), inputs.rows()));
  }
  if (tiles_ == 1) return inputs;
  // Column-major storage makes the reshape a reinterpretation.
  return Eigen::Map<const Eigen::MatrixXd>(inputs.data(), input_dim_,
                                           inputs.cols() * tiles_);
}

DenseNet::Trace DenseNet::Run(const Eigen::MatrixXd& inputs) const {
  Trace trace;
  trace.activations.reserve(layers_.size() + 1);
  trace.pre.reserve(layers_.size());
  trace.activations.push_back(inputs);
  for (int i = 0; i < num_layers(); ++i) {
    Eigen::MatrixXd pre = weight(i) * trace.activations.back();
    pre.colwise() += bias(i);
    Eigen::MatrixXd out;
    switch (layers_[i].activation) {
      case Activation::kLinear:
        out = pre;
        break;
      case Activation::kRelu:
        out = pre.cwiseMax(0.0);
        break;
      case Activation::kSoftplus:
        out = pre.unaryExpr([](double v) { return Softplus(v); });
        break;
      case Activation::kSoftmax:
        out = SoftmaxColumns(pre);
        break;
    }
    trace.pre.push_back(std::move(pre));
    trace.activations.push_back(std::move(out));
  }
  return trace;
}

Eigen::VectorXd DenseNet::Forward(const Eigen::VectorXd& x) const {
  return ForwardBatch(x).col(0);
}

Eigen::MatrixXd DenseNet::ForwardBatch(const Eigen::MatrixXd& inputs) const {
  Eigen::MatrixXd out = std::move(Run(ToTiles(inputs)).activations.back());
  if (tiles_ == 1) return out;
  return Eigen::Map<const Eigen::MatrixXd>(out.data(), output_dim(), inputs.cols());
}

NetGradient DenseNet::Backward(const Eigen::MatrixXd& inputs,
                               const Eigen::MatrixXd& upstream) const {
  Trace trace = Run(ToTiles(inputs));
  if (upstream.rows() != output_dim() || upstream.cols() != inputs.cols()) {
    throw ShapeError("upstream gradient shape does not match network output");
  }
  NetGradient grad;
  grad.params = Eigen::VectorXd::Zero(params_.size());
  Eigen::MatrixXd delta = Eigen::Map<const Eigen::MatrixXd>(
      upstream.data(), tile_output_dim(), upstream.cols() * tiles_);
  for (int i = num_layers() - 1; i >= 0; --i) {
    const Eigen::MatrixXd& pre = trace.pre[i];
    const Eigen::MatrixXd& out = trace.activations[i + 1];
    switch (layers_[i].activation) {
      case Activation::kLinear:
        break;
      case Activation::kRelu:
        delta = delta.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
        break;
      case Activation::kSoftplus:
        delta = delta.cwiseProduct(
            pre.unaryExpr([](double v) { return Sigmoid(v); }));
        break;
      case Activation::kSoftmax: {
        // J^T g = p * (g - <p, g>) per column.
        Eigen::RowVectorXd inner = out.cwiseProduct(delta).colwise().sum();
        delta = out.cwiseProduct(delta - inner.replicate(delta.rows(), 1));
        break;
      }
    }
    const Eigen::MatrixXd& in = trace.activations[i];
    Eigen::Map<Eigen::MatrixXd>(grad.params.data() + weight_offset_[i],
                                layers_[i].output_dim, layer_input_dim(i)) =
        delta * in.transpose();
    Eigen::Map<Eigen::VectorXd>(grad.params.data() + bias_offset_[i],
                                layers_[i].output_dim) = delta.rowwise().sum();
    delta = weight(i).transpose() * delta;
  }
  grad.input = Eigen::Map<const Eigen::MatrixXd>(delta.data(), input_dim(),
                                                 inputs.cols());
  return grad;
}

NetGradient MseGradient(const DenseNet& net, const Eigen::MatrixXd& inputs,
                        const Eigen::MatrixXd& targets) {
  if (targets.rows() != net.output_dim() || targets.cols() != inputs.cols()) {
    throw ShapeError("MSE targets do not match network output shape");
  }
  const Eigen::MatrixXd out = net.ForwardBatch(inputs);
  const Eigen::MatrixXd diff = out - targets;
  const double scale =
      1.0 / (static_cast<double>(diff.rows()) * static_cast<double>(diff.cols()));
  NetGradient grad = net.Backward(inputs, 2.0 * scale * diff);
  grad.loss = scale * diff.squaredNorm();
  return grad;
}

NetGradient NllGradient(const DenseNet& net, const Eigen::MatrixXd& inputs,
                        std::span<const int> classes) {
  if (net.layer(net.num_layers() - 1).activation != Activation::kSoftmax ||
      net.tiles() != 1) {
    throw ContractError("NLL requires a single softmax (simplex-valued) output");
  }
  if (static_cast<Eigen::Index>(classes.size()) != inputs.cols()) {
    throw ShapeError("NLL needs one class index per sample");
  }
  const Eigen::MatrixXd probs = net.ForwardBatch(inputs);
  const double inv_batch = 1.0 / static_cast<double>(inputs.cols());
  Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(probs.rows(), probs.cols());
  double loss = 0.0;
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    const int k = classes[c];
    if (k < 0 || k >= probs.rows()) {
      throw ContractError("class index " + std::to_string(k) +
                          " out of range");
    }
    const double p = probs(k, c);
    loss += -std::log(std::max(p, kNllProbabilityFloor));
    if (p > kNllProbabilityFloor) upstream(k, c) = -inv_batch / p;
  }
  NetGradient grad = net.Backward(inputs, upstream);
  grad.loss = loss * inv_batch;
  return grad;
}

NetGradient UpstreamGradient(const DenseNet& net,
                             const Eigen::MatrixXd& inputs,
                             const Eigen::MatrixXd& upstream) {
  return net.Backward(inputs, upstream);
}

double MseLoss(const Eigen::VectorXd& prediction,
               const Eigen::VectorXd& target) {
  if (prediction.size() != target.size()) {
    throw ShapeError(DimMessage("MSE", target.size(), prediction.size()));
  }
  if (prediction.size() == 0) return 0.0;
  return (prediction - target).squaredNorm() /
         static_cast<double>(prediction.size());
}

double NllLoss(const Eigen::VectorXd& probabilities, int cls) {
  CheckSimplex(probabilities);
  if (cls < 0 || cls >= probabilities.size()) {
    throw ContractError("class index " + std::to_string(cls) + " out of range");
  }
  return -std::log(std::max(probabilities[cls], kNllProbabilityFloor));
}

}  // namespace lcgln
