#include "lcgln/picnn.h"

#include <cmath>
#include <string>

#include "lcgln/errors.h"
#include "lcgln/net.h"

namespace lcgln {

namespace {

Eigen::MatrixXd SoftplusOf(const Eigen::MatrixXd& m) {
  return m.unaryExpr([](double v) { return Softplus(v); });
}

Eigen::MatrixXd SigmoidOf(const Eigen::MatrixXd& m) {
  return m.unaryExpr([](double v) { return Sigmoid(v); });
}

constexpr int Index(PicnnBlock b) { return static_cast<int>(b); }

}  // namespace

std::string_view PicnnBlockName(PicnnBlock block) {
  switch (block) {
    case PicnnBlock::kContextWeight:
      return "context_weight";
    case PicnnBlock::kContextBias:
      return "context_bias";
    case PicnnBlock::kPredGateWeight:
      return "pred_gate_weight";
    case PicnnBlock::kPredGateBias:
      return "pred_gate_bias";
    case PicnnBlock::kPredWeight:
      return "pred_weight";
    case PicnnBlock::kSkipWeight:
      return "skip_weight";
    case PicnnBlock::kBias:
      return "bias";
    case PicnnBlock::kHiddenGateWeight:
      return "hidden_gate_weight";
    case PicnnBlock::kHiddenGateBias:
      return "hidden_gate_bias";
    case PicnnBlock::kHiddenWeight:
      return "hidden_weight";
  }
  return "unknown";
}

struct Picnn::Trace {
  std::vector<Eigen::MatrixXd> context;      // context[0] = targets
  std::vector<Eigen::MatrixXd> context_pre;  // pre-activation of context[j+1]
  std::vector<Eigen::MatrixXd> pred_gate;
  std::vector<Eigen::MatrixXd> pred_product;
  std::vector<Eigen::MatrixXd> hidden_gate_pre;
  std::vector<Eigen::MatrixXd> hidden_product;
  std::vector<Eigen::MatrixXd> pre;
  std::vector<Eigen::MatrixXd> z;            // z[0] unused
};

Picnn::Picnn(PicnnShape shape) : shape_(std::move(shape)) {
  if (shape_.target_dim <= 0 || shape_.context_width <= 0) {
    throw ShapeError("PICNN needs positive target and context widths");
  }
  for (int w : shape_.hidden) {
    if (w <= 0) throw ShapeError("PICNN hidden widths must be positive");
  }
  const int n = shape_.target_dim;
  const int cw = shape_.context_width;
  Eigen::Index offset = 0;
  auto add = [&](int rows, int cols) {
    BlockInfo b{offset, rows, cols};
    offset += static_cast<Eigen::Index>(rows) * cols;
    return b;
  };
  blocks_.resize(num_layers());
  for (int i = 0; i < num_layers(); ++i) {
    auto& t = blocks_[i];
    const int out = layer_output_dim(i);
    const int nz = layer_hidden_input_dim(i);
    t[Index(PicnnBlock::kContextWeight)] = add(cw, i == 0 ? n : cw);
    t[Index(PicnnBlock::kContextBias)] = add(cw, 1);
    t[Index(PicnnBlock::kPredGateWeight)] = add(n, cw);
    t[Index(PicnnBlock::kPredGateBias)] = add(n, 1);
    t[Index(PicnnBlock::kPredWeight)] = add(out, n);
    t[Index(PicnnBlock::kSkipWeight)] = add(out, cw);
    t[Index(PicnnBlock::kBias)] = add(out, 1);
    t[Index(PicnnBlock::kHiddenGateWeight)] = add(nz, nz > 0 ? cw : 0);
    t[Index(PicnnBlock::kHiddenGateBias)] = add(nz, nz > 0 ? 1 : 0);
    t[Index(PicnnBlock::kHiddenWeight)] = add(nz > 0 ? out : 0, nz);
  }
  params_ = Eigen::VectorXd::Zero(offset);
}

int Picnn::layer_output_dim(int layer) const {
  return layer + 1 == num_layers() ? 1 : shape_.hidden.at(layer);
}

int Picnn::layer_hidden_input_dim(int layer) const {
  return layer == 0 ? 0 : shape_.hidden.at(layer - 1);
}

const Picnn::BlockInfo& Picnn::info(int layer, PicnnBlock b) const {
  return blocks_.at(layer)[Index(b)];
}

bool Picnn::has_block(int layer, PicnnBlock b) const {
  const auto& i = info(layer, b);
  return i.rows > 0 && i.cols > 0;
}

Eigen::Map<const Eigen::MatrixXd> Picnn::block(int layer, PicnnBlock b) const {
  const auto& i = info(layer, b);
  return {params_.data() + i.offset, i.rows, i.cols};
}

Eigen::Map<Eigen::MatrixXd> Picnn::block(int layer, PicnnBlock b) {
  const auto& i = info(layer, b);
  return {params_.data() + i.offset, i.rows, i.cols};
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> Picnn::constrained_ranges()
    const {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> ranges;
  for (int i = 1; i < num_layers(); ++i) {
    const auto& b = info(i, PicnnBlock::kHiddenWeight);
    ranges.emplace_back(b.offset, static_cast<Eigen::Index>(b.rows) * b.cols);
  }
  return ranges;
}

void Picnn::Initialize(std::mt19937_64& rng) {
  auto fill = [&](int layer, PicnnBlock b, double lo, double hi) {
    auto m = block(layer, b);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = dist(rng);
  };
  params_.setZero();
  for (int i = 0; i < num_layers(); ++i) {
    for (PicnnBlock b :
         {PicnnBlock::kContextWeight, PicnnBlock::kPredGateWeight,
          PicnnBlock::kPredWeight, PicnnBlock::kSkipWeight,
          PicnnBlock::kHiddenGateWeight, PicnnBlock::kHiddenWeight}) {
      if (!has_block(i, b)) continue;
      const double bound =
          1.0 / std::sqrt(static_cast<double>(info(i, b).cols));
      fill(i, b, b == PicnnBlock::kHiddenWeight ? 0.0 : -bound, bound);
    }
    block(i, PicnnBlock::kPredGateBias).setOnes();
    if (has_block(i, PicnnBlock::kHiddenGateBias)) {
      block(i, PicnnBlock::kHiddenGateBias).setOnes();
    }
  }
}

Picnn::Trace Picnn::Run(const Eigen::MatrixXd& preds,
                        const Eigen::MatrixXd& targets) const {
  const int n = shape_.target_dim;
  if (preds.rows() != n || targets.rows() != n) {
    throw ShapeError("PICNN expects inputs of dimension " + std::to_string(n) +
                     ", got " + std::to_string(preds.rows()) + " and " +
                     std::to_string(targets.rows()));
  }
  if (preds.cols() != targets.cols()) {
    throw ShapeError("PICNN prediction/target batch sizes differ");
  }
  const int k = num_layers();
  Trace t;
  t.context.reserve(k + 1);
  t.context.push_back(targets);
  for (int j = 0; j < k; ++j) {
    Eigen::MatrixXd pre = block(j, PicnnBlock::kContextWeight) * t.context[j];
    pre.colwise() += block(j, PicnnBlock::kContextBias).col(0);
    t.context.push_back(SoftplusOf(pre));
    t.context_pre.push_back(std::move(pre));
  }
  t.pred_gate.resize(k);
  t.pred_product.resize(k);
  t.hidden_gate_pre.resize(k);
  t.hidden_product.resize(k);
  t.pre.resize(k);
  t.z.resize(k + 1);
  for (int i = 0; i < k; ++i) {
    const Eigen::MatrixXd& u = t.context[i + 1];
    Eigen::MatrixXd gate = block(i, PicnnBlock::kPredGateWeight) * u;
    gate.colwise() += block(i, PicnnBlock::kPredGateBias).col(0);
    t.pred_product[i] = preds.cwiseProduct(gate);
    t.pred_gate[i] = std::move(gate);

    Eigen::MatrixXd pre = block(i, PicnnBlock::kPredWeight) * t.pred_product[i];
    pre.noalias() += block(i, PicnnBlock::kSkipWeight) * u;
    pre.colwise() += block(i, PicnnBlock::kBias).col(0);
    if (i > 0) {
      Eigen::MatrixXd hpre = block(i, PicnnBlock::kHiddenGateWeight) * u;
      hpre.colwise() += block(i, PicnnBlock::kHiddenGateBias).col(0);
      t.hidden_product[i] = t.z[i].cwiseProduct(hpre.cwiseMax(0.0));
      pre.noalias() += block(i, PicnnBlock::kHiddenWeight) * t.hidden_product[i];
      t.hidden_gate_pre[i] = std::move(hpre);
    }
    t.z[i + 1] = (i + 1 == k) ? pre : SoftplusOf(pre);
    t.pre[i] = std::move(pre);
  }
  if (!t.z[k].allFinite()) {
    throw NumericalError("PICNN produced a non-finite output");
  }
  return t;
}

double Picnn::Forward(const Eigen::VectorXd& pred,
                      const Eigen::VectorXd& target) const {
  return ForwardBatch(pred, target)(0);
}

Eigen::RowVectorXd Picnn::ForwardBatch(const Eigen::MatrixXd& preds,
                                       const Eigen::MatrixXd& targets) const {
  return Run(preds, targets).z.back();
}

PicnnGradient Picnn::Backward(const Eigen::MatrixXd& preds,
                              const Eigen::MatrixXd& targets,
                              const Eigen::RowVectorXd& upstream) const {
  Trace t = Run(preds, targets);
  if (upstream.size() != preds.cols()) {
    throw ShapeError("PICNN upstream gradient must have one entry per sample");
  }
  const int k = num_layers();
  const Eigen::Index batch = preds.cols();
  PicnnGradient g;
  g.params = Eigen::VectorXd::Zero(params_.size());
  g.pred = Eigen::MatrixXd::Zero(preds.rows(), batch);
  auto grad_block = [&](int layer, PicnnBlock b) {
    const auto& i = info(layer, b);
    return Eigen::Map<Eigen::MatrixXd>(g.params.data() + i.offset, i.rows,
                                       i.cols);
  };

  std::vector<Eigen::MatrixXd> d_context(k + 1);
  for (int j = 1; j <= k; ++j) {
    d_context[j] = Eigen::MatrixXd::Zero(shape_.context_width, batch);
  }

  Eigen::MatrixXd dz = upstream;
  for (int i = k - 1; i >= 0; --i) {
    const Eigen::MatrixXd& u = t.context[i + 1];
    Eigen::MatrixXd da =
        (i + 1 == k) ? dz : Eigen::MatrixXd(dz.cwiseProduct(SigmoidOf(t.pre[i])));

    grad_block(i, PicnnBlock::kPredWeight) = da * t.pred_product[i].transpose();
    const Eigen::MatrixXd d_prod = block(i, PicnnBlock::kPredWeight).transpose() * da;
    g.pred += d_prod.cwiseProduct(t.pred_gate[i]);
    const Eigen::MatrixXd d_gate = d_prod.cwiseProduct(preds);
    grad_block(i, PicnnBlock::kPredGateWeight) = d_gate * u.transpose();
    grad_block(i, PicnnBlock::kPredGateBias) = d_gate.rowwise().sum();
    d_context[i + 1].noalias() +=
        block(i, PicnnBlock::kPredGateWeight).transpose() * d_gate;

    grad_block(i, PicnnBlock::kSkipWeight) = da * u.transpose();
    grad_block(i, PicnnBlock::kBias) = da.rowwise().sum();
    d_context[i + 1].noalias() += block(i, PicnnBlock::kSkipWeight).transpose() * da;

    if (i > 0) {
      grad_block(i, PicnnBlock::kHiddenWeight) =
          da * t.hidden_product[i].transpose();
      const Eigen::MatrixXd d_hprod =
          block(i, PicnnBlock::kHiddenWeight).transpose() * da;
      const Eigen::MatrixXd& hpre = t.hidden_gate_pre[i];
      const Eigen::MatrixXd d_hgate =
          d_hprod.cwiseProduct(t.z[i])
              .cwiseProduct((hpre.array() > 0.0).cast<double>().matrix());
      grad_block(i, PicnnBlock::kHiddenGateWeight) = d_hgate * u.transpose();
      grad_block(i, PicnnBlock::kHiddenGateBias) = d_hgate.rowwise().sum();
      d_context[i + 1].noalias() +=
          block(i, PicnnBlock::kHiddenGateWeight).transpose() * d_hgate;
      dz = d_hprod.cwiseProduct(hpre.cwiseMax(0.0));
    }
  }

  for (int j = k - 1; j >= 0; --j) {
    const Eigen::MatrixXd d_pre =
        d_context[j + 1].cwiseProduct(SigmoidOf(t.context_pre[j]));
    grad_block(j, PicnnBlock::kContextWeight) = d_pre * t.context[j].transpose();
    grad_block(j, PicnnBlock::kContextBias) = d_pre.rowwise().sum();
    Eigen::MatrixXd d_in = block(j, PicnnBlock::kContextWeight).transpose() * d_pre;
    if (j > 0) {
      d_context[j] += d_in;
    } else {
      g.target = std::move(d_in);
    }
  }
  if (!g.params.allFinite() || !g.pred.allFinite() || !g.target.allFinite()) {
    throw NumericalError("PICNN produced a non-finite gradient");
  }
  return g;
}

PicnnGradient Picnn::Gradient(const Eigen::VectorXd& pred,
                              const Eigen::VectorXd& target) const {
  return Backward(pred, target, Eigen::RowVectorXd::Ones(1));
}

void Picnn::EnforceNonnegativity() {
  for (const auto& [offset, size] : constrained_ranges()) {
    params_.segment(offset, size) = params_.segment(offset, size).cwiseMax(0.0);
  }
}

bool Picnn::SatisfiesNonnegativity() const {
  for (const auto& [offset, size] : constrained_ranges()) {
    if ((params_.segment(offset, size).array() < 0.0).any()) return false;
  }
  return true;
}

Picnn EnforceNonnegativity(Picnn model) {
  model.EnforceNonnegativity();
  return model;
}

}  // namespace lcgln
