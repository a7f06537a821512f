#ifndef LCGLN_PICNN_H_
#define LCGLN_PICNN_H_

#include <Eigen/Dense>
#include <array>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace lcgln {

// Architecture of the partially input-convex surrogate L(y_hat, y).
struct PicnnShape {
  int target_dim = 0;             // |y_hat| = |y|
  std::vector<int> hidden = {2};  // convex-path hidden widths; output is 1
  int context_width = 2;          // width of every context activation u_j
};

// Parameter blocks of one layer. See docs/picnn.md for the recurrence.
enum class PicnnBlock {
  kContextWeight,     // C_i    : u_{i+1} = softplus(C_i u_i + c_i), u_0 = y
  kContextBias,       // c_i
  kPredGateWeight,    // G_i    : y_hat gate  (G_i u_{i+1} + g_i)
  kPredGateBias,      // g_i
  kPredWeight,        // P_i    : P_i (y_hat * gate)
  kSkipWeight,        // S_i    : S_i u_{i+1}
  kBias,              // b_i
  kHiddenGateWeight,  // H_i    : [H_i u_{i+1} + h_i]_+   (layers i >= 1)
  kHiddenGateBias,    // h_i
  kHiddenWeight,      // W_i >= 0 : W_i (z_i * gate)      (layers i >= 1)
};
inline constexpr int kNumPicnnBlocks = 10;

std::string_view PicnnBlockName(PicnnBlock block);

// Scalar gradients of a batch. `params` is summed over the batch with the
// same layout as Picnn::parameters(); `pred` and `target` hold one column of
// dL/dy_hat and dL/dy per sample.
struct PicnnGradient {
  Eigen::VectorXd params;
  Eigen::MatrixXd pred;
  Eigen::MatrixXd target;
};

// Partial input-convex network: convex in the prediction y_hat for every
// fixed target y, unconstrained in y. Convexity holds because the only
// weights touching the convex path's hidden state are kept nonnegative, the
// hidden activation (softplus) is convex and non-decreasing, hidden-state
// gates are clamped at zero, and y_hat only enters affinely.
class Picnn {
 public:
  Picnn() = default;
  explicit Picnn(PicnnShape shape);

  // Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)); constrained weights
  // ~ U(0, 1/sqrt(fan_in)); gate biases 1; other biases 0.
  void Initialize(std::mt19937_64& rng);

  const PicnnShape& shape() const { return shape_; }
  int num_layers() const { return static_cast<int>(shape_.hidden.size()) + 1; }
  int layer_output_dim(int layer) const;
  int layer_hidden_input_dim(int layer) const;  // 0 for the first layer

  const Eigen::VectorXd& parameters() const { return params_; }
  Eigen::VectorXd& parameters() { return params_; }
  Eigen::Index num_parameters() const { return params_.size(); }

  Eigen::Map<const Eigen::MatrixXd> block(int layer, PicnnBlock b) const;
  Eigen::Map<Eigen::MatrixXd> block(int layer, PicnnBlock b);
  bool has_block(int layer, PicnnBlock b) const;

  // [offset, offset + size) ranges of the nonnegativity-constrained weights.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> constrained_ranges() const;

  double Forward(const Eigen::VectorXd& pred,
                 const Eigen::VectorXd& target) const;
  // Columns are samples; returns one value per column.
  Eigen::RowVectorXd ForwardBatch(const Eigen::MatrixXd& preds,
                                  const Eigen::MatrixXd& targets) const;

  // Reverse pass seeded with dL/d(output) per column.
  PicnnGradient Backward(const Eigen::MatrixXd& preds,
                         const Eigen::MatrixXd& targets,
                         const Eigen::RowVectorXd& upstream) const;
  PicnnGradient Gradient(const Eigen::VectorXd& pred,
                         const Eigen::VectorXd& target) const;

  // Projects every constrained weight onto [0, inf). Idempotent.
  void EnforceNonnegativity();
  bool SatisfiesNonnegativity() const;

 private:
  struct BlockInfo {
    Eigen::Index offset = 0;
    int rows = 0;
    int cols = 0;
  };
  struct Trace;

  Trace Run(const Eigen::MatrixXd& preds, const Eigen::MatrixXd& targets) const;
  const BlockInfo& info(int layer, PicnnBlock b) const;

  PicnnShape shape_;
  std::vector<std::array<BlockInfo, kNumPicnnBlocks>> blocks_;
  Eigen::VectorXd params_;
};

// Returns a copy with constrained weights clamped to max(w, 0).
Picnn EnforceNonnegativity(Picnn model);

}  // namespace lcgln

#endif  // LCGLN_PICNN_H_
