#ifndef AASEG_HED3D_HPP
#define AASEG_HED3D_HPP

#include <string>
#include <vector>

#include "aaseg/nnengine.hpp"
#include "aaseg/volume.hpp"

namespace aaseg::hed {

// VGG-style staged backbone with deep side outputs at the late stages,
// upsampled by transposed convolutions and fused by element-wise summation
// of the side logits before a single sigmoid.
struct Hed3DConfig {
  std::vector<int> stage_channels{16, 32, 64, 128, 128};
  int convs_per_stage = 2;
  int kernel = 3;                          // padding = kernel/2, resolution-preserving
  std::vector<int> kept_side_stages{3, 4, 5};  // 1-indexed; deepest stage always kept
  bool deep_supervision = false;
  Dims3 input_dims{128, 128, 64};

  static Hed3DConfig desk();  // [4,8,16,32,32] at 64x64x32

  void validate() const;
  std::string to_json() const;
  static Hed3DConfig from_json(const std::string& json);
};

struct SideBranch {
  int stage = 0;      // 1-indexed
  int factor = 1;     // upsampling factor 2^(stage-1)
  nn::Parameter proj_w;  // 1x1x1 projection to one channel
  nn::Parameter proj_b;
  nn::Parameter up_w;    // transposed-conv kernel (2f)^3, used when factor > 1
};

struct Hed3DNet {
  Hed3DConfig config;
  // stage_convs[s][c] = (weight, bias) of conv c in stage s
  std::vector<std::vector<std::pair<nn::Parameter, nn::Parameter>>> stage_convs;
  std::vector<SideBranch> sides;

  std::vector<nn::Parameter*> parameters();
  std::vector<const nn::Parameter*> parameters() const;
  int64_t parameter_count() const;
  void zero_grads();
};

Hed3DNet build(const Hed3DConfig& config, uint64_t seed);

struct ForwardCache {
  Tensor5 input;
  // per stage: inputs to each conv, pre-activations, pooling bookkeeping
  struct Stage {
    std::vector<Tensor5> conv_in;
    std::vector<Tensor5> preact;
    std::array<int64_t, 5> feat_shape{};
    std::vector<int64_t> pool_argmax;  // empty for the last stage
  };
  std::vector<Stage> stages;
  struct Side {
    Tensor5 proj_out;
    Tensor5 side_prob;  // only filled under deep supervision
  };
  std::vector<Side> sides;
  Tensor5 fused_prob;
};

struct ForwardResult {
  Tensor5 fused_prob;               // sigmoid of the summed side logits
  std::vector<Tensor5> side_probs;  // populated when deep_supervision is on
};

ForwardResult forward(const Hed3DNet& net, const Tensor5& input,
                      ForwardCache* cache = nullptr);

// accumulates parameter gradients; grad_fused_prob is dLoss/d(fused prob).
// grad_side_probs (same order as net.sides) is only used with deep supervision.
void backward(Hed3DNet& net, const ForwardCache& cache,
              const Tensor5& grad_fused_prob,
              const std::vector<Tensor5>* grad_side_probs = nullptr);

// ---------------------------------------------------------------------------
// weighted Dice loss: loss = 1 - (0.1*D_bg + 0.9*D_fg), each soft Dice
// smoothed with +1 in the denominator
// ---------------------------------------------------------------------------

template <typename T>
struct LossResult {
  double loss = 0;
  TensorT<T> grad;  // dLoss/dpred
};

template <typename T>
LossResult<T> weighted_dice_loss(const TensorT<T>& pred, const TensorT<T>& target,
                                 double w_fg = 0.9, double w_bg = 0.1) {
  if (!pred.same_shape(target)) throw Error("weighted_dice_loss: shape mismatch");
  double sum_p = 0, sum_y = 0, sum_py = 0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double y = target.data[i];
    if (y != 0.0 && y != 1.0)
      throw Error("weighted_dice_loss: target values must be 0 or 1");
    const double p = pred.data[i];
    sum_p += p;
    sum_y += y;
    sum_py += p * y;
  }
  const double n = static_cast<double>(pred.numel());
  const double den_fg = sum_y + sum_p + 1.0;
  const double num_fg = 2.0 * sum_py;
  // complements: sum(1-p) = n - sum_p etc., sum((1-p)(1-y)) = n - sum_p - sum_y + sum_py
  const double sum_pc_yc = n - sum_p - sum_y + sum_py;
  const double den_bg = (n - sum_y) + (n - sum_p) + 1.0;
  const double num_bg = 2.0 * sum_pc_yc;

  LossResult<T> r;
  r.loss = 1.0 - (w_bg * num_bg / den_bg + w_fg * num_fg / den_fg);
  r.grad = TensorT<T>(pred.shape);
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double y = target.data[i];
    // d(num_fg/den_fg)/dp_i = (2*y*den_fg - num_fg) / den_fg^2
    const double dfg = (2.0 * y * den_fg - num_fg) / (den_fg * den_fg);
    // num_bg depends on p_i via sum_pc_yc (coeff -(1-y)) and den_bg via -sum_p
    const double dbg = (-2.0 * (1.0 - y) * den_bg + num_bg) / (den_bg * den_bg);
    r.grad.data[i] = static_cast<T>(-(w_bg * dbg + w_fg * dfg));
  }
  return r;
}

// ---------------------------------------------------------------------------
// training
// ---------------------------------------------------------------------------

struct TrainSample {
  Tensor5 image;  // (1,1,D,H,W), values in [0,1]
  Tensor5 label;  // (1,1,D,H,W), values in {0,1}
};

struct TrainConfig {
  int epochs = 100;
  int batch_size = 2;
  double initial_lr = 1e-4;
  double plateau_factor = 0.2;
  int plateau_patience = 10;
  uint64_t seed = 0;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0;
  double val_loss = 0;
  double lr = 0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  std::vector<Tensor5> best_params;  // snapshot at the best validation loss
  double best_val_loss = 0;
};

// trains net in place; the best-validation parameter snapshot is returned
TrainResult train(Hed3DNet& net, const std::vector<TrainSample>& train_set,
                  const std::vector<TrainSample>& val_set, const TrainConfig& tc);

void apply_params(Hed3DNet& net, const std::vector<Tensor5>& params);

// volume must already be windowed to [0,255] and match config input dims
Volume3D predict(const Hed3DNet& net, const Volume3D& vol);

void write_history_csv(const std::vector<EpochStats>& history,
                       const std::string& path);

// checkpoint round-trip (format in volio)
void save_checkpoint(const Hed3DNet& net, const std::string& path);
Hed3DNet load_checkpoint(const std::string& path);

}  // namespace aaseg::hed

#endif
