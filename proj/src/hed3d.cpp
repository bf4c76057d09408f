#include "aaseg/hed3d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "aaseg/rng.hpp"
#include "aaseg/volio.hpp"

namespace aaseg::hed {

using nn::Pad3;
using nn::Parameter;

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

Hed3DConfig Hed3DConfig::desk() {
  Hed3DConfig c;
  c.stage_channels = {4, 8, 16, 32, 32};
  c.input_dims = {64, 64, 32};
  return c;
}

void Hed3DConfig::validate() const {
  const int stages = static_cast<int>(stage_channels.size());
  if (stages < 1) throw Error("Hed3DConfig: need at least one stage");
  for (int ch : stage_channels)
    if (ch < 1) throw Error("Hed3DConfig: stage channels must be positive");
  if (convs_per_stage < 1) throw Error("Hed3DConfig: convs_per_stage must be >= 1");
  if (kernel < 1 || kernel % 2 == 0)
    throw Error("Hed3DConfig: kernel must be odd and positive");
  if (kept_side_stages.empty()) throw Error("Hed3DConfig: no side outputs kept");
  for (int s : kept_side_stages)
    if (s < 1 || s > stages)
      throw Error("Hed3DConfig: kept side stage out of range");
  if (std::find(kept_side_stages.begin(), kept_side_stages.end(), stages) ==
      kept_side_stages.end())
    throw Error("Hed3DConfig: the deepest stage must be kept");
  const int div = 1 << (stages - 1);
  if (input_dims.nx % div || input_dims.ny % div || input_dims.nz % div)
    throw Error("Hed3DConfig: input dims must be divisible by 2^(stages-1) = " +
                std::to_string(div));
  if (input_dims.nx / div < 1 || input_dims.ny / div < 1 || input_dims.nz / div < 1)
    throw Error("Hed3DConfig: input dims too small for the stage count");
}

std::string Hed3DConfig::to_json() const {
  nlohmann::json j;
  j["stage_channels"] = stage_channels;
  j["convs_per_stage"] = convs_per_stage;
  j["kernel"] = kernel;
  j["kept_side_stages"] = kept_side_stages;
  j["deep_supervision"] = deep_supervision;
  j["input_dims"] = {input_dims.nx, input_dims.ny, input_dims.nz};
  return j.dump();
}

Hed3DConfig Hed3DConfig::from_json(const std::string& json) {
  Hed3DConfig c;
  try {
    const nlohmann::json j = nlohmann::json::parse(json);
    c.stage_channels = j.at("stage_channels").get<std::vector<int>>();
    c.convs_per_stage = j.at("convs_per_stage").get<int>();
    c.kernel = j.at("kernel").get<int>();
    c.kept_side_stages = j.at("kept_side_stages").get<std::vector<int>>();
    c.deep_supervision = j.at("deep_supervision").get<bool>();
    const auto dims = j.at("input_dims").get<std::vector<int>>();
    if (dims.size() != 3) throw Error("Hed3DConfig: input_dims must have 3 entries");
    c.input_dims = {dims[0], dims[1], dims[2]};
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("Hed3DConfig: bad config json: ") + e.what());
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// net assembly
// ---------------------------------------------------------------------------

std::vector<Parameter*> Hed3DNet::parameters() {
  std::vector<Parameter*> out;
  for (auto& stage : stage_convs)
    for (auto& [w, b] : stage) {
      out.push_back(&w);
      out.push_back(&b);
    }
  for (SideBranch& s : sides) {
    out.push_back(&s.proj_w);
    out.push_back(&s.proj_b);
    if (s.factor > 1) out.push_back(&s.up_w);
  }
  return out;
}

std::vector<const Parameter*> Hed3DNet::parameters() const {
  auto mut = const_cast<Hed3DNet*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

int64_t Hed3DNet::parameter_count() const {
  int64_t n = 0;
  for (const Parameter* p : parameters()) n += p->value.numel();
  return n;
}

void Hed3DNet::zero_grads() {
  for (Parameter* p : parameters()) p->zero_grad();
}

namespace {

void he_uniform(Tensor5& t, int64_t fan_in, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (auto& v : t.data) v = static_cast<float>(rng.uniform(-limit, limit));
}

// interpolation weights for a stride-f transposed conv (kernel 2f, pad f/2);
// random upsampling kernels produce incoherent side outputs that stall training
void trilinear_up(Tensor5& t, int64_t factor) {
  const int64_t k = 2 * factor;
  const double center = static_cast<double>(factor) - 0.5;
  auto w1 = [&](int64_t i) {
    return 1.0 - std::abs(static_cast<double>(i) - center) / static_cast<double>(factor);
  };
  for (int64_t d = 0; d < k; ++d)
    for (int64_t h = 0; h < k; ++h)
      for (int64_t w = 0; w < k; ++w)
        t.data[static_cast<std::size_t>((d * k + h) * k + w)] =
            static_cast<float>(w1(d) * w1(h) * w1(w));
}

}  // namespace

Hed3DNet build(const Hed3DConfig& config, uint64_t seed) {
  config.validate();
  Hed3DNet net;
  net.config = config;
  Rng rng(seed);

  const int64_t k = config.kernel;
  int64_t in_ch = 1;
  for (std::size_t s = 0; s < config.stage_channels.size(); ++s) {
    const int64_t out_ch = config.stage_channels[s];
    std::vector<std::pair<Parameter, Parameter>> convs;
    for (int c = 0; c < config.convs_per_stage; ++c) {
      const int64_t ci = (c == 0) ? in_ch : out_ch;
      std::ostringstream name;
      name << "stage" << (s + 1) << ".conv" << c;
      Parameter w(name.str() + ".w", {out_ch, ci, k, k, k});
      Parameter b(name.str() + ".b", {out_ch, 1, 1, 1, 1});
      he_uniform(w.value, ci * k * k * k, rng);
      convs.emplace_back(std::move(w), std::move(b));
    }
    net.stage_convs.push_back(std::move(convs));
    in_ch = out_ch;
  }

  for (int stage : config.kept_side_stages) {
    SideBranch side;
    side.stage = stage;
    side.factor = 1 << (stage - 1);
    const int64_t ch = config.stage_channels[static_cast<std::size_t>(stage - 1)];
    std::ostringstream name;
    name << "side" << stage;
    side.proj_w = Parameter(name.str() + ".proj.w", {1, ch, 1, 1, 1});
    side.proj_b = Parameter(name.str() + ".proj.b", {1, 1, 1, 1, 1});
    he_uniform(side.proj_w.value, ch, rng);
    if (side.factor > 1) {
      const int64_t uk = 2 * side.factor;
      side.up_w = Parameter(name.str() + ".up.w", {1, 1, uk, uk, uk});
      trilinear_up(side.up_w.value, side.factor);
    }
    net.sides.push_back(std::move(side));
  }
  return net;
}

// ---------------------------------------------------------------------------
// forward / backward
// ---------------------------------------------------------------------------

namespace {

std::vector<float>& bias_vec(Parameter& p) { return p.value.data; }
const std::vector<float>& bias_vec(const Parameter& p) { return p.value.data; }

void accumulate(Tensor5& dst, const Tensor5& src) {
  for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

void accumulate(std::vector<float>& dst, const std::vector<float>& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

ForwardResult forward(const Hed3DNet& net, const Tensor5& input,
                      ForwardCache* cache) {
  const Hed3DConfig& cfg = net.config;
  if (input.shape[1] != 1 || input.shape[2] != cfg.input_dims.nz ||
      input.shape[3] != cfg.input_dims.ny || input.shape[4] != cfg.input_dims.nx)
    throw Error("hed3d forward: input shape does not match config input dims");

  const int64_t kp = cfg.kernel / 2;
  const Pad3 pad{kp, kp, kp};
  const std::size_t stages = net.stage_convs.size();

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c = ForwardCache{};
  c.input = input;
  c.stages.resize(stages);
  c.sides.resize(net.sides.size());

  std::vector<Tensor5> side_logits(net.sides.size());
  std::vector<Tensor5> stage_features(stages);

  Tensor5 t = input;
  for (std::size_t s = 0; s < stages; ++s) {
    auto& sc = c.stages[s];
    for (const auto& [w, b] : net.stage_convs[s]) {
      sc.conv_in.push_back(t);
      Tensor5 z = nn::conv3d(t, w.value, bias_vec(b), 1, pad);
      t = nn::relu(z);
      sc.preact.push_back(std::move(z));
    }
    sc.feat_shape = t.shape;
    stage_features[s] = t;

    if (s + 1 < stages) {
      auto pool = nn::maxpool3d(t);
      sc.pool_argmax = std::move(pool.argmax);
      t = std::move(pool.out);
    }
  }

  Tensor5 fused_logit;
  for (std::size_t i = 0; i < net.sides.size(); ++i) {
    const SideBranch& side = net.sides[i];
    const Tensor5& feat = stage_features[static_cast<std::size_t>(side.stage - 1)];
    Tensor5 proj =
        nn::conv3d(feat, side.proj_w.value, bias_vec(side.proj_b), 1, {0, 0, 0});
    c.sides[i].proj_out = proj;
    side_logits[i] =
        side.factor > 1
            ? nn::conv_transpose3d(proj, side.up_w.value, side.factor,
                                   Pad3{side.factor / 2, side.factor / 2,
                                        side.factor / 2})
            : std::move(proj);
    if (fused_logit.data.empty())
      fused_logit = side_logits[i];
    else
      fused_logit = nn::elementwise_add(fused_logit, side_logits[i]);
  }

  ForwardResult r;
  r.fused_prob = nn::sigmoid(fused_logit);
  c.fused_prob = r.fused_prob;
  if (cfg.deep_supervision) {
    for (std::size_t i = 0; i < side_logits.size(); ++i) {
      Tensor5 sp = nn::sigmoid(side_logits[i]);
      c.sides[i].side_prob = sp;
      r.side_probs.push_back(std::move(sp));
    }
  }
  return r;
}

void backward(Hed3DNet& net, const ForwardCache& cache,
              const Tensor5& grad_fused_prob,
              const std::vector<Tensor5>* grad_side_probs) {
  const Hed3DConfig& cfg = net.config;
  const int64_t kp = cfg.kernel / 2;
  const Pad3 pad{kp, kp, kp};
  const std::size_t stages = net.stage_convs.size();

  const Tensor5 glogit = nn::sigmoid_backward(grad_fused_prob, cache.fused_prob);

  // gradient w.r.t. each stage's features (relu output of the last conv)
  std::vector<Tensor5> grad_feat(stages);

  for (std::size_t i = 0; i < net.sides.size(); ++i) {
    SideBranch& side = net.sides[i];
    const std::size_t s = static_cast<std::size_t>(side.stage - 1);
    // every side logit feeds the fused sum; deep supervision adds the
    // side's own sigmoid path
    Tensor5 gl = glogit;
    if (grad_side_probs) {
      const Tensor5 extra =
          nn::sigmoid_backward((*grad_side_probs)[i], cache.sides[i].side_prob);
      accumulate(gl, extra);
    }
    Tensor5 gproj;
    if (side.factor > 1) {
      auto g = nn::conv_transpose3d_backward(
          gl, cache.sides[i].proj_out, side.up_w.value, side.factor,
          Pad3{side.factor / 2, side.factor / 2, side.factor / 2});
      accumulate(side.up_w.grad, g.weight);
      gproj = std::move(g.input);
    } else {
      gproj = std::move(gl);
    }
    // projection is a 1x1x1 conv over the stage features = relu(last preact)
    const Tensor5 feat = nn::relu(cache.stages[s].preact.back());
    auto g = nn::conv3d_backward(gproj, feat, side.proj_w.value, 1, {0, 0, 0});
    accumulate(side.proj_w.grad, g.weight);
    accumulate(side.proj_b.grad.data, g.bias);
    if (grad_feat[s].data.empty())
      grad_feat[s] = std::move(g.input);
    else
      accumulate(grad_feat[s], g.input);
  }

  // backbone, deepest stage first
  Tensor5 g;  // grad w.r.t. current stage features
  for (std::size_t si = stages; si-- > 0;) {
    if (g.data.empty()) {
      g = std::move(grad_feat[si]);
    } else if (!grad_feat[si].data.empty()) {
      accumulate(g, grad_feat[si]);
    }
    if (g.data.empty()) continue;  // no gradient reaches below a dead branch

    auto& convs = net.stage_convs[si];
    const auto& sc = cache.stages[si];
    for (std::size_t ci = convs.size(); ci-- > 0;) {
      const Tensor5 gz = nn::relu_backward(g, sc.preact[ci]);
      auto cg = nn::conv3d_backward(gz, sc.conv_in[ci], convs[ci].first.value, 1, pad);
      accumulate(convs[ci].first.grad, cg.weight);
      accumulate(convs[ci].second.grad.data, cg.bias);
      g = std::move(cg.input);
    }
    if (si > 0) {
      // g is the gradient at the pool output of the previous stage
      g = nn::maxpool3d_backward(g, cache.stages[si - 1].pool_argmax,
                                 cache.stages[si - 1].feat_shape);
    }
  }
}

// ---------------------------------------------------------------------------
// training
// ---------------------------------------------------------------------------

namespace {

double loss_only(const Hed3DNet& net, const TrainSample& sample) {
  const ForwardResult r = forward(net, sample.image);
  return weighted_dice_loss<float>(r.fused_prob, sample.label).loss;
}

std::vector<Tensor5> snapshot(const Hed3DNet& net) {
  std::vector<Tensor5> out;
  for (const Parameter* p : net.parameters()) out.push_back(p->value);
  return out;
}

}  // namespace

void apply_params(Hed3DNet& net, const std::vector<Tensor5>& params) {
  auto ptrs = net.parameters();
  if (ptrs.size() != params.size())
    throw Error("apply_params: parameter count mismatch");
  for (std::size_t i = 0; i < ptrs.size(); ++i) {
    if (!(ptrs[i]->value.shape == params[i].shape))
      throw Error("apply_params: shape mismatch for " + ptrs[i]->name);
    ptrs[i]->value = params[i];
  }
}

TrainResult train(Hed3DNet& net, const std::vector<TrainSample>& train_set,
                  const std::vector<TrainSample>& val_set, const TrainConfig& tc) {
  if (train_set.empty() || val_set.empty())
    throw Error("train: train and validation sets must be non-empty");
  if (tc.batch_size < 1) throw Error("train: batch size must be >= 1");

  nn::PlateauSchedule sched;
  sched.rate = tc.initial_lr;
  sched.factor = tc.plateau_factor;
  sched.patience = tc.plateau_patience;

  TrainResult result;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  auto params = net.parameters();

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    Rng shuffle_rng(hash_mix(tc.seed, static_cast<uint64_t>(epoch), 0x5807ULL));
    for (std::size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i],
                order[static_cast<std::size_t>(shuffle_rng.uniform_int(0, static_cast<int64_t>(i)))]);

    double train_loss_sum = 0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(tc.batch_size)) {
      const std::size_t bs =
          std::min<std::size_t>(tc.batch_size, order.size() - start);

      net.zero_grads();
      double batch_loss = 0;
      for (std::size_t bi = 0; bi < bs; ++bi) {
        const TrainSample& sample = train_set[order[start + bi]];
        ForwardCache cache;
        const ForwardResult r = forward(net, sample.image, &cache);

        // mean over batch; with deep supervision also mean over
        // {side outputs, fused}
        std::vector<LossResult<float>> losses;
        losses.push_back(weighted_dice_loss<float>(r.fused_prob, sample.label));
        for (const Tensor5& sp : r.side_probs)
          losses.push_back(weighted_dice_loss<float>(sp, sample.label));

        const double scale =
            1.0 / (static_cast<double>(bs) * static_cast<double>(losses.size()));
        double sample_loss = 0;
        for (const auto& l : losses) sample_loss += l.loss;
        sample_loss /= static_cast<double>(losses.size());
        if (!std::isfinite(sample_loss))
          throw Error("train: non-finite loss at epoch " + std::to_string(epoch) +
                      ", batch " + std::to_string(start / tc.batch_size));

        Tensor5 gprob(r.fused_prob.shape);
        for (std::size_t i = 0; i < gprob.data.size(); ++i)
          gprob.data[i] = static_cast<float>(losses[0].grad.data[i] * scale);

        if (net.config.deep_supervision) {
          std::vector<Tensor5> gsides;
          for (std::size_t k = 1; k < losses.size(); ++k) {
            Tensor5 gs(losses[k].grad.shape);
            for (std::size_t i = 0; i < gs.data.size(); ++i)
              gs.data[i] = static_cast<float>(losses[k].grad.data[i] * scale);
            gsides.push_back(std::move(gs));
          }
          backward(net, cache, gprob, &gsides);
        } else {
          backward(net, cache, gprob);
        }
        batch_loss += sample_loss;
      }
      nn::adam_step(params, sched.rate);
      train_loss_sum += batch_loss;
      seen += bs;
    }

    double val_loss = 0;
    for (const TrainSample& s : val_set) val_loss += loss_only(net, s);
    val_loss /= static_cast<double>(val_set.size());

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = train_loss_sum / static_cast<double>(seen);
    stats.val_loss = val_loss;
    stats.lr = sched.rate;
    result.history.push_back(stats);

    if (val_loss < result.best_val_loss) {
      result.best_val_loss = val_loss;
      result.best_params = snapshot(net);
    }
    sched.step(val_loss);
  }
  if (result.best_params.empty()) result.best_params = snapshot(net);
  return result;
}

Volume3D predict(const Hed3DNet& net, const Volume3D& vol) {
  const Dims3& want = net.config.input_dims;
  if (!(vol.dims == want))
    throw Error("predict: volume dims do not match network input dims");
  const Tensor5 x = volume_to_tensor(vol, 255.0f);
  const ForwardResult r = forward(net, x);
  Volume3D prob(vol.dims, vol.spacing, vol.origin);
  prob.data.assign(r.fused_prob.data.begin(), r.fused_prob.data.end());
  return prob;
}

void write_history_csv(const std::vector<EpochStats>& history,
                       const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("write_history_csv: cannot open " + path);
  os << "epoch,train_loss,val_loss,lr\n";
  os.precision(12);
  for (const EpochStats& e : history)
    os << e.epoch << ',' << e.train_loss << ',' << e.val_loss << ',' << e.lr << '\n';
}

// ---------------------------------------------------------------------------
// checkpoints
// ---------------------------------------------------------------------------

void save_checkpoint(const Hed3DNet& net, const std::string& path) {
  io::CheckpointData ckpt;
  ckpt.config = net.config.to_json();
  for (const Parameter* p : net.parameters()) {
    io::NamedTensor t;
    t.name = p->name;
    t.dims.assign(p->value.shape.begin(), p->value.shape.end());
    t.values = p->value.data;
    ckpt.tensors.push_back(std::move(t));
  }
  io::write_checkpoint(ckpt, path);
}

Hed3DNet load_checkpoint(const std::string& path) {
  const io::CheckpointData ckpt = io::read_checkpoint(path);
  const Hed3DConfig config = Hed3DConfig::from_json(ckpt.config);
  Hed3DNet net = build(config, 0);

  auto params = net.parameters();
  if (params.size() != ckpt.tensors.size())
    throw Error("checkpoint: expected " + std::to_string(params.size()) +
                " tensors, found " + std::to_string(ckpt.tensors.size()));
  for (Parameter* p : params) {
    const io::NamedTensor* found = nullptr;
    for (const io::NamedTensor& t : ckpt.tensors)
      if (t.name == p->name) {
        found = &t;
        break;
      }
    if (!found) throw Error("checkpoint: missing tensor " + p->name);
    std::vector<int64_t> want(p->value.shape.begin(), p->value.shape.end());
    if (found->dims != want)
      throw Error("checkpoint: shape mismatch for tensor " + p->name);
    p->value.data = found->values;
  }
  return net;
}

}  // namespace aaseg::hed
