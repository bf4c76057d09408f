#ifndef AASEG_NNENGINE_HPP
#define AASEG_NNENGINE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "aaseg/rng.hpp"
#include "aaseg/volume.hpp"

// Dense-tensor ops for the 3D segmentation net: direct cross-correlation
// convolution (no kernel flip), max pooling, transposed convolution,
// activations, Adam and the plateau schedule. Everything is templated so the
// gradient checker can run the same code in double precision.

namespace aaseg::nn {

using Pad3 = std::array<int64_t, 3>;  // (pd, ph, pw)

template <typename T>
void check_finite(const TensorT<T>& t, const char* what) {
  for (std::size_t i = 0; i < t.data.size(); ++i)
    if (!std::isfinite(t.data[i]))
      throw Error(std::string(what) + ": non-finite value at flat index " +
                  std::to_string(i));
}

inline int64_t conv_out_dim(int64_t in, int64_t k, int64_t stride, int64_t pad) {
  return (in + 2 * pad - k) / stride + 1;
}

// ---------------------------------------------------------------------------
// conv3d: out[n,co,od,oh,ow] = b[co] + sum_{ci,k} in[n,ci,od*s-pd+kd,...] * w[co,ci,k]
// weight shape (Cout, Cin, kd, kh, kw)
// ---------------------------------------------------------------------------

// forward core without bias; shared with conv_transpose backward
template <typename T>
TensorT<T> conv3d_core(const TensorT<T>& in, const TensorT<T>& w, int64_t stride,
                       Pad3 pad) {
  const int64_t N = in.shape[0], Ci = in.shape[1];
  const int64_t D = in.shape[2], H = in.shape[3], W = in.shape[4];
  const int64_t Co = w.shape[0], kd = w.shape[2], kh = w.shape[3], kw = w.shape[4];
  if (w.shape[1] != Ci) throw Error("conv3d: weight Cin mismatch");
  if (stride < 1) throw Error("conv3d: stride must be >= 1");
  const int64_t Do = conv_out_dim(D, kd, stride, pad[0]);
  const int64_t Ho = conv_out_dim(H, kh, stride, pad[1]);
  const int64_t Wo = conv_out_dim(W, kw, stride, pad[2]);
  if (Do <= 0 || Ho <= 0 || Wo <= 0) throw Error("conv3d: non-positive output dims");

  TensorT<T> out({N, Co, Do, Ho, Wo});
  for (int64_t n = 0; n < N; ++n)
    for (int64_t co = 0; co < Co; ++co)
      for (int64_t ci = 0; ci < Ci; ++ci)
        for (int64_t fd = 0; fd < kd; ++fd)
          for (int64_t fh = 0; fh < kh; ++fh)
            for (int64_t fw = 0; fw < kw; ++fw) {
              const T wv = w.data[w.index(co, ci, fd, fh, fw)];
              if (wv == T(0)) continue;
              for (int64_t od = 0; od < Do; ++od) {
                const int64_t id = od * stride - pad[0] + fd;
                if (id < 0 || id >= D) continue;
                for (int64_t oh = 0; oh < Ho; ++oh) {
                  const int64_t ih = oh * stride - pad[1] + fh;
                  if (ih < 0 || ih >= H) continue;
                  // ow range with iw = ow*stride - pw + fw inside [0, W)
                  int64_t lo = 0, hi = Wo;
                  {
                    const int64_t off = fw - pad[2];
                    // smallest ow with ow*stride + off >= 0
                    if (off < 0) lo = (-off + stride - 1) / stride;
                    // largest ow with ow*stride + off < W
                    hi = std::min<int64_t>(Wo, (W - 1 - off) / stride + 1);
                  }
                  if (lo >= hi) continue;
                  T* op = &out.data[out.index(n, co, od, oh, lo)];
                  const T* ip =
                      &in.data[in.index(n, ci, id, ih, lo * stride - pad[2] + fw)];
                  if (stride == 1) {
                    for (int64_t i = 0; i < hi - lo; ++i) op[i] += wv * ip[i];
                  } else {
                    for (int64_t i = 0; i < hi - lo; ++i)
                      op[i] += wv * ip[i * stride];
                  }
                }
              }
            }
  return out;
}

template <typename T>
TensorT<T> conv3d(const TensorT<T>& in, const TensorT<T>& w,
                  const std::vector<T>& bias, int64_t stride, Pad3 pad) {
  TensorT<T> out = conv3d_core(in, w, stride, pad);
  if (!bias.empty()) {
    const int64_t Co = out.shape[1];
    if (static_cast<int64_t>(bias.size()) != Co)
      throw Error("conv3d: bias size mismatch");
    const int64_t plane = out.shape[2] * out.shape[3] * out.shape[4];
    for (int64_t n = 0; n < out.shape[0]; ++n)
      for (int64_t co = 0; co < Co; ++co) {
        T* op = &out.data[static_cast<std::size_t>((n * Co + co) * plane)];
        const T b = bias[static_cast<std::size_t>(co)];
        for (int64_t i = 0; i < plane; ++i) op[i] += b;
      }
  }
  check_finite(out, "conv3d");
  return out;
}

// input-gradient core: scatter of gout through w onto the x-shaped grid;
// also the forward pass of conv_transpose3d
template <typename T>
TensorT<T> conv3d_input_grad_core(const TensorT<T>& gout, const TensorT<T>& w,
                                  int64_t stride, Pad3 pad,
                                  std::array<int64_t, 5> in_shape) {
  const int64_t N = gout.shape[0], Co = gout.shape[1];
  const int64_t Do = gout.shape[2], Ho = gout.shape[3], Wo = gout.shape[4];
  const int64_t Ci = w.shape[1], kd = w.shape[2], kh = w.shape[3], kw = w.shape[4];
  if (w.shape[0] != Co) throw Error("conv3d backward: weight Cout mismatch");
  if (in_shape[0] != N || in_shape[1] != Ci)
    throw Error("conv3d backward: input shape mismatch");
  const int64_t D = in_shape[2], H = in_shape[3], W = in_shape[4];

  TensorT<T> gin(in_shape);
  for (int64_t n = 0; n < N; ++n)
    for (int64_t ci = 0; ci < Ci; ++ci)
      for (int64_t co = 0; co < Co; ++co)
        for (int64_t fd = 0; fd < kd; ++fd)
          for (int64_t fh = 0; fh < kh; ++fh)
            for (int64_t fw = 0; fw < kw; ++fw) {
              const T wv = w.data[w.index(co, ci, fd, fh, fw)];
              if (wv == T(0)) continue;
              for (int64_t od = 0; od < Do; ++od) {
                const int64_t id = od * stride - pad[0] + fd;
                if (id < 0 || id >= D) continue;
                for (int64_t oh = 0; oh < Ho; ++oh) {
                  const int64_t ih = oh * stride - pad[1] + fh;
                  if (ih < 0 || ih >= H) continue;
                  int64_t lo = 0, hi = Wo;
                  {
                    const int64_t off = fw - pad[2];
                    if (off < 0) lo = (-off + stride - 1) / stride;
                    hi = std::min<int64_t>(Wo, (W - 1 - off) / stride + 1);
                  }
                  if (lo >= hi) continue;
                  const T* gp = &gout.data[gout.index(n, co, od, oh, lo)];
                  T* ip =
                      &gin.data[gin.index(n, ci, id, ih, lo * stride - pad[2] + fw)];
                  if (stride == 1) {
                    for (int64_t i = 0; i < hi - lo; ++i) ip[i] += wv * gp[i];
                  } else {
                    for (int64_t i = 0; i < hi - lo; ++i)
                      ip[i * stride] += wv * gp[i];
                  }
                }
              }
            }
  return gin;
}

// weight-gradient core: gw[co,ci,k] = sum_{n,o} gout[n,co,o] * in[n,ci,o*s-p+k]
template <typename T>
TensorT<T> conv3d_weight_grad_core(const TensorT<T>& in, const TensorT<T>& gout,
                                   int64_t stride, Pad3 pad,
                                   std::array<int64_t, 5> w_shape) {
  const int64_t N = in.shape[0];
  const int64_t D = in.shape[2], H = in.shape[3], W = in.shape[4];
  const int64_t Co = w_shape[0], Ci = w_shape[1];
  const int64_t kd = w_shape[2], kh = w_shape[3], kw = w_shape[4];
  const int64_t Do = gout.shape[2], Ho = gout.shape[3], Wo = gout.shape[4];

  TensorT<T> gw(w_shape);
  for (int64_t n = 0; n < N; ++n)
    for (int64_t co = 0; co < Co; ++co)
      for (int64_t ci = 0; ci < Ci; ++ci)
        for (int64_t fd = 0; fd < kd; ++fd)
          for (int64_t fh = 0; fh < kh; ++fh)
            for (int64_t fw = 0; fw < kw; ++fw) {
              T acc = 0;
              for (int64_t od = 0; od < Do; ++od) {
                const int64_t id = od * stride - pad[0] + fd;
                if (id < 0 || id >= D) continue;
                for (int64_t oh = 0; oh < Ho; ++oh) {
                  const int64_t ih = oh * stride - pad[1] + fh;
                  if (ih < 0 || ih >= H) continue;
                  int64_t lo = 0, hi = Wo;
                  {
                    const int64_t off = fw - pad[2];
                    if (off < 0) lo = (-off + stride - 1) / stride;
                    hi = std::min<int64_t>(Wo, (W - 1 - off) / stride + 1);
                  }
                  if (lo >= hi) continue;
                  const T* gp = &gout.data[gout.index(n, co, od, oh, lo)];
                  const T* ip =
                      &in.data[in.index(n, ci, id, ih, lo * stride - pad[2] + fw)];
                  if (stride == 1) {
                    for (int64_t i = 0; i < hi - lo; ++i) acc += gp[i] * ip[i];
                  } else {
                    for (int64_t i = 0; i < hi - lo; ++i)
                      acc += gp[i] * ip[i * stride];
                  }
                }
              }
              gw.data[gw.index(co, ci, fd, fh, fw)] += acc;
            }
  return gw;
}

template <typename T>
struct Conv3dGrads {
  TensorT<T> input;
  TensorT<T> weight;
  std::vector<T> bias;
};

template <typename T>
Conv3dGrads<T> conv3d_backward(const TensorT<T>& gout, const TensorT<T>& in,
                               const TensorT<T>& w, int64_t stride, Pad3 pad) {
  Conv3dGrads<T> g;
  g.input = conv3d_input_grad_core(gout, w, stride, pad, in.shape);
  g.weight = conv3d_weight_grad_core(in, gout, stride, pad, w.shape);
  const int64_t Co = w.shape[0];
  g.bias.assign(static_cast<std::size_t>(Co), T(0));
  const int64_t plane = gout.shape[2] * gout.shape[3] * gout.shape[4];
  for (int64_t n = 0; n < gout.shape[0]; ++n)
    for (int64_t co = 0; co < Co; ++co) {
      const T* gp = &gout.data[static_cast<std::size_t>((n * Co + co) * plane)];
      T acc = 0;
      for (int64_t i = 0; i < plane; ++i) acc += gp[i];
      g.bias[static_cast<std::size_t>(co)] += acc;
    }
  return g;
}

// ---------------------------------------------------------------------------
// conv_transpose3d: adjoint of conv3d with the same weight/stride/pad.
// Maps a (N,Cout,...) tensor back to (N,Cin,...) with
// out spatial dim = (in - 1)*stride + k - 2*pad.
// ---------------------------------------------------------------------------

template <typename T>
TensorT<T> conv_transpose3d(const TensorT<T>& in, const TensorT<T>& w,
                            int64_t stride, Pad3 pad) {
  const int64_t N = in.shape[0];
  if (in.shape[1] != w.shape[0])
    throw Error("conv_transpose3d: input channels must equal weight Cout");
  std::array<int64_t, 5> out_shape{
      N, w.shape[1], (in.shape[2] - 1) * stride + w.shape[2] - 2 * pad[0],
      (in.shape[3] - 1) * stride + w.shape[3] - 2 * pad[1],
      (in.shape[4] - 1) * stride + w.shape[4] - 2 * pad[2]};
  if (out_shape[2] <= 0 || out_shape[3] <= 0 || out_shape[4] <= 0)
    throw Error("conv_transpose3d: non-positive output dims");
  TensorT<T> out = conv3d_input_grad_core(in, w, stride, pad, out_shape);
  check_finite(out, "conv_transpose3d");
  return out;
}

template <typename T>
struct ConvT3dGrads {
  TensorT<T> input;
  TensorT<T> weight;
};

template <typename T>
ConvT3dGrads<T> conv_transpose3d_backward(const TensorT<T>& gout,
                                          const TensorT<T>& in,
                                          const TensorT<T>& w, int64_t stride,
                                          Pad3 pad) {
  ConvT3dGrads<T> g;
  g.input = conv3d_core(gout, w, stride, pad);
  g.weight = conv3d_weight_grad_core(gout, in, stride, pad, w.shape);
  return g;
}

// ---------------------------------------------------------------------------
// maxpool3d, window/stride per call (default 2/2); trailing voxels that do
// not fill a window are truncated. Ties break to the lowest flat index so
// backward is deterministic.
// ---------------------------------------------------------------------------

template <typename T>
struct PoolResult {
  TensorT<T> out;
  std::vector<int64_t> argmax;  // flat index into the input, one per output
};

template <typename T>
PoolResult<T> maxpool3d(const TensorT<T>& in, int64_t window = 2,
                        int64_t stride = 2) {
  const int64_t N = in.shape[0], C = in.shape[1];
  const int64_t D = in.shape[2], H = in.shape[3], W = in.shape[4];
  if (window > D || window > H || window > W)
    throw Error("maxpool3d: window larger than input");
  const int64_t Do = (D - window) / stride + 1;
  const int64_t Ho = (H - window) / stride + 1;
  const int64_t Wo = (W - window) / stride + 1;

  PoolResult<T> r;
  r.out = TensorT<T>({N, C, Do, Ho, Wo});
  r.argmax.assign(static_cast<std::size_t>(r.out.numel()), -1);
  std::size_t oi = 0;
  for (int64_t n = 0; n < N; ++n)
    for (int64_t c = 0; c < C; ++c)
      for (int64_t od = 0; od < Do; ++od)
        for (int64_t oh = 0; oh < Ho; ++oh)
          for (int64_t ow = 0; ow < Wo; ++ow, ++oi) {
            T best = -std::numeric_limits<T>::infinity();
            int64_t best_idx = -1;
            for (int64_t fd = 0; fd < window; ++fd)
              for (int64_t fh = 0; fh < window; ++fh)
                for (int64_t fw = 0; fw < window; ++fw) {
                  const std::size_t idx = in.index(
                      n, c, od * stride + fd, oh * stride + fh, ow * stride + fw);
                  if (in.data[idx] > best) {
                    best = in.data[idx];
                    best_idx = static_cast<int64_t>(idx);
                  }
                }
            r.out.data[oi] = best;
            r.argmax[oi] = best_idx;
          }
  return r;
}

template <typename T>
TensorT<T> maxpool3d_backward(const TensorT<T>& gout,
                              const std::vector<int64_t>& argmax,
                              std::array<int64_t, 5> in_shape) {
  TensorT<T> gin(in_shape);
  for (std::size_t i = 0; i < gout.data.size(); ++i)
    gin.data[static_cast<std::size_t>(argmax[i])] += gout.data[i];
  return gin;
}

// ---------------------------------------------------------------------------
// activations and elementwise add
// ---------------------------------------------------------------------------

template <typename T>
TensorT<T> relu(const TensorT<T>& in) {
  TensorT<T> out(in.shape);
  for (std::size_t i = 0; i < in.data.size(); ++i)
    out.data[i] = in.data[i] > T(0) ? in.data[i] : T(0);
  return out;
}

template <typename T>
TensorT<T> relu_backward(const TensorT<T>& gout, const TensorT<T>& in) {
  TensorT<T> gin(in.shape);
  for (std::size_t i = 0; i < in.data.size(); ++i)
    gin.data[i] = in.data[i] > T(0) ? gout.data[i] : T(0);
  return gin;
}

template <typename T>
TensorT<T> sigmoid(const TensorT<T>& in) {
  TensorT<T> out(in.shape);
  for (std::size_t i = 0; i < in.data.size(); ++i)
    out.data[i] = T(1) / (T(1) + std::exp(-in.data[i]));
  return out;
}

// takes the forward *output* (sigmoid' = y(1-y))
template <typename T>
TensorT<T> sigmoid_backward(const TensorT<T>& gout, const TensorT<T>& out) {
  TensorT<T> gin(out.shape);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    gin.data[i] = gout.data[i] * out.data[i] * (T(1) - out.data[i]);
  return gin;
}

template <typename T>
TensorT<T> elementwise_add(const TensorT<T>& a, const TensorT<T>& b) {
  if (!a.same_shape(b)) throw Error("elementwise_add: shape mismatch");
  TensorT<T> out(a.shape);
  for (std::size_t i = 0; i < a.data.size(); ++i)
    out.data[i] = a.data[i] + b.data[i];
  return out;
}

// ---------------------------------------------------------------------------
// Parameter + Adam + plateau schedule
// ---------------------------------------------------------------------------

struct Parameter {
  std::string name;
  Tensor5 value;
  Tensor5 grad;
  Tensor5 m;  // Adam first moment
  Tensor5 v;  // Adam second moment
  int64_t t = 0;

  Parameter() = default;
  Parameter(std::string nm, std::array<int64_t, 5> shape)
      : name(std::move(nm)), value(shape), grad(shape), m(shape), v(shape) {}

  void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0f); }
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

inline void adam_step(const std::vector<Parameter*>& params, double lr,
                      const AdamConfig& cfg = {}) {
  for (Parameter* p : params) {
    for (float g : p->grad.data)
      if (!std::isfinite(g))
        throw Error("adam_step: non-finite gradient in parameter " + p->name);
    p->t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p->t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p->t));
    for (std::size_t i = 0; i < p->value.data.size(); ++i) {
      const double g = p->grad.data[i];
      const double m = cfg.beta1 * p->m.data[i] + (1.0 - cfg.beta1) * g;
      const double v = cfg.beta2 * p->v.data[i] + (1.0 - cfg.beta2) * g * g;
      p->m.data[i] = static_cast<float>(m);
      p->v.data[i] = static_cast<float>(v);
      const double mhat = m / bc1;
      const double vhat = v / bc2;
      p->value.data[i] =
          static_cast<float>(p->value.data[i] - lr * mhat / (std::sqrt(vhat) + cfg.eps));
    }
  }
}

// Reduce-on-plateau: when the validation loss fails to improve by min_delta
// for `patience` consecutive epochs, multiply the rate by `factor` (never
// below floor_rate).
struct PlateauSchedule {
  double rate = 1e-4;
  double factor = 0.2;
  int patience = 10;
  double min_delta = 1e-4;
  double floor_rate = 1e-6;

  double best = std::numeric_limits<double>::infinity();
  int bad_epochs = 0;

  double step(double validation_loss) {
    if (!std::isfinite(validation_loss))
      throw Error("plateau_step: non-finite validation loss");
    if (validation_loss < best - min_delta) {
      best = validation_loss;
      bad_epochs = 0;
    } else {
      ++bad_epochs;
      if (bad_epochs >= patience) {
        rate = std::max(rate * factor, floor_rate);
        bad_epochs = 0;
      }
    }
    return rate;
  }
};

// ---------------------------------------------------------------------------
// Finite-difference gradient checker.
//
// fwd maps inputs to one output tensor; bwd returns per-input gradients for
// an upstream gradient. The check projects the output against a random
// vector u, so the scalar loss is L = <u, fwd(xs)> and the analytic gradient
// of L is bwd(xs, u). Returns max over elements of
// |a - n| / max(|a|, |n|, 1e-8).
// ---------------------------------------------------------------------------

template <typename T>
double grad_check(
    const std::function<TensorT<T>(const std::vector<TensorT<T>>&)>& fwd,
    const std::function<std::vector<TensorT<T>>(const std::vector<TensorT<T>>&,
                                                const TensorT<T>&)>& bwd,
    std::vector<TensorT<T>> xs, Rng& rng) {
  TensorT<T> out0 = fwd(xs);
  TensorT<T> u(out0.shape);
  for (auto& e : u.data) e = static_cast<T>(rng.uniform(-1.0, 1.0));

  const std::vector<TensorT<T>> analytic = bwd(xs, u);

  auto loss = [&](const std::vector<TensorT<T>>& inputs) -> double {
    TensorT<T> y = fwd(inputs);
    double acc = 0;
    for (std::size_t i = 0; i < y.data.size(); ++i)
      acc += static_cast<double>(u.data[i]) * static_cast<double>(y.data[i]);
    return acc;
  };

  // step tuned per precision: h ~ eps^(1/3) balances truncation vs roundoff
  const double hbase = sizeof(T) == 8 ? 1e-4 : 1e-2;
  double max_rel = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    for (std::size_t i = 0; i < xs[k].data.size(); ++i) {
      const T saved = xs[k].data[i];
      const double h = hbase * std::max(1.0, std::abs(static_cast<double>(saved)));
      // use the steps as actually representable in T
      const T xplus = static_cast<T>(saved + h);
      const T xminus = static_cast<T>(saved - h);
      xs[k].data[i] = xplus;
      const double lp = loss(xs);
      xs[k].data[i] = xminus;
      const double lm = loss(xs);
      xs[k].data[i] = saved;
      const double span = static_cast<double>(xplus) - static_cast<double>(xminus);
      const double numeric = (lp - lm) / span;
      const double a = analytic[k].data[i];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

// 32-bit mode check: the analytic gradient comes from the float path under
// test, the numeric reference from central differences of the same op
// instantiated in double (float forward noise would otherwise swamp small
// gradient elements).
inline double grad_check_mixed(
    const std::function<TensorT<double>(const std::vector<TensorT<double>>&)>& fwd64,
    const std::function<std::vector<TensorT<float>>(const std::vector<TensorT<float>>&,
                                                    const TensorT<float>&)>& bwd32,
    const std::vector<TensorT<float>>& xs32, Rng& rng) {
  std::vector<TensorT<double>> xs64;
  for (const auto& x : xs32) {
    TensorT<double> d(x.shape);
    for (std::size_t i = 0; i < x.data.size(); ++i) d.data[i] = x.data[i];
    xs64.push_back(std::move(d));
  }
  TensorT<double> out0 = fwd64(xs64);
  TensorT<float> u32(std::array<int64_t, 5>{out0.shape});
  TensorT<double> u64(out0.shape);
  for (std::size_t i = 0; i < u64.data.size(); ++i) {
    u32.data[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
    u64.data[i] = u32.data[i];
  }
  const std::vector<TensorT<float>> analytic = bwd32(xs32, u32);

  auto loss = [&](const std::vector<TensorT<double>>& inputs) -> double {
    TensorT<double> y = fwd64(inputs);
    double acc = 0;
    for (std::size_t i = 0; i < y.data.size(); ++i) acc += u64.data[i] * y.data[i];
    return acc;
  };

  double max_rel = 0;
  for (std::size_t k = 0; k < xs64.size(); ++k) {
    for (std::size_t i = 0; i < xs64[k].data.size(); ++i) {
      const double saved = xs64[k].data[i];
      const double h = 1e-4 * std::max(1.0, std::abs(saved));
      xs64[k].data[i] = saved + h;
      const double lp = loss(xs64);
      xs64[k].data[i] = saved - h;
      const double lm = loss(xs64);
      xs64[k].data[i] = saved;
      const double numeric = (lp - lm) / (2 * h);
      const double a = analytic[k].data[i];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

template <typename T>
TensorT<T> random_tensor(std::array<int64_t, 5> shape, Rng& rng, double lo = -1.0,
                         double hi = 1.0) {
  TensorT<T> t(shape);
  for (auto& e : t.data) e = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

}  // namespace aaseg::nn

#endif
