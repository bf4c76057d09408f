#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aaseg/nnengine.hpp"
#include "aaseg/rng.hpp"

using namespace aaseg;
using namespace aaseg::nn;

namespace {

// Independent six-nested-loop reference convolution (kept deliberately naive).
template <typename T>
TensorT<T> conv3d_reference(const TensorT<T>& in, const TensorT<T>& w,
                            const std::vector<T>& bias, int64_t s, Pad3 pad) {
  const int64_t N = in.shape[0], Ci = in.shape[1];
  const int64_t D = in.shape[2], H = in.shape[3], W = in.shape[4];
  const int64_t Co = w.shape[0], kd = w.shape[2], kh = w.shape[3], kw = w.shape[4];
  TensorT<T> out({N, Co, (D + 2 * pad[0] - kd) / s + 1,
                  (H + 2 * pad[1] - kh) / s + 1, (W + 2 * pad[2] - kw) / s + 1});
  for (int64_t n = 0; n < N; ++n)
    for (int64_t co = 0; co < Co; ++co)
      for (int64_t od = 0; od < out.shape[2]; ++od)
        for (int64_t oh = 0; oh < out.shape[3]; ++oh)
          for (int64_t ow = 0; ow < out.shape[4]; ++ow) {
            T acc = bias.empty() ? T(0) : bias[static_cast<std::size_t>(co)];
            for (int64_t ci = 0; ci < Ci; ++ci)
              for (int64_t fd = 0; fd < kd; ++fd)
                for (int64_t fh = 0; fh < kh; ++fh)
                  for (int64_t fw = 0; fw < kw; ++fw) {
                    const int64_t id = od * s - pad[0] + fd;
                    const int64_t ih = oh * s - pad[1] + fh;
                    const int64_t iw = ow * s - pad[2] + fw;
                    if (id < 0 || id >= D || ih < 0 || ih >= H || iw < 0 || iw >= W)
                      continue;
                    acc += in.at(n, ci, id, ih, iw) * w.at(co, ci, fd, fh, fw);
                  }
            out.at(n, co, od, oh, ow) = acc;
          }
  return out;
}

template <typename T>
double dot(const TensorT<T>& a, const TensorT<T>& b) {
  double acc = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    acc += static_cast<double>(a.data[i]) * static_cast<double>(b.data[i]);
  return acc;
}

}  // namespace

TEST_CASE("conv3d scalar and identity cases") {
  Tensor5 in({1, 1, 1, 1, 1});
  in.data[0] = 3.0f;
  Tensor5 w({1, 1, 1, 1, 1});
  w.data[0] = 2.0f;
  Tensor5 out = conv3d(in, w, {0.0f}, 1, {0, 0, 0});
  CHECK(out.data[0] == doctest::Approx(6.0f));

  Rng rng(1);
  Tensor5 x = random_tensor<float>({1, 1, 3, 4, 5}, rng);
  Tensor5 id({1, 1, 1, 1, 1});
  id.data[0] = 1.0f;
  Tensor5 y = conv3d(x, id, std::vector<float>{0.0f}, 1, {0, 0, 0});
  for (std::size_t i = 0; i < x.data.size(); ++i)
    CHECK(y.data[i] == doctest::Approx(x.data[i]));
}

TEST_CASE("conv3d matches naive reference on random instances") {
  Rng rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    const int64_t Ci = rng.uniform_int(1, 3), Co = rng.uniform_int(1, 3);
    const int64_t k = rng.uniform_int(1, 3);
    const int64_t s = rng.uniform_int(1, 2);
    const int64_t p = rng.uniform_int(0, 1);
    const int64_t D = rng.uniform_int(k, 5), H = rng.uniform_int(k, 6),
                  W = rng.uniform_int(k, 6);
    Tensor5 in = random_tensor<float>({1, Ci, D, H, W}, rng);
    Tensor5 w = random_tensor<float>({Co, Ci, k, k, k}, rng);
    std::vector<float> b;
    for (int64_t c = 0; c < Co; ++c) b.push_back(rng.uniformf(-1, 1));
    Tensor5 got = conv3d(in, w, b, s, {p, p, p});
    Tensor5 want = conv3d_reference(in, w, b, s, {p, p, p});
    REQUIRE(got.shape == want.shape);
    for (std::size_t i = 0; i < got.data.size(); ++i)
      CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-5));
  }
}

TEST_CASE("conv3d backward matches finite differences (64-bit)") {
  Rng rng(5);
  for (int seed = 0; seed < 20; ++seed) {
    Tensor5d in = random_tensor<double>({1, 2, 3, 3, 3}, rng);
    Tensor5d w = random_tensor<double>({2, 2, 2, 2, 2}, rng);
    auto fwd = [](const std::vector<Tensor5d>& xs) {
      return conv3d_core(xs[0], xs[1], 1, {1, 1, 1});
    };
    auto bwd = [](const std::vector<Tensor5d>& xs, const Tensor5d& u) {
      auto g = conv3d_backward(u, xs[0], xs[1], 1, {1, 1, 1});
      return std::vector<Tensor5d>{g.input, g.weight};
    };
    double err = grad_check<double>(fwd, bwd, {in, w}, rng);
    CHECK(err < 1e-5);
  }
}

TEST_CASE("conv3d rejects bad shapes") {
  Tensor5 in({1, 2, 3, 3, 3});
  Tensor5 w({1, 3, 2, 2, 2});  // Cin mismatch
  CHECK_THROWS_AS(conv3d(in, w, {}, 1, {0, 0, 0}), Error);
  Tensor5 w2({1, 2, 5, 5, 5});  // kernel larger than padded input
  CHECK_THROWS_AS(conv3d(in, w2, {}, 1, {0, 0, 0}), Error);
}

TEST_CASE("maxpool3d values, ties and gradient routing") {
  // constant input: tie broken to lowest flat index
  Tensor5 c({1, 1, 2, 2, 2}, 1.0f);
  auto r = maxpool3d(c);
  CHECK(r.out.numel() == 1);
  CHECK(r.out.data[0] == 1.0f);
  CHECK(r.argmax[0] == 0);

  Tensor5 blk({1, 1, 2, 2, 2});
  for (int i = 0; i < 8; ++i) blk.data[i] = static_cast<float>(i);
  r = maxpool3d(blk);
  CHECK(r.out.data[0] == 7.0f);

  Rng rng(9);
  Tensor5 x = random_tensor<float>({1, 1, 4, 4, 4}, rng);
  r = maxpool3d(x);
  // brute-force window max
  for (int64_t od = 0; od < 2; ++od)
    for (int64_t oh = 0; oh < 2; ++oh)
      for (int64_t ow = 0; ow < 2; ++ow) {
        float best = -1e30f;
        for (int64_t a = 0; a < 2; ++a)
          for (int64_t b = 0; b < 2; ++b)
            for (int64_t cc = 0; cc < 2; ++cc)
              best = std::max(best,
                              x.at(0, 0, 2 * od + a, 2 * oh + b, 2 * ow + cc));
        CHECK(r.out.at(0, 0, od, oh, ow) == best);
      }

  // gradient mass conserved
  Tensor5 gout(r.out.shape);
  for (auto& e : gout.data) e = rng.uniformf(-1, 1);
  Tensor5 gin = maxpool3d_backward(gout, r.argmax, x.shape);
  double sg = 0, so = 0;
  for (float e : gin.data) sg += e;
  for (float e : gout.data) so += e;
  CHECK(sg == doctest::Approx(so).epsilon(1e-6));

  CHECK_THROWS_AS(maxpool3d(Tensor5({1, 1, 1, 4, 4})), Error);
}

TEST_CASE("conv_transpose3d kernel stamp and zero input") {
  Tensor5 in({1, 1, 1, 1, 1});
  in.data[0] = 1.0f;
  Tensor5 w({1, 1, 2, 2, 2}, 1.0f);
  Tensor5 out = conv_transpose3d(in, w, 2, {0, 0, 0});
  CHECK(out.shape == std::array<int64_t, 5>{1, 1, 2, 2, 2});
  for (float v : out.data) CHECK(v == doctest::Approx(1.0f));

  Tensor5 z({1, 1, 2, 2, 2});
  out = conv_transpose3d(z, w, 2, {0, 0, 0});
  for (float v : out.data) CHECK(v == 0.0f);
}

TEST_CASE("conv/convT adjoint identity") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int64_t Ci = rng.uniform_int(1, 2), Co = rng.uniform_int(1, 2);
    const int64_t k = rng.uniform_int(2, 3), s = rng.uniform_int(1, 2);
    const int64_t p = rng.uniform_int(0, 1);
    const int64_t D = rng.uniform_int(k + 1, 5), H = rng.uniform_int(k + 1, 5),
                  W = rng.uniform_int(k + 1, 5);
    if ((D + 2 * p - k) / s + 1 <= 0) continue;
    Tensor5d x = random_tensor<double>({1, Ci, D, H, W}, rng);
    Tensor5d w = random_tensor<double>({Co, Ci, k, k, k}, rng);
    Tensor5d y_space = conv3d_core(x, w, s, {p, p, p});
    Tensor5d y(y_space.shape);
    for (auto& e : y.data) e = rng.uniform(-1, 1);
    Tensor5d xt = conv3d_input_grad_core(y, w, s, {p, p, p}, x.shape);
    CHECK(dot(y_space, y) == doctest::Approx(dot(x, xt)).epsilon(1e-9));
  }
}

TEST_CASE("conv_transpose3d backward matches finite differences") {
  Rng rng(23);
  for (int seed = 0; seed < 20; ++seed) {
    Tensor5d in = random_tensor<double>({1, 2, 2, 2, 2}, rng);
    Tensor5d w = random_tensor<double>({2, 1, 4, 4, 4}, rng);
    auto fwd = [](const std::vector<Tensor5d>& xs) {
      return conv_transpose3d(xs[0], xs[1], 2, {1, 1, 1});
    };
    auto bwd = [](const std::vector<Tensor5d>& xs, const Tensor5d& u) {
      auto g = conv_transpose3d_backward(u, xs[0], xs[1], 2, {1, 1, 1});
      return std::vector<Tensor5d>{g.input, g.weight};
    };
    CHECK(grad_check<double>(fwd, bwd, {in, w}, rng) < 1e-5);
  }
}

TEST_CASE("relu and sigmoid point values") {
  Tensor5 x({1, 1, 1, 1, 3});
  x.data = {-1.0f, 0.0f, 2.0f};
  Tensor5 r = relu(x);
  CHECK(r.data[0] == 0.0f);
  CHECK(r.data[1] == 0.0f);
  CHECK(r.data[2] == 2.0f);

  Tensor5 s = sigmoid(Tensor5({1, 1, 1, 1, 1}));
  CHECK(s.data[0] == doctest::Approx(0.5f));
}

TEST_CASE("sigmoid gradient at 0 is 0.25 and matches finite differences") {
  Tensor5d x({1, 1, 1, 1, 1});
  Tensor5d y = sigmoid(x);
  Tensor5d one({1, 1, 1, 1, 1}, 1.0);
  Tensor5d g = sigmoid_backward(one, y);
  CHECK(g.data[0] == doctest::Approx(0.25).epsilon(1e-12));

  const double h = 1e-6;
  Tensor5d xp = x, xm = x;
  xp.data[0] += h;
  xm.data[0] -= h;
  double numeric = (sigmoid(xp).data[0] - sigmoid(xm).data[0]) / (2 * h);
  CHECK(g.data[0] == doctest::Approx(numeric).epsilon(1e-6));
}

TEST_CASE("relu gradient away from the kink") {
  Rng rng(31);
  for (int seed = 0; seed < 20; ++seed) {
    Tensor5d x = random_tensor<double>({1, 1, 2, 3, 3}, rng);
    for (auto& e : x.data)
      while (std::abs(e) < 1e-3) e = rng.uniform(-1, 1);
    auto fwd = [](const std::vector<Tensor5d>& xs) { return relu(xs[0]); };
    auto bwd = [](const std::vector<Tensor5d>& xs, const Tensor5d& u) {
      return std::vector<Tensor5d>{relu_backward(u, xs[0])};
    };
    CHECK(grad_check<double>(fwd, bwd, {x}, rng) < 1e-6);
  }
}

TEST_CASE("elementwise_add semantics and exact gradient") {
  Rng rng(13);
  Tensor5 a = random_tensor<float>({1, 2, 2, 2, 2}, rng);
  Tensor5 zero(a.shape);
  Tensor5 sum = elementwise_add(a, zero);
  for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(sum.data[i] == a.data[i]);

  Tensor5 b = random_tensor<float>({1, 2, 2, 2, 2}, rng);
  sum = elementwise_add(a, b);
  for (std::size_t i = 0; i < a.data.size(); ++i)
    CHECK(sum.data[i] == a.data[i] + b.data[i]);

  CHECK_THROWS_AS(elementwise_add(a, Tensor5({1, 1, 2, 2, 2})), Error);

  // linear op: gradient check is exact to machine precision
  Tensor5d ad = random_tensor<double>({1, 1, 2, 2, 2}, rng);
  Tensor5d bd = random_tensor<double>({1, 1, 2, 2, 2}, rng);
  auto fwd = [](const std::vector<Tensor5d>& xs) {
    return elementwise_add(xs[0], xs[1]);
  };
  auto bwd = [](const std::vector<Tensor5d>&, const Tensor5d& u) {
    return std::vector<Tensor5d>{u, u};
  };
  CHECK(grad_check<double>(fwd, bwd, {ad, bd}, rng) < 1e-9);
}

TEST_CASE("adam first steps") {
  Parameter p("w", {1, 1, 1, 1, 1});
  p.value.data[0] = 0.5f;

  // zero gradient: value unchanged, counter advances
  adam_step({&p}, 1e-4);
  CHECK(p.value.data[0] == 0.5f);
  CHECK(p.t == 1);

  // constant gradient: bias correction makes mhat/sqrt(vhat) = sign(g)
  Parameter q("w", {1, 1, 1, 1, 1});
  q.value.data[0] = 1.0f;
  q.grad.data[0] = 0.7f;
  adam_step({&q}, 1e-3);
  CHECK(q.value.data[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-4));

  // two steps at constant grad 1 move by about 2*lr
  Parameter r("w", {1, 1, 1, 1, 1});
  r.grad.data[0] = 1.0f;
  adam_step({&r}, 1e-4);
  adam_step({&r}, 1e-4);
  CHECK(r.value.data[0] == doctest::Approx(-2e-4).epsilon(1e-3));
}

TEST_CASE("adam against independent scalar oracle") {
  // hand-rolled Adam recurrence in double
  double m = 0, v = 0, x = 0.3;
  const double lr = 1e-2, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  Parameter p("w", {1, 1, 1, 1, 1});
  p.value.data[0] = 0.3f;
  Rng rng(77);
  for (int t = 1; t <= 25; ++t) {
    double g = rng.uniform(-1, 1);
    p.grad.data[0] = static_cast<float>(g);
    adam_step({&p}, lr);
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    x -= lr * (m / (1 - std::pow(b1, t))) / (std::sqrt(v / (1 - std::pow(b2, t))) + eps);
  }
  CHECK(p.value.data[0] == doctest::Approx(x).epsilon(1e-4));
}

TEST_CASE("adam rejects non-finite gradients") {
  Parameter p("stage1.conv0.w", {1, 1, 1, 1, 1});
  p.grad.data[0] = std::numeric_limits<float>::infinity();
  CHECK_THROWS_WITH_AS(adam_step({&p}, 1e-4),
                       doctest::Contains("stage1.conv0.w"), Error);
}

TEST_CASE("plateau schedule state machine") {
  PlateauSchedule s;
  s.patience = 3;

  // strictly improving: rate untouched
  double loss = 1.0;
  for (int i = 0; i < 10; ++i) {
    CHECK(s.step(loss) == doctest::Approx(1e-4));
    loss -= 0.01;
  }

  // four non-improving epochs with patience 3: one decay to 2e-5
  PlateauSchedule s2;
  s2.patience = 3;
  s2.step(0.5);
  for (int i = 0; i < 4; ++i) s2.step(0.5);
  CHECK(s2.rate == doctest::Approx(2e-5));

  // floor is sticky
  PlateauSchedule s3;
  s3.patience = 1;
  s3.rate = 1e-6;
  for (int i = 0; i < 5; ++i) s3.step(1.0);
  CHECK(s3.rate == doctest::Approx(1e-6));
}

TEST_CASE("gradient checks in 32-bit mode stay under 1e-3") {
  Rng rng(101);
  for (int seed = 0; seed < 20; ++seed) {
    Tensor5 in = random_tensor<float>({1, 2, 3, 3, 3}, rng);
    Tensor5 w = random_tensor<float>({2, 2, 2, 2, 2}, rng);
    auto fwd64 = [](const std::vector<Tensor5d>& xs) {
      return conv3d_core(xs[0], xs[1], 1, {1, 1, 1});
    };
    auto bwd32 = [](const std::vector<Tensor5>& xs, const Tensor5& u) {
      auto g = conv3d_backward(u, xs[0], xs[1], 1, {1, 1, 1});
      return std::vector<Tensor5>{g.input, g.weight};
    };
    CHECK(grad_check_mixed(fwd64, bwd32, {in, w}, rng) < 1e-3);
  }
}
