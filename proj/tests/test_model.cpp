#include <cmath>
#include <vector>

#include "doctest.h"
#include "sypa/net.hpp"
#include "sypa/rng.hpp"
#include "sypa/train.hpp"
#include "test_support.hpp"

using namespace sypa;

namespace {

// Direct same-padding convolution, the reference for the GEMM path.
template <class T>
Tensor<T> conv_reference(const Conv3d<T>& conv, const Tensor<T>& in) {
  Tensor<T> out(conv.oc, in.z, in.y, in.x);
  const int pz = conv.kz / 2, py = conv.ky / 2, px = conv.kx / 2;
  for (int o = 0; o < conv.oc; ++o) {
    for (int z = 0; z < in.z; ++z) {
      for (int y = 0; y < in.y; ++y) {
        for (int x = 0; x < in.x; ++x) {
          double acc = conv.bias.w[static_cast<std::size_t>(o)];
          for (int ci = 0; ci < conv.ic; ++ci) {
            for (int dz = 0; dz < conv.kz; ++dz) {
              for (int dy = 0; dy < conv.ky; ++dy) {
                for (int dx = 0; dx < conv.kx; ++dx) {
                  const int sz = z + dz - pz, sy = y + dy - py, sx = x + dx - px;
                  if (sz < 0 || sz >= in.z || sy < 0 || sy >= in.y || sx < 0 || sx >= in.x)
                    continue;
                  const std::size_t wi =
                      (((static_cast<std::size_t>(o) * conv.ic + ci) * conv.kz + dz) *
                           conv.ky +
                       dy) *
                          conv.kx +
                      dx;
                  acc += static_cast<double>(conv.weight.w[wi]) *
                         static_cast<double>(in.at(ci, sz, sy, sx));
                }
              }
            }
          }
          out.at(o, z, y, x) = static_cast<T>(acc);
        }
      }
    }
  }
  return out;
}

template <class T>
Tensor<T> random_tensor(Rng& rng, int c, int z, int y, int x) {
  Tensor<T> t(c, z, y, x);
  for (auto& v : t.data) v = static_cast<T>(rng.normal());
  return t;
}

double full_loss(UNet<double>& net, const Tensor<double>& input, const Tensor<double>& target,
                 LossKind kind) {
  const Tensor<double>& out = net.forward(input);
  Tensor<double> grad;
  switch (kind) {
    case LossKind::dense_bce:
      return bce_with_logits(out, target, grad);
    case LossKind::pooled_bce:
      return pooled_bce_with_logits(out, static_cast<double>(target.data[0]), grad);
    case LossKind::signed_bce:
      return signed_bce_with_logits(out, target, grad);
  }
  return 0.0;
}

// Analytic gradients for every parameter, via one forward/backward.
void compute_grads(UNet<double>& net, const Tensor<double>& input,
                   const Tensor<double>& target, LossKind kind) {
  net.zero_grad();
  const Tensor<double>& out = net.forward(input);
  Tensor<double> grad;
  switch (kind) {
    case LossKind::dense_bce:
      bce_with_logits(out, target, grad);
      break;
    case LossKind::pooled_bce:
      pooled_bce_with_logits(out, static_cast<double>(target.data[0]), grad);
      break;
    case LossKind::signed_bce:
      signed_bce_with_logits(out, target, grad);
      break;
  }
  net.backward(input, grad);
}

// Central finite differences on `samples` randomly chosen parameters.
void check_gradients(LossKind kind, int out_channels, const Tensor<double>& target_shape,
                     int samples, Rng& rng) {
  NetConfig cfg;
  cfg.in_channels = 2;
  cfg.out_channels = out_channels;
  cfg.width = 3;
  cfg.depth = 1;
  cfg.seed = 17;
  UNet<double> net = build_network<double>(cfg);

  const Tensor<double> input = random_tensor<double>(rng, 2, 3, 8, 8);
  Tensor<double> target = target_shape;

  compute_grads(net, input, target, kind);

  auto blocks = net.params();
  std::vector<double> analytic;
  struct Pick {
    ParamBlock<double>* block;
    std::size_t index;
  };
  std::vector<Pick> picks;
  for (int s = 0; s < samples; ++s) {
    ParamBlock<double>* block = blocks[rng.below(blocks.size())];
    const std::size_t i = rng.below(block->w.size());
    picks.push_back({block, i});
    analytic.push_back(block->g[i]);
  }

  const double h = 1e-5;
  for (std::size_t s = 0; s < picks.size(); ++s) {
    auto [block, i] = picks[s];
    const double saved = block->w[i];
    block->w[i] = saved + h;
    const double up = full_loss(net, input, target, kind);
    block->w[i] = saved - h;
    const double down = full_loss(net, input, target, kind);
    block->w[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[s]), 1e-8});
    REQUIRE(std::abs(numeric - analytic[s]) / scale <= 1e-3);
  }
}

}  // namespace

TEST_CASE("im2col convolution matches the direct reference") {
  Rng rng(42);
  for (const auto [kz, ky, kx] : {std::tuple{1, 3, 3}, std::tuple{3, 3, 3}}) {
    Conv3d<float> conv;
    Rng wrng(7);
    conv.init("c", 2, 3, kz, ky, kx, wrng);
    for (auto& b : conv.bias.w) b = static_cast<float>(wrng.normal());
    const Tensor<float> in = random_tensor<float>(rng, 2, 3, 5, 6);
    Tensor<float> out;
    std::vector<float> col;
    conv.forward(in, out, col);
    const Tensor<float> want = conv_reference(conv, in);
    REQUIRE(out.same_shape(want));
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out.data[i] == doctest::Approx(want.data[i]).epsilon(1e-4));
    }
  }
}

TEST_CASE("dense BCE: hand-computed values and zero-logit baseline") {
  Tensor<float> z(1, 1, 1, 2), t(1, 1, 1, 2);
  z.data = {0.0f, 0.0f};
  t.data = {0.0f, 1.0f};
  Tensor<float> grad;
  // any target against logit 0 costs ln 2
  CHECK(bce_with_logits(z, t, grad) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(grad.data[0] == doctest::Approx(0.25));   // (sigmoid(0) - 0) / 2
  CHECK(grad.data[1] == doctest::Approx(-0.25));  // (sigmoid(0) - 1) / 2

  z.data = {1.3f, -0.7f};
  const double manual = (-std::log(1.0 - 1.0 / (1.0 + std::exp(-1.3))) +
                         -std::log(1.0 / (1.0 + std::exp(0.7)))) /
                        2.0;
  t.data = {0.0f, 1.0f};
  CHECK(bce_with_logits(z, t, grad) == doctest::Approx(manual).epsilon(1e-6));
}

TEST_CASE("dense BCE stays finite at extreme logits") {
  Tensor<float> z(1, 1, 1, 2), t(1, 1, 1, 2), grad;
  z.data = {100.0f, -100.0f};
  t.data = {0.0f, 1.0f};
  const double loss = bce_with_logits(z, t, grad);
  CHECK(std::isfinite(loss));
  CHECK(loss == doctest::Approx(100.0).epsilon(1e-6));  // linear asymptote
}

TEST_CASE("dense BCE rejects mismatched shapes") {
  Tensor<float> z(1, 1, 1, 2), t(1, 1, 2, 1), grad;
  CHECK_ERROR_CODE(bce_with_logits(z, t, grad), "shape mismatch");
}

TEST_CASE("pooled BCE pools the logit before the sigmoid") {
  Tensor<float> z(1, 1, 2, 2);
  z.data = {1.0f, 2.0f, 3.0f, 4.0f};  // pooled logit 2.5
  Tensor<float> grad;
  double p = 0.0;
  const double loss = pooled_bce_with_logits(z, 1.0, grad, &p);
  CHECK(p == doctest::Approx(1.0 / (1.0 + std::exp(-2.5))).epsilon(1e-12));
  CHECK(loss == doctest::Approx(-std::log(p)).epsilon(1e-9));
  for (const float g : grad.data) {
    CHECK(g == doctest::Approx((p - 1.0) / 4.0).epsilon(1e-9));
  }
}

TEST_CASE("signed BCE equals soft-target BCE through the tanh identity") {
  // tanh(z) = 2 sigmoid(2z) - 1, so scoring tanh output t in [-1,1] equals
  // BCE of logit 2z against probability (t+1)/2.
  Tensor<float> z(1, 1, 1, 3), t(1, 1, 1, 3);
  z.data = {0.0f, 0.8f, -1.2f};
  t.data = {0.0f, 1.0f, -0.5f};
  Tensor<float> grad;
  const double got = signed_bce_with_logits(z, t, grad);

  Tensor<float> z2 = z, t2 = t;
  for (auto& v : z2.data) v *= 2.0f;
  for (auto& v : t2.data) v = 0.5f * (v + 1.0f);
  Tensor<float> grad2;
  const double want = bce_with_logits(z2, t2, grad2);
  CHECK(got == doctest::Approx(want).epsilon(1e-9));
  // chain rule d(2z)/dz doubles the per-logit gradient
  for (std::size_t i = 0; i < grad.size(); ++i) {
    CHECK(grad.data[i] == doctest::Approx(2.0f * grad2.data[i]).epsilon(1e-6));
  }
  // zero logit against neutral target costs ln 2
  Tensor<float> z0(1, 1, 1, 1), t0(1, 1, 1, 1);
  CHECK(signed_bce_with_logits(z0, t0, grad) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("finite differences confirm every parameter path (dense head)") {
  Rng rng(2026);
  Tensor<double> target(2, 3, 8, 8);
  for (auto& v : target.data) v = rng.real() < 0.3 ? 1.0 : 0.0;
  check_gradients(LossKind::dense_bce, 2, target, 24, rng);
}

TEST_CASE("finite differences confirm the pooled head") {
  Rng rng(2027);
  Tensor<double> target(1, 1, 1, 1);
  target.data[0] = 1.0;
  check_gradients(LossKind::pooled_bce, 1, target, 12, rng);
}

TEST_CASE("finite differences confirm the tanh head") {
  Rng rng(2028);
  Tensor<double> target(1, 3, 8, 8);
  for (auto& v : target.data) v = 2.0 * rng.real() - 1.0;
  check_gradients(LossKind::signed_bce, 1, target, 12, rng);
}

TEST_CASE("network output matches the window shape contract") {
  NetConfig cfg;  // 2 -> 2 channels at width 8, depth 2
  UNet<float> net = build_network<float>(cfg);
  Rng rng(5);
  const Tensor<float> in = random_tensor<float>(rng, 2, 18, 80, 80);
  const Tensor<float>& out = net.forward(in);
  CHECK(out.c == 2);
  CHECK(out.z == 18);
  CHECK(out.y == 80);
  CHECK(out.x == 80);
}

TEST_CASE("construction rejects depths the canonical window cannot survive") {
  NetConfig cfg;
  cfg.depth = 5;  // 80 / 2^5 is not integral
  CHECK_ERROR_CODE(build_network<float>(cfg), "incompatible depth");
  cfg.depth = 0;
  CHECK_ERROR_CODE(build_network<float>(cfg), "bad params");
  cfg.depth = 4;  // 80 -> 5, fine
  CHECK_NOTHROW(build_network<float>(cfg));
}

TEST_CASE("forward rejects windows that pool to odd extents") {
  NetConfig cfg;
  cfg.depth = 2;
  UNet<float> net = build_network<float>(cfg);
  Rng rng(6);
  const Tensor<float> in = random_tensor<float>(rng, 2, 2, 10, 10);  // 10 -> 5 -> odd
  CHECK_ERROR_CODE(net.forward(in), "incompatible depth");
  const Tensor<float> wrong_c = random_tensor<float>(rng, 3, 2, 8, 8);
  CHECK_ERROR_CODE(net.forward(wrong_c), "shape mismatch");
}

TEST_CASE("initialization is reproducible from the seed") {
  NetConfig cfg;
  UNet<float> a = build_network<float>(cfg);
  UNet<float> b = build_network<float>(cfg);
  cfg.seed = 2;
  UNet<float> c = build_network<float>(cfg);

  auto pa = a.params(), pb = b.params(), pc = c.params();
  REQUIRE(pa.size() == pb.size());
  bool all_equal_ab = true, any_diff_ac = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    all_equal_ab = all_equal_ab && pa[i]->w == pb[i]->w;
    any_diff_ac = any_diff_ac || pa[i]->w != pc[i]->w;
  }
  CHECK(all_equal_ab);
  CHECK(any_diff_ac);
  CHECK(a.param_count() > 20);
}

TEST_CASE("residual blocks change the representation") {
  // out = relu(x + conv2(relu(conv1(x)))): with freshly initialised convs the
  // block must neither be the identity nor collapse to zero on positive input.
  ResBlock<float> block;
  Rng rng(9);
  block.init("r", 4, 3, rng);
  Tensor<float> x(4, 2, 6, 6);
  for (auto& v : x.data) v = std::abs(static_cast<float>(rng.normal()));
  std::vector<float> col;
  const Tensor<float>& y = block.forward(x, col);
  REQUIRE(y.same_shape(x));
  bool differs = false;
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    differs = differs || std::abs(y.data[i] - x.data[i]) > 1e-6;
    sum += std::abs(y.data[i]);
  }
  CHECK(differs);
  CHECK(sum > 0.0);
  for (const float v : y.data) CHECK(v >= 0.0f);  // relu output
}
