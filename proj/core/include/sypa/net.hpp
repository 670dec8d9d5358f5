#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "json.hpp"
#include "sypa/error.hpp"
#include "sypa/rng.hpp"
#include "sypa/tensor.hpp"

namespace sypa {

// Encoder/decoder hyperparameters. The reference architecture is a residual
// U-Net over anisotropic patches: in-plane-only pooling, full-resolution
// levels use flat (1,3,3) kernels, deeper levels (3,3,3), and upsampling is a
// nearest-neighbour resize followed by a convolution.
struct NetConfig {
  int in_channels = 2;
  int out_channels = 2;
  int width = 8;  // feature channels at full resolution; doubles per level
  int depth = 2;  // number of pool/upsample levels
  std::uint64_t seed = 1;
};

inline void to_json(nlohmann::json& j, const NetConfig& c) {
  j = nlohmann::json{{"in_channels", c.in_channels},
                     {"out_channels", c.out_channels},
                     {"width", c.width},
                     {"depth", c.depth},
                     {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, NetConfig& c) {
  c.in_channels = j.at("in_channels").get<int>();
  c.out_channels = j.at("out_channels").get<int>();
  c.width = j.at("width").get<int>();
  c.depth = j.at("depth").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
}

inline double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

// One learnable array with its gradient and Adam moments.
template <class T>
struct ParamBlock {
  std::string name;
  std::vector<T> w, g, m, v;

  void resize(const std::string& n, std::size_t count) {
    name = n;
    w.assign(count, T(0));
    g.assign(count, T(0));
    m.assign(count, T(0));
    v.assign(count, T(0));
  }
};

namespace detail {

template <class T>
using MatrixRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MapRM = Eigen::Map<MatrixRM<T>>;
template <class T>
using ConstMapRM = Eigen::Map<const MatrixRM<T>>;

template <class T>
inline void relu_inplace(Tensor<T>& t) {
  for (T& v : t.data)
    if (v < T(0)) v = T(0);
}

// d(pre-activation) = d(post) where the activation fired, else 0.
template <class T>
inline void relu_backward_inplace(Tensor<T>& grad, const Tensor<T>& activated) {
  for (std::size_t i = 0; i < grad.data.size(); ++i)
    if (activated.data[i] <= T(0)) grad.data[i] = T(0);
}

}  // namespace detail

// Same-padded stride-1 3D convolution, evaluated as im2col + GEMM.
template <class T>
struct Conv3d {
  int ic = 0, oc = 0, kz = 1, ky = 3, kx = 3;
  ParamBlock<T> weight;  // (oc, ic, kz, ky, kx) row-major
  ParamBlock<T> bias;    // (oc)

  void init(const std::string& name, int ic_, int oc_, int kz_, int ky_, int kx_,
            Rng& rng) {
    ic = ic_;
    oc = oc_;
    kz = kz_;
    ky = ky_;
    kx = kx_;
    weight.resize(name + ".w", static_cast<std::size_t>(oc) * ic * kz * ky * kx);
    bias.resize(name + ".b", static_cast<std::size_t>(oc));
    const double stddev = std::sqrt(2.0 / (static_cast<double>(ic) * kz * ky * kx));
    for (T& v : weight.w) v = static_cast<T>(stddev * rng.normal());
  }

  std::size_t k_rows() const { return static_cast<std::size_t>(ic) * kz * ky * kx; }

  // col is (k_rows × spatial) row-major; each kernel-offset row is a shifted,
  // zero-padded copy of one input channel.
  void im2col(const Tensor<T>& in, T* col) const {
    const int Z = in.z, Y = in.y, X = in.x;
    const std::size_t n = in.spatial();
    const int pz = kz / 2, py = ky / 2, px = kx / 2;
    std::size_t r = 0;
    for (int ci = 0; ci < ic; ++ci) {
      for (int dz = 0; dz < kz; ++dz) {
        for (int dy = 0; dy < ky; ++dy) {
          for (int dx = 0; dx < kx; ++dx, ++r) {
            T* row = col + r * n;
            const int oz = dz - pz, oy = dy - py, ox = dx - px;
            const int x_lo = std::max(0, -ox), x_hi = std::min(X, X - ox);
            for (int zz = 0; zz < Z; ++zz) {
              const int sz = zz + oz;
              for (int yy = 0; yy < Y; ++yy) {
                const int sy = yy + oy;
                T* dst = row + (static_cast<std::size_t>(zz) * Y + yy) * X;
                if (sz < 0 || sz >= Z || sy < 0 || sy >= Y || x_hi <= x_lo) {
                  std::fill(dst, dst + X, T(0));
                  continue;
                }
                if (x_lo > 0) std::fill(dst, dst + x_lo, T(0));
                if (x_hi < X) std::fill(dst + x_hi, dst + X, T(0));
                std::memcpy(dst + x_lo, &in.data[in.index(ci, sz, sy, x_lo + ox)],
                            sizeof(T) * static_cast<std::size_t>(x_hi - x_lo));
              }
            }
          }
        }
      }
    }
  }

  // Transpose of im2col: scatter-add col rows back into an input-shaped grad.
  void col2im_add(const T* col, Tensor<T>& din) const {
    const int Z = din.z, Y = din.y, X = din.x;
    const std::size_t n = din.spatial();
    const int pz = kz / 2, py = ky / 2, px = kx / 2;
    std::size_t r = 0;
    for (int ci = 0; ci < ic; ++ci) {
      for (int dz = 0; dz < kz; ++dz) {
        for (int dy = 0; dy < ky; ++dy) {
          for (int dx = 0; dx < kx; ++dx, ++r) {
            const T* row = col + r * n;
            const int oz = dz - pz, oy = dy - py, ox = dx - px;
            const int x_lo = std::max(0, -ox), x_hi = std::min(X, X - ox);
            if (x_hi <= x_lo) continue;
            for (int zz = 0; zz < Z; ++zz) {
              const int sz = zz + oz;
              if (sz < 0 || sz >= Z) continue;
              for (int yy = 0; yy < Y; ++yy) {
                const int sy = yy + oy;
                if (sy < 0 || sy >= Y) continue;
                const T* src = row + (static_cast<std::size_t>(zz) * Y + yy) * X;
                T* acc = &din.data[din.index(ci, sz, sy, ox)];
                for (int xx = x_lo; xx < x_hi; ++xx) acc[xx] += src[xx];
              }
            }
          }
        }
      }
    }
  }

  void forward(const Tensor<T>& in, Tensor<T>& out, std::vector<T>& col_buf) {
    if (in.c != ic) fail("shape mismatch", "conv input channels " + std::to_string(in.c));
    const std::size_t k = k_rows(), n = in.spatial();
    out.ensure(oc, in.z, in.y, in.x);
    col_buf.resize(k * n);
    im2col(in, col_buf.data());
    detail::ConstMapRM<T> w(weight.w.data(), oc, static_cast<Eigen::Index>(k));
    detail::ConstMapRM<T> c(col_buf.data(), static_cast<Eigen::Index>(k),
                            static_cast<Eigen::Index>(n));
    detail::MapRM<T> o(out.data.data(), oc, static_cast<Eigen::Index>(n));
    o.noalias() = w * c;
    for (int i = 0; i < oc; ++i) o.row(i).array() += bias.w[static_cast<std::size_t>(i)];
  }

  // Accumulates parameter gradients; when din != nullptr, overwrites it with
  // the input gradient. The input column matrix is recomputed rather than
  // cached so one scratch buffer serves every layer.
  void backward(const Tensor<T>& in, const Tensor<T>& dout, Tensor<T>* din,
                std::vector<T>& col_buf, std::vector<T>& dcol_buf) {
    const std::size_t k = k_rows(), n = in.spatial();
    col_buf.resize(k * n);
    im2col(in, col_buf.data());
    detail::ConstMapRM<T> c(col_buf.data(), static_cast<Eigen::Index>(k),
                            static_cast<Eigen::Index>(n));
    detail::ConstMapRM<T> cdout(dout.data.data(), oc, static_cast<Eigen::Index>(n));
    detail::MapRM<T> dw(weight.g.data(), oc, static_cast<Eigen::Index>(k));
    dw.noalias() += cdout * c.transpose();
    // Fixed-order accumulation: Eigen's vectorized sum() peels to the first
    // aligned element, so its rounding depends on where the buffer landed and
    // same-seed runs would drift in the low bits.
    for (int i = 0; i < oc; ++i) {
      const T* row = dout.data.data() + static_cast<std::size_t>(i) * n;
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += static_cast<double>(row[j]);
      bias.g[static_cast<std::size_t>(i)] += static_cast<T>(s);
    }
    if (din != nullptr) {
      dcol_buf.resize(k * n);
      detail::ConstMapRM<T> w(weight.w.data(), oc, static_cast<Eigen::Index>(k));
      detail::MapRM<T> dc(dcol_buf.data(), static_cast<Eigen::Index>(k),
                          static_cast<Eigen::Index>(n));
      dc.noalias() = w.transpose() * cdout;
      din->ensure(in.c, in.z, in.y, in.x);
      din->zero();
      col2im_add(dcol_buf.data(), *din);
    }
  }
};

// In-plane 2×2 max pooling (z untouched; the patch is anisotropic).
template <class T>
struct MaxPool22 {
  std::vector<std::size_t> argmax;
  int in_c = 0, in_z = 0, in_y = 0, in_x = 0;

  void forward(const Tensor<T>& in, Tensor<T>& out) {
    if (in.y % 2 != 0 || in.x % 2 != 0)
      fail("incompatible depth", "in-plane extent not divisible by pooling factor");
    in_c = in.c;
    in_z = in.z;
    in_y = in.y;
    in_x = in.x;
    out.ensure(in.c, in.z, in.y / 2, in.x / 2);
    argmax.resize(out.size());
    std::size_t o = 0;
    for (int ci = 0; ci < in.c; ++ci) {
      for (int zz = 0; zz < in.z; ++zz) {
        for (int yy = 0; yy < in.y; yy += 2) {
          for (int xx = 0; xx < in.x; xx += 2, ++o) {
            std::size_t best = in.index(ci, zz, yy, xx);
            for (int dy = 0; dy < 2; ++dy) {
              for (int dx = 0; dx < 2; ++dx) {
                const std::size_t i = in.index(ci, zz, yy + dy, xx + dx);
                if (in.data[i] > in.data[best]) best = i;
              }
            }
            out.data[o] = in.data[best];
            argmax[o] = best;
          }
        }
      }
    }
  }

  void backward(const Tensor<T>& dout, Tensor<T>& din) {
    din.ensure(in_c, in_z, in_y, in_x);
    din.zero();
    for (std::size_t o = 0; o < dout.size(); ++o) din.data[argmax[o]] += dout.data[o];
  }
};

// In-plane nearest-neighbour 2× upsample.
template <class T>
struct Upsample22 {
  void forward(const Tensor<T>& in, Tensor<T>& out) const {
    out.ensure(in.c, in.z, in.y * 2, in.x * 2);
    for (int ci = 0; ci < in.c; ++ci) {
      for (int zz = 0; zz < in.z; ++zz) {
        for (int yy = 0; yy < in.y; ++yy) {
          const T* src = &in.data[in.index(ci, zz, yy, 0)];
          for (int half = 0; half < 2; ++half) {
            T* dst = &out.data[out.index(ci, zz, 2 * yy + half, 0)];
            for (int xx = 0; xx < in.x; ++xx) {
              dst[2 * xx] = src[xx];
              dst[2 * xx + 1] = src[xx];
            }
          }
        }
      }
    }
  }

  void backward(const Tensor<T>& dout, Tensor<T>& din) const {
    din.ensure(dout.c, dout.z, dout.y / 2, dout.x / 2);
    for (int ci = 0; ci < din.c; ++ci) {
      for (int zz = 0; zz < din.z; ++zz) {
        for (int yy = 0; yy < din.y; ++yy) {
          T* acc = &din.data[din.index(ci, zz, yy, 0)];
          for (int xx = 0; xx < din.x; ++xx) {
            T s = T(0);
            for (int half = 0; half < 2; ++half) {
              const T* src = &dout.data[dout.index(ci, zz, 2 * yy + half, 2 * xx)];
              s += src[0] + src[1];
            }
            acc[xx] = s;
          }
        }
      }
    }
  }
};

// Two-convolution residual block with identity skip:
//   out = relu(x + conv2(relu(conv1(x)))).
template <class T>
struct ResBlock {
  Conv3d<T> conv1, conv2;
  Tensor<T> h1, out;  // forward caches (h1 post-activation)
  Tensor<T> dsum, dh1, dx_conv;

  void init(const std::string& name, int channels, int kz, Rng& rng) {
    conv1.init(name + ".conv1", channels, channels, kz, 3, 3, rng);
    conv2.init(name + ".conv2", channels, channels, kz, 3, 3, rng);
  }

  const Tensor<T>& forward(const Tensor<T>& x, std::vector<T>& col_buf) {
    conv1.forward(x, h1, col_buf);
    detail::relu_inplace(h1);
    conv2.forward(h1, out, col_buf);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += x.data[i];
    detail::relu_inplace(out);
    return out;
  }

  void backward(const Tensor<T>& x, const Tensor<T>& dout, Tensor<T>& dx,
                std::vector<T>& col_buf, std::vector<T>& dcol_buf) {
    dsum = dout;
    detail::relu_backward_inplace(dsum, out);
    conv2.backward(h1, dsum, &dh1, col_buf, dcol_buf);
    detail::relu_backward_inplace(dh1, h1);
    conv1.backward(x, dh1, &dx_conv, col_buf, dcol_buf);
    dx.ensure(x.c, x.z, x.y, x.x);
    for (std::size_t i = 0; i < dx.data.size(); ++i)
      dx.data[i] = dx_conv.data[i] + dsum.data[i];
  }
};

// Residual U-Net over (c, z, y, x) patches. Pooling and upsampling act
// in-plane only; level 0 uses flat kernels, deeper levels full 3D kernels.
// Output spatial shape always equals input spatial shape.
template <class T>
struct UNet {
  NetConfig config;

  Conv3d<T> conv_in;
  ResBlock<T> enc0;
  struct DownLevel {
    MaxPool22<T> pool;
    Conv3d<T> down;
    ResBlock<T> res;
    Tensor<T> pooled, downed;
  };
  struct UpLevel {
    Upsample22<T> up;
    Conv3d<T> conv;
    ResBlock<T> res;
    Tensor<T> upsampled, conved, sum;
  };
  std::vector<DownLevel> downs;  // levels 1..depth
  std::vector<UpLevel> ups;      // processed deepest-first; ups[k] is level depth-1-k
  Conv3d<T> conv_out;

  Tensor<T> a0, y_out;
  std::vector<Tensor<T>> d_enc;  // gradient w.r.t. each encoder output
  Tensor<T> d_cur, d_next, d_tmp;
  std::vector<T> col_buf, dcol_buf;

  static int level_kz(int level) { return level == 0 ? 1 : 3; }

  void init(const NetConfig& cfg) {
    config = cfg;
    Rng rng(cfg.seed);
    const int w0 = cfg.width;
    conv_in.init("conv_in", cfg.in_channels, w0, 1, 3, 3, rng);
    enc0.init("enc0", w0, level_kz(0), rng);
    downs.clear();
    downs.resize(static_cast<std::size_t>(cfg.depth));
    for (int l = 1; l <= cfg.depth; ++l) {
      DownLevel& d = downs[static_cast<std::size_t>(l - 1)];
      const int ci = w0 << (l - 1), co = w0 << l;
      d.down.init("down" + std::to_string(l), ci, co, level_kz(l), 3, 3, rng);
      d.res.init("enc" + std::to_string(l), co, level_kz(l), rng);
    }
    ups.clear();
    ups.resize(static_cast<std::size_t>(cfg.depth));
    for (int k = 0; k < cfg.depth; ++k) {
      const int l = cfg.depth - 1 - k;  // level this stage restores
      UpLevel& u = ups[static_cast<std::size_t>(k)];
      const int ci = w0 << (l + 1), co = w0 << l;
      u.conv.init("up" + std::to_string(l), ci, co, 1, 3, 3, rng);
      u.res.init("dec" + std::to_string(l), co, level_kz(l), rng);
    }
    conv_out.init("conv_out", w0, cfg.out_channels, 1, 1, 1, rng);
    d_enc.resize(static_cast<std::size_t>(cfg.depth) + 1);
  }

  const Tensor<T>& encoder_out(int level) {
    return level == 0 ? enc0.out : downs[static_cast<std::size_t>(level - 1)].res.out;
  }

  const Tensor<T>& forward(const Tensor<T>& x) {
    if (x.c != config.in_channels) fail("shape mismatch", "wrong input channel count");
    const int factor = 1 << config.depth;
    if (x.y % factor != 0 || x.x % factor != 0)
      fail("incompatible depth",
           "in-plane extent not divisible by downsampling factor " +
               std::to_string(factor));
    conv_in.forward(x, a0, col_buf);
    const Tensor<T>* cur = &enc0.forward(a0, col_buf);
    for (auto& d : downs) {
      d.pool.forward(*cur, d.pooled);
      d.down.forward(d.pooled, d.downed, col_buf);
      detail::relu_inplace(d.downed);
      cur = &d.res.forward(d.downed, col_buf);
    }
    for (std::size_t k = 0; k < ups.size(); ++k) {
      UpLevel& u = ups[k];
      const int level = config.depth - 1 - static_cast<int>(k);
      u.up.forward(*cur, u.upsampled);
      u.conv.forward(u.upsampled, u.conved, col_buf);
      const Tensor<T>& skip = encoder_out(level);
      u.sum.ensure(u.conved.c, u.conved.z, u.conved.y, u.conved.x);
      for (std::size_t i = 0; i < u.sum.data.size(); ++i)
        u.sum.data[i] = u.conved.data[i] + skip.data[i];
      cur = &u.res.forward(u.sum, col_buf);
    }
    conv_out.forward(*cur, y_out, col_buf);
    return y_out;
  }

  // Accumulates parameter gradients for d(loss)/d(output) = dy. Must follow a
  // forward pass on the same input x.
  void backward(const Tensor<T>& x, const Tensor<T>& dy) {
    for (auto& d : d_enc) {
      d.ensure(0, 0, 0, 0);
    }
    const Tensor<T>& u_last = ups.empty() ? enc0.out : ups.back().res.out;
    conv_out.backward(u_last, dy, &d_cur, col_buf, dcol_buf);

    for (std::size_t k = ups.size(); k-- > 0;) {
      UpLevel& u = ups[k];
      const int level = config.depth - 1 - static_cast<int>(k);
      u.res.backward(u.sum, d_cur, d_tmp, col_buf, dcol_buf);
      // The sum joins the decoder branch and the encoder skip.
      Tensor<T>& skip_grad = d_enc[static_cast<std::size_t>(level)];
      skip_grad = d_tmp;
      u.conv.backward(u.upsampled, d_tmp, &d_next, col_buf, dcol_buf);
      u.up.backward(d_next, d_cur);
      if (k == 0) {
        d_enc[static_cast<std::size_t>(config.depth)] = d_cur;
      }
    }
    if (ups.empty()) d_enc[0] = d_cur;

    for (int l = config.depth; l >= 1; --l) {
      DownLevel& d = downs[static_cast<std::size_t>(l - 1)];
      Tensor<T>& grad = d_enc[static_cast<std::size_t>(l)];
      d.res.backward(d.downed, grad, d_tmp, col_buf, dcol_buf);
      detail::relu_backward_inplace(d_tmp, d.downed);
      d.down.backward(d.pooled, d_tmp, &d_next, col_buf, dcol_buf);
      d.pool.backward(d_next, d_cur);
      Tensor<T>& below = d_enc[static_cast<std::size_t>(l - 1)];
      if (below.size() == 0) {
        below = d_cur;
      } else {
        for (std::size_t i = 0; i < below.data.size(); ++i)
          below.data[i] += d_cur.data[i];
      }
    }
    enc0.backward(a0, d_enc[0], d_tmp, col_buf, dcol_buf);
    conv_in.backward(x, d_tmp, nullptr, col_buf, dcol_buf);
  }

  std::vector<ParamBlock<T>*> params() {
    std::vector<ParamBlock<T>*> out{&conv_in.weight, &conv_in.bias};
    auto add_res = [&out](ResBlock<T>& r) {
      out.push_back(&r.conv1.weight);
      out.push_back(&r.conv1.bias);
      out.push_back(&r.conv2.weight);
      out.push_back(&r.conv2.bias);
    };
    add_res(enc0);
    for (auto& d : downs) {
      out.push_back(&d.down.weight);
      out.push_back(&d.down.bias);
      add_res(d.res);
    }
    for (auto& u : ups) {
      out.push_back(&u.conv.weight);
      out.push_back(&u.conv.bias);
      add_res(u.res);
    }
    out.push_back(&conv_out.weight);
    out.push_back(&conv_out.bias);
    return out;
  }

  void zero_grad() {
    for (ParamBlock<T>* p : params()) std::fill(p->g.begin(), p->g.end(), T(0));
  }

  std::size_t param_count() {
    std::size_t n = 0;
    for (ParamBlock<T>* p : params()) n += p->w.size();
    return n;
  }
};

// Validated construction: the canonical 18×80×80 window must survive the
// downsampling hierarchy.
template <class T>
UNet<T> build_network(const NetConfig& cfg) {
  if (cfg.in_channels < 1 || cfg.out_channels < 1 || cfg.width < 1)
    fail("bad params", "channel and width counts must be positive");
  if (cfg.depth < 1) fail("bad params", "depth must be at least 1");
  const int factor = 1 << cfg.depth;
  if (80 % factor != 0 || 80 / factor < 1)
    fail("incompatible depth",
         "80-voxel window not divisible by downsampling factor " + std::to_string(factor));
  UNet<T> net;
  net.init(cfg);
  return net;
}

// --- losses ---------------------------------------------------------------
// All losses are means over elements, computed on logits in the numerically
// stable form; gradients are with respect to the logits.

template <class T>
double bce_with_logits(const Tensor<T>& logits, const Tensor<T>& target,
                       Tensor<T>& grad) {
  if (!logits.same_shape(target)) fail("shape mismatch", "loss shapes differ");
  grad.ensure(logits.c, logits.z, logits.y, logits.x);
  const double inv_n = 1.0 / static_cast<double>(logits.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < logits.data.size(); ++i) {
    const double z = static_cast<double>(logits.data[i]);
    const double t = static_cast<double>(target.data[i]);
    loss += std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)));
    grad.data[i] = static_cast<T>((sigmoid(z) - t) * inv_n);
  }
  return loss * inv_n;
}

// Global-average-pool head: one logit = mean over voxels, then sigmoid.
template <class T>
double pooled_bce_with_logits(const Tensor<T>& logits, double label, Tensor<T>& grad,
                              double* probability = nullptr) {
  grad.ensure(logits.c, logits.z, logits.y, logits.x);
  double pooled = 0.0;
  for (const T& v : logits.data) pooled += static_cast<double>(v);
  pooled /= static_cast<double>(logits.size());
  const double p = sigmoid(pooled);
  if (probability != nullptr) *probability = p;
  const double g = (p - label) / static_cast<double>(logits.size());
  for (std::size_t i = 0; i < grad.data.size(); ++i) grad.data[i] = static_cast<T>(g);
  return std::max(pooled, 0.0) - pooled * label + std::log1p(std::exp(-std::abs(pooled)));
}

// Cross-entropy against targets in [-1, 1] through a tanh head: with
// tanh(z) = 2·sigmoid(2z) − 1, this is soft-target BCE on logits 2z.
template <class T>
double signed_bce_with_logits(const Tensor<T>& logits, const Tensor<T>& target,
                              Tensor<T>& grad) {
  if (!logits.same_shape(target)) fail("shape mismatch", "loss shapes differ");
  grad.ensure(logits.c, logits.z, logits.y, logits.x);
  const double inv_n = 1.0 / static_cast<double>(logits.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < logits.data.size(); ++i) {
    const double u = 2.0 * static_cast<double>(logits.data[i]);
    const double t = 0.5 * (static_cast<double>(target.data[i]) + 1.0);
    loss += std::max(u, 0.0) - u * t + std::log1p(std::exp(-std::abs(u)));
    grad.data[i] = static_cast<T>(2.0 * (sigmoid(u) - t) * inv_n);
  }
  return loss * inv_n;
}

}  // namespace sypa
