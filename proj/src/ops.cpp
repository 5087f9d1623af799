#include "frxa/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Core>
#include <fmt/format.h>

namespace frxa {

template <typename T>
BatchNormState<T>::BatchNormState(const std::string& id_prefix, std::size_t channels)
    : gamma(id_prefix + ".gamma", Tensor<T>({1, channels, 1, 1}, T{1})),
      beta(id_prefix + ".beta", Tensor<T>({1, channels, 1, 1}, T{0})),
      running_mean(id_prefix + ".running_mean", Tensor<T>({1, channels, 1, 1}, T{0}), false),
      running_var(id_prefix + ".running_var", Tensor<T>({1, channels, 1, 1}, T{1}), false) {}

template struct BatchNormState<float>;
template struct BatchNormState<double>;

namespace ops {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

struct ConvGeometry {
  std::size_t cin, h, w, kh, kw, stride, pad, ho, wo;
  [[nodiscard]] std::size_t patch() const { return cin * kh * kw; }
  [[nodiscard]] std::size_t positions() const { return ho * wo; }
  [[nodiscard]] bool pointwise() const { return kh == 1 && kw == 1 && stride == 1 && pad == 0; }
};

template <typename T>
void im2col(const T* x, const ConvGeometry& g, T* col) {
  std::size_t row = 0;
  for (std::size_t ci = 0; ci < g.cin; ++ci) {
    const T* plane = x + ci * g.h * g.w;
    for (std::size_t ky = 0; ky < g.kh; ++ky) {
      for (std::size_t kx = 0; kx < g.kw; ++kx, ++row) {
        T* dst = col + row * g.positions();
        for (std::size_t oy = 0; oy < g.ho; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - static_cast<std::ptrdiff_t>(g.pad);
          T* out = dst + oy * g.wo;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) {
            std::fill(out, out + g.wo, T{0});
            continue;
          }
          const T* src = plane + static_cast<std::size_t>(iy) * g.w;
          for (std::size_t ox = 0; ox < g.wo; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - static_cast<std::ptrdiff_t>(g.pad);
            out[ox] = (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.w)) ? T{0} : src[ix];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* col, const ConvGeometry& g, T* dx) {
  std::size_t row = 0;
  for (std::size_t ci = 0; ci < g.cin; ++ci) {
    T* plane = dx + ci * g.h * g.w;
    for (std::size_t ky = 0; ky < g.kh; ++ky) {
      for (std::size_t kx = 0; kx < g.kw; ++kx, ++row) {
        const T* src = col + row * g.positions();
        for (std::size_t oy = 0; oy < g.ho; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - static_cast<std::ptrdiff_t>(g.pad);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) continue;
          T* dst = plane + static_cast<std::size_t>(iy) * g.w;
          const T* in = src + oy * g.wo;
          for (std::size_t ox = 0; ox < g.wo; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - static_cast<std::ptrdiff_t>(g.pad);
            if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(g.w)) dst[ix] += in[ox];
          }
        }
      }
    }
  }
}

void require_even(const Shape& s, const char* op) {
  if (s.h % 2 != 0 || s.w % 2 != 0 || s.h == 0 || s.w == 0) {
    throw ShapeError(fmt::format("{}: spatial dims must be even and nonzero, got {}", op, s.str()));
  }
}

}  // namespace

template <typename T>
Var<T> conv2d(Var<T> input, Var<T> kernels, std::size_t stride, std::size_t zero_pad) {
  const Shape xs = input.shape();
  const Shape ks = kernels.shape();
  if (ks.c != xs.c) throw_shape_mismatch("conv2d kernel channels", ks, xs);
  if (stride == 0) throw std::invalid_argument("conv2d: stride must be positive");
  if (xs.h + 2 * zero_pad < ks.h || xs.w + 2 * zero_pad < ks.w) {
    throw ShapeError(fmt::format("conv2d: zero-sized output for input {} with kernels {} and pad {}", xs.str(),
                                 ks.str(), zero_pad));
  }
  const ConvGeometry g{xs.c, xs.h, xs.w, ks.h, ks.w, stride, zero_pad,
                       (xs.h + 2 * zero_pad - ks.h) / stride + 1, (xs.w + 2 * zero_pad - ks.w) / stride + 1};
  const std::size_t cout = ks.n;

  Tensor<T> out({xs.n, cout, g.ho, g.wo});
  const Tensor<T>& x = input.value();
  const Tensor<T>& k = kernels.value();
  ConstMapMat<T> wmat(k.raw(), static_cast<Eigen::Index>(cout), static_cast<Eigen::Index>(g.patch()));
  std::vector<T> col(g.pointwise() ? 0 : g.patch() * g.positions());
  for (std::size_t n = 0; n < xs.n; ++n) {
    const T* xn = x.raw() + n * xs.per_sample();
    const T* colp = xn;
    if (!g.pointwise()) {
      im2col(xn, g, col.data());
      colp = col.data();
    }
    ConstMapMat<T> cmat(colp, static_cast<Eigen::Index>(g.patch()), static_cast<Eigen::Index>(g.positions()));
    MapMat<T> omat(out.raw() + n * out.shape().per_sample(), static_cast<Eigen::Index>(cout),
                   static_cast<Eigen::Index>(g.positions()));
    omat.noalias() = wmat * cmat;
  }

  return input.tape->record(std::move(out), {input, kernels}, [input, kernels, g, cout](Tape<T>& tape, const Tensor<T>& dy) {
    const Tensor<T>& x = tape.value(input);
    const Tensor<T>& k = tape.value(kernels);
    Tensor<T>* dx = tape.grad_sink(input);
    Tensor<T>* dk = tape.grad_sink(kernels);
    const auto P = static_cast<Eigen::Index>(g.positions());
    const auto K = static_cast<Eigen::Index>(g.patch());
    const auto C = static_cast<Eigen::Index>(cout);
    ConstMapMat<T> wmat(k.raw(), C, K);
    std::vector<T> col(g.pointwise() ? 0 : g.patch() * g.positions());
    std::vector<T> dcol(g.pointwise() ? 0 : g.patch() * g.positions());
    const std::size_t in_stride = x.shape().per_sample();
    for (std::size_t n = 0; n < x.shape().n; ++n) {
      ConstMapMat<T> gmat(dy.raw() + n * dy.shape().per_sample(), C, P);
      if (dk) {
        const T* colp = x.raw() + n * in_stride;
        if (!g.pointwise()) {
          im2col(colp, g, col.data());
          colp = col.data();
        }
        ConstMapMat<T> cmat(colp, K, P);
        MapMat<T> dkmat(dk->raw(), C, K);
        dkmat.noalias() += gmat * cmat.transpose();
      }
      if (dx) {
        T* dxn = dx->raw() + n * in_stride;
        if (g.pointwise()) {
          MapMat<T> dxmat(dxn, K, P);
          dxmat.noalias() += wmat.transpose() * gmat;
        } else {
          MapMat<T> dcmat(dcol.data(), K, P);
          dcmat.noalias() = wmat.transpose() * gmat;
          col2im_add(dcol.data(), g, dxn);
        }
      }
    }
  });
}

template <typename T>
Var<T> relu(Var<T> input) {
  const Tensor<T>& x = input.value();
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > T{0} ? x[i] : T{0};
  return input.tape->record(std::move(out), {input}, [input](Tape<T>& tape, const Tensor<T>& dy) {
    const Tensor<T>& x = tape.value(input);
    Tensor<T>* dx = tape.grad_sink(input);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] > T{0}) (*dx)[i] += dy[i];
    }
  });
}

template <typename T>
Var<T> max_pool2(Var<T> input) {
  const Tensor<T>& x = input.value();
  const Shape s = x.shape();
  require_even(s, "max_pool2");
  const Shape os{s.n, s.c, s.h / 2, s.w / 2};
  Tensor<T> out(os);
  std::vector<std::uint32_t> argmax(os.size());
  std::size_t o = 0;
  for (std::size_t p = 0; p < s.n * s.c; ++p) {
    const std::size_t base = p * s.plane();
    for (std::size_t oy = 0; oy < os.h; ++oy) {
      for (std::size_t ox = 0; ox < os.w; ++ox, ++o) {
        const std::size_t cells[4] = {base + 2 * oy * s.w + 2 * ox, base + 2 * oy * s.w + 2 * ox + 1,
                                      base + (2 * oy + 1) * s.w + 2 * ox, base + (2 * oy + 1) * s.w + 2 * ox + 1};
        std::size_t best = cells[0];
        for (int i = 1; i < 4; ++i) {
          if (x[cells[i]] > x[best]) best = cells[i];
        }
        out[o] = x[best];
        argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
  return input.tape->record(std::move(out), {input},
                            [input, argmax = std::move(argmax)](Tape<T>& tape, const Tensor<T>& dy) {
                              Tensor<T>* dx = tape.grad_sink(input);
                              for (std::size_t i = 0; i < dy.size(); ++i) (*dx)[argmax[i]] += dy[i];
                            });
}

template <typename T>
Var<T> avg_pool2(Var<T> input) {
  const Tensor<T>& x = input.value();
  const Shape s = x.shape();
  require_even(s, "avg_pool2");
  const Shape os{s.n, s.c, s.h / 2, s.w / 2};
  Tensor<T> out(os);
  std::size_t o = 0;
  for (std::size_t p = 0; p < s.n * s.c; ++p) {
    const T* src = x.raw() + p * s.plane();
    for (std::size_t oy = 0; oy < os.h; ++oy) {
      for (std::size_t ox = 0; ox < os.w; ++ox, ++o) {
        const T* a = src + 2 * oy * s.w + 2 * ox;
        out[o] = (a[0] + a[1] + a[s.w] + a[s.w + 1]) / T{4};
      }
    }
  }
  return input.tape->record(std::move(out), {input}, [input, s, os](Tape<T>& tape, const Tensor<T>& dy) {
    Tensor<T>* dx = tape.grad_sink(input);
    std::size_t o = 0;
    for (std::size_t p = 0; p < s.n * s.c; ++p) {
      T* dst = dx->raw() + p * s.plane();
      for (std::size_t oy = 0; oy < os.h; ++oy) {
        for (std::size_t ox = 0; ox < os.w; ++ox, ++o) {
          const T g = dy[o] / T{4};
          T* a = dst + 2 * oy * s.w + 2 * ox;
          a[0] += g;
          a[1] += g;
          a[s.w] += g;
          a[s.w + 1] += g;
        }
      }
    }
  });
}

template <typename T>
Var<T> global_avg_pool(Var<T> input) {
  const Tensor<T>& x = input.value();
  const Shape s = x.shape();
  if (s.h == 0 || s.w == 0) throw ShapeError("global_avg_pool: empty spatial extent " + s.str());
  Tensor<T> out({s.n, s.c, 1, 1});
  const auto area = static_cast<T>(s.plane());
  for (std::size_t p = 0; p < s.n * s.c; ++p) {
    const T* src = x.raw() + p * s.plane();
    T acc{0};
    for (std::size_t i = 0; i < s.plane(); ++i) acc += src[i];
    out[p] = acc / area;
  }
  return input.tape->record(std::move(out), {input}, [input, s](Tape<T>& tape, const Tensor<T>& dy) {
    Tensor<T>* dx = tape.grad_sink(input);
    const auto area = static_cast<T>(s.plane());
    for (std::size_t p = 0; p < s.n * s.c; ++p) {
      const T g = dy[p] / area;
      T* dst = dx->raw() + p * s.plane();
      for (std::size_t i = 0; i < s.plane(); ++i) dst[i] += g;
    }
  });
}

template <typename T>
Var<T> fully_connected(Var<T> input, Var<T> weights, std::optional<Var<T>> bias) {
  const Shape xs = input.shape();
  const Shape ws = weights.shape();
  const std::size_t d = xs.per_sample();
  if (ws.n != d || ws.h != 1 || ws.w != 1) throw_shape_mismatch("fully_connected weights", ws, xs);
  const std::size_t classes = ws.c;
  if (bias && bias->shape() != Shape{1, classes, 1, 1}) throw_shape_mismatch("fully_connected bias", bias->shape(), ws);

  Tensor<T> out({xs.n, classes, 1, 1});
  const auto N = static_cast<Eigen::Index>(xs.n);
  const auto D = static_cast<Eigen::Index>(d);
  const auto C = static_cast<Eigen::Index>(classes);
  MapMat<T> omat(out.raw(), N, C);
  omat.noalias() = ConstMapMat<T>(input.value().raw(), N, D) * ConstMapMat<T>(weights.value().raw(), D, C);
  if (bias) omat.rowwise() += ConstMapMat<T>(bias->value().raw(), 1, C).row(0);

  std::vector<Var<T>> parents{input, weights};
  if (bias) parents.push_back(*bias);
  return input.tape->record(std::move(out), parents, [input, weights, bias, N, D, C](Tape<T>& tape, const Tensor<T>& dy) {
    ConstMapMat<T> g(dy.raw(), N, C);
    if (Tensor<T>* dw = tape.grad_sink(weights)) {
      MapMat<T>(dw->raw(), D, C).noalias() += ConstMapMat<T>(tape.value(input).raw(), N, D).transpose() * g;
    }
    if (Tensor<T>* dx = tape.grad_sink(input)) {
      MapMat<T>(dx->raw(), N, D).noalias() += g * ConstMapMat<T>(tape.value(weights).raw(), D, C).transpose();
    }
    if (bias) {
      if (Tensor<T>* db = tape.grad_sink(*bias)) MapMat<T>(db->raw(), 1, C) += g.colwise().sum();
    }
  });
}

template <typename T>
Var<T> batch_norm(Var<T> input, BatchNormState<T>& state, Mode mode) {
  Tape<T>& tape = *input.tape;
  // Recording the leaves may grow the tape, so values are read afterwards.
  const Var<T> gamma = tape.parameter(state.gamma);
  const Var<T> beta = tape.parameter(state.beta);
  const Tensor<T>& x = input.value();
  const Shape s = x.shape();
  if (s.c != state.channels()) throw_shape_mismatch("batch_norm channels", s, state.gamma.value.shape());
  const std::size_t count = s.n * s.plane();
  const T eps = static_cast<T>(state.epsilon);

  std::vector<T> mean(s.c), inv_std(s.c);
  if (mode == Mode::training) {
    if (count < 2) throw ShapeError("batch_norm: training mode needs batch*H*W >= 2, got " + s.str());
    const T m = static_cast<T>(state.momentum);
    for (std::size_t c = 0; c < s.c; ++c) {
      double acc = 0;
      for (std::size_t n = 0; n < s.n; ++n) {
        const T* p = x.raw() + x.offset(n, c, 0, 0);
        for (std::size_t i = 0; i < s.plane(); ++i) acc += p[i];
      }
      const double mu = acc / static_cast<double>(count);
      double sq = 0;
      for (std::size_t n = 0; n < s.n; ++n) {
        const T* p = x.raw() + x.offset(n, c, 0, 0);
        for (std::size_t i = 0; i < s.plane(); ++i) sq += (p[i] - mu) * (p[i] - mu);
      }
      const double var = sq / static_cast<double>(count);
      mean[c] = static_cast<T>(mu);
      inv_std[c] = static_cast<T>(1.0 / std::sqrt(var + state.epsilon));
      const double unbiased = sq / static_cast<double>(count - 1);
      state.running_mean.value[c] = (T{1} - m) * state.running_mean.value[c] + m * static_cast<T>(mu);
      state.running_var.value[c] = (T{1} - m) * state.running_var.value[c] + m * static_cast<T>(unbiased);
    }
  } else {
    for (std::size_t c = 0; c < s.c; ++c) {
      mean[c] = state.running_mean.value[c];
      inv_std[c] = T{1} / std::sqrt(state.running_var.value[c] + eps);
    }
  }

  Tensor<T> xhat(s);
  Tensor<T> out(s);
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const std::size_t base = x.offset(n, c, 0, 0);
      const T g = state.gamma.value[c];
      const T b = state.beta.value[c];
      for (std::size_t i = 0; i < s.plane(); ++i) {
        const T h = (x[base + i] - mean[c]) * inv_std[c];
        xhat[base + i] = h;
        out[base + i] = g * h + b;
      }
    }
  }

  return tape.record(std::move(out), {input, gamma, beta},
                     [input, gamma, beta, s, count, mode, xhat = std::move(xhat), inv_std = std::move(inv_std)](
                         Tape<T>& tape, const Tensor<T>& dy) {
                       Tensor<T>* dx = tape.grad_sink(input);
                       Tensor<T>* dgamma = tape.grad_sink(gamma);
                       Tensor<T>* dbeta = tape.grad_sink(beta);
                       const Tensor<T>& gv = tape.value(gamma);
                       for (std::size_t c = 0; c < s.c; ++c) {
                         T sum_dy{0}, sum_dy_xhat{0};
                         for (std::size_t n = 0; n < s.n; ++n) {
                           const std::size_t base = xhat.offset(n, c, 0, 0);
                           for (std::size_t i = 0; i < s.plane(); ++i) {
                             sum_dy += dy[base + i];
                             sum_dy_xhat += dy[base + i] * xhat[base + i];
                           }
                         }
                         if (dgamma) (*dgamma)[c] += sum_dy_xhat;
                         if (dbeta) (*dbeta)[c] += sum_dy;
                         if (!dx) continue;
                         const T scale = gv[c] * inv_std[c];
                         const T inv_count = T{1} / static_cast<T>(count);
                         for (std::size_t n = 0; n < s.n; ++n) {
                           const std::size_t base = xhat.offset(n, c, 0, 0);
                           for (std::size_t i = 0; i < s.plane(); ++i) {
                             if (mode == Mode::training) {
                               (*dx)[base + i] += scale * (dy[base + i] - inv_count * sum_dy -
                                                           xhat[base + i] * inv_count * sum_dy_xhat);
                             } else {
                               (*dx)[base + i] += scale * dy[base + i];
                             }
                           }
                         }
                       }
                     });
}

template <typename T>
Var<T> concat_channels(const std::vector<Var<T>>& inputs) {
  if (inputs.empty()) throw std::invalid_argument("concat_channels: no inputs");
  const Shape first = inputs.front().shape();
  std::size_t channels = 0;
  for (const auto& v : inputs) {
    const Shape s = v.shape();
    if (s.n != first.n || s.h != first.h || s.w != first.w) throw_shape_mismatch("concat_channels", s, first);
    channels += s.c;
  }
  Tensor<T> out({first.n, channels, first.h, first.w});
  for (std::size_t n = 0; n < first.n; ++n) {
    T* dst = out.raw() + n * out.shape().per_sample();
    for (const auto& v : inputs) {
      const Tensor<T>& x = v.value();
      const T* src = x.raw() + n * x.shape().per_sample();
      dst = std::copy(src, src + x.shape().per_sample(), dst);
    }
  }
  return inputs.front().tape->record(std::move(out), inputs, [inputs](Tape<T>& tape, const Tensor<T>& dy) {
    const std::size_t per = dy.shape().per_sample();
    std::size_t channel_offset = 0;
    for (const auto& v : inputs) {
      const Shape s = tape.value(v).shape();
      if (Tensor<T>* dx = tape.grad_sink(v)) {
        for (std::size_t n = 0; n < s.n; ++n) {
          const T* src = dy.raw() + n * per + channel_offset * s.plane();
          T* dst = dx->raw() + n * s.per_sample();
          for (std::size_t i = 0; i < s.per_sample(); ++i) dst[i] += src[i];
        }
      }
      channel_offset += s.c;
    }
  });
}

template <typename T>
Var<T> sum(Var<T> input) {
  T acc{0};
  for (T v : input.value().data()) acc += v;
  return input.tape->record(Tensor<T>({1, 1, 1, 1}, acc), {input}, [input](Tape<T>& tape, const Tensor<T>& dy) {
    Tensor<T>* dx = tape.grad_sink(input);
    for (auto& g : dx->data()) g += dy[0];
  });
}

template <typename T>
Var<T> weighted_sum(Var<T> input, const Tensor<T>& weights) {
  if (weights.shape() != input.shape()) throw_shape_mismatch("weighted_sum", weights.shape(), input.shape());
  T acc{0};
  const Tensor<T>& x = input.value();
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * weights[i];
  return input.tape->record(Tensor<T>({1, 1, 1, 1}, acc), {input},
                            [input, weights](Tape<T>& tape, const Tensor<T>& dy) {
                              Tensor<T>* dx = tape.grad_sink(input);
                              for (std::size_t i = 0; i < weights.size(); ++i) (*dx)[i] += dy[0] * weights[i];
                            });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  const Shape s = logits.shape();
  const std::size_t classes = s.per_sample();
  Tensor<T> probs(s);
  for (std::size_t n = 0; n < s.n; ++n) {
    const T* z = logits.raw() + n * classes;
    T* p = probs.raw() + n * classes;
    const T zmax = *std::max_element(z, z + classes);
    T total{0};
    for (std::size_t c = 0; c < classes; ++c) total += (p[c] = std::exp(z[c] - zmax));
    for (std::size_t c = 0; c < classes; ++c) p[c] /= total;
  }
  return probs;
}

template <typename T>
LossOutput<T> softmax_cross_entropy(Var<T> logits, std::span<const int> labels) {
  const Tensor<T>& z = logits.value();
  const Shape s = z.shape();
  const std::size_t classes = s.per_sample();
  if (labels.size() != s.n) {
    throw ShapeError(fmt::format("softmax_cross_entropy: {} labels for logits {}", labels.size(), s.str()));
  }
  for (std::size_t n = 0; n < s.n; ++n) {
    if (labels[n] < 0 || static_cast<std::size_t>(labels[n]) >= classes) {
      throw std::out_of_range(fmt::format("label {} at row {} outside [0, {})", labels[n], n, classes));
    }
  }
  Tensor<T> probs = softmax(z);
  T loss{0};
  for (std::size_t n = 0; n < s.n; ++n) {
    const T* row = z.raw() + n * classes;
    const T zmax = *std::max_element(row, row + classes);
    T total{0};
    for (std::size_t c = 0; c < classes; ++c) total += std::exp(row[c] - zmax);
    loss += zmax + std::log(total) - row[labels[n]];
  }
  loss /= static_cast<T>(s.n);

  std::vector<int> owned(labels.begin(), labels.end());
  Var<T> out = logits.tape->record(
      Tensor<T>({1, 1, 1, 1}, loss), {logits},
      [logits, probs, owned = std::move(owned), classes](Tape<T>& tape, const Tensor<T>& dy) {
        Tensor<T>* dz = tape.grad_sink(logits);
        const T scale = dy[0] / static_cast<T>(owned.size());
        for (std::size_t n = 0; n < owned.size(); ++n) {
          for (std::size_t c = 0; c < classes; ++c) {
            const T target = static_cast<int>(c) == owned[n] ? T{1} : T{0};
            (*dz)[n * classes + c] += scale * (probs[n * classes + c] - target);
          }
        }
      });
  return {out, std::move(probs)};
}

#define FRXA_INSTANTIATE_OPS(T)                                                          \
  template Var<T> conv2d<T>(Var<T>, Var<T>, std::size_t, std::size_t);                  \
  template Var<T> relu<T>(Var<T>);                                                       \
  template Var<T> max_pool2<T>(Var<T>);                                                  \
  template Var<T> avg_pool2<T>(Var<T>);                                                  \
  template Var<T> global_avg_pool<T>(Var<T>);                                            \
  template Var<T> fully_connected<T>(Var<T>, Var<T>, std::optional<Var<T>>);             \
  template Var<T> batch_norm<T>(Var<T>, BatchNormState<T>&, Mode);                       \
  template Var<T> concat_channels<T>(const std::vector<Var<T>>&);                        \
  template Var<T> sum<T>(Var<T>);                                                        \
  template Var<T> weighted_sum<T>(Var<T>, const Tensor<T>&);                             \
  template Tensor<T> softmax<T>(const Tensor<T>&);                                       \
  template LossOutput<T> softmax_cross_entropy<T>(Var<T>, std::span<const int>);

FRXA_INSTANTIATE_OPS(float)
FRXA_INSTANTIATE_OPS(double)

}  // namespace ops
}  // namespace frxa
