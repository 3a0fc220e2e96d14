// Copyright 2026 The EVCI Augment Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "evci/nn/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <memory>

#include "evci/error.hpp"

namespace evci::nn {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

// Sampling geometry of a convolution window sweep over one input plane.
// Index tables hold the source row/column for each (tap, output) pair, or -1
// for zero padding.
struct Geometry {
  std::size_t kernel = 1;
  std::size_t in_h = 0, in_w = 0;
  std::size_t out_h = 0, out_w = 0;
  std::vector<std::ptrdiff_t> rows;  // [kernel * out_h]
  std::vector<std::ptrdiff_t> cols;  // [kernel * out_w]

  std::size_t out_pixels() const { return out_h * out_w; }
};

std::ptrdiff_t source_index(std::ptrdiff_t i, std::ptrdiff_t n, Padding mode) {
  if (i >= 0 && i < n) return i;
  if (mode == Padding::kZero) return -1;
  if (i < 0) return -i;
  return 2 * (n - 1) - i;
}

std::vector<std::ptrdiff_t> axis_table(std::size_t in, std::size_t out,
                                       std::size_t kernel, std::size_t stride,
                                       std::size_t padding, Padding mode) {
  std::vector<std::ptrdiff_t> t(kernel * out);
  for (std::size_t k = 0; k < kernel; ++k) {
    for (std::size_t o = 0; o < out; ++o) {
      const auto i = static_cast<std::ptrdiff_t>(o * stride + k) -
                     static_cast<std::ptrdiff_t>(padding);
      t[k * out + o] = source_index(i, static_cast<std::ptrdiff_t>(in), mode);
    }
  }
  return t;
}

Geometry make_geometry(std::size_t in_h, std::size_t in_w, std::size_t kernel,
                       std::size_t stride, std::size_t padding, Padding mode) {
  require(stride >= 1, "convolution stride must be at least 1");
  require(in_h + 2 * padding >= kernel && in_w + 2 * padding >= kernel,
          "convolution kernel larger than padded input");
  if (mode == Padding::kReflect) {
    require(padding < in_h && padding < in_w,
            "reflect padding " + std::to_string(padding) +
                " needs input larger than " + std::to_string(padding));
  }
  Geometry geo;
  geo.kernel = kernel;
  geo.in_h = in_h;
  geo.in_w = in_w;
  geo.out_h = conv_output_size(in_h, kernel, stride, padding);
  geo.out_w = conv_output_size(in_w, kernel, stride, padding);
  geo.rows = axis_table(in_h, geo.out_h, kernel, stride, padding, mode);
  geo.cols = axis_table(in_w, geo.out_w, kernel, stride, padding, mode);
  return geo;
}

// col: [channels * K * K, out_h * out_w]
template <typename T>
void im2col(const T* x, std::size_t channels, const Geometry& geo, T* col) {
  const std::size_t k = geo.kernel;
  const std::size_t p = geo.out_pixels();
  for (std::size_t c = 0; c < channels; ++c) {
    const T* plane = x + c * geo.in_h * geo.in_w;
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        T* row = col + ((c * k + ky) * k + kx) * p;
        const std::ptrdiff_t* cidx = &geo.cols[kx * geo.out_w];
        for (std::size_t oy = 0; oy < geo.out_h; ++oy) {
          T* dst = row + oy * geo.out_w;
          const std::ptrdiff_t sy = geo.rows[ky * geo.out_h + oy];
          if (sy < 0) {
            std::fill(dst, dst + geo.out_w, T{0});
            continue;
          }
          const T* src = plane + static_cast<std::size_t>(sy) * geo.in_w;
          for (std::size_t ox = 0; ox < geo.out_w; ++ox) {
            const std::ptrdiff_t sx = cidx[ox];
            dst[ox] = sx < 0 ? T{0} : src[sx];
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatters (adds) columns back into the input planes.
template <typename T>
void col2im(const T* col, std::size_t channels, const Geometry& geo, T* x) {
  const std::size_t k = geo.kernel;
  const std::size_t p = geo.out_pixels();
  for (std::size_t c = 0; c < channels; ++c) {
    T* plane = x + c * geo.in_h * geo.in_w;
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        const T* row = col + ((c * k + ky) * k + kx) * p;
        const std::ptrdiff_t* cidx = &geo.cols[kx * geo.out_w];
        for (std::size_t oy = 0; oy < geo.out_h; ++oy) {
          const std::ptrdiff_t sy = geo.rows[ky * geo.out_h + oy];
          if (sy < 0) continue;
          const T* src = row + oy * geo.out_w;
          T* dst = plane + static_cast<std::size_t>(sy) * geo.in_w;
          for (std::size_t ox = 0; ox < geo.out_w; ++ox) {
            const std::ptrdiff_t sx = cidx[ox];
            if (sx >= 0) dst[sx] += src[ox];
          }
        }
      }
    }
  }
}

template <typename T>
void require_shape(const Tensor<T>& t, std::size_t rank, const char* what) {
  require(t.rank() == rank, std::string(what) + " must have rank " +
                                std::to_string(rank) + ", got " +
                                shape_string(t.shape()));
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b,
                        const char* what) {
  require(a.shape() == b.shape(), std::string(what) + ": shape mismatch " +
                                      shape_string(a.shape()) + " vs " +
                                      shape_string(b.shape()));
}

}  // namespace

std::size_t conv_output_size(std::size_t in, std::size_t kernel,
                             std::size_t stride, std::size_t padding) {
  require(in + 2 * padding >= kernel, "convolution kernel larger than input");
  return (in + 2 * padding - kernel) / stride + 1;
}

template <typename T>
Var conv2d(Graph<T>& g, Var x, Var w, Var bias, Conv2dOptions opt) {
  const Tensor<T>& xv = g.value(x);
  const Tensor<T>& wv = g.value(w);
  require_shape(xv, 4, "conv2d input");
  require_shape(wv, 4, "conv2d weight");
  const std::size_t n = xv.dim(0), cin = xv.dim(1);
  const std::size_t cout = wv.dim(0), k = wv.dim(2);
  require(wv.dim(1) == cin && wv.dim(3) == k,
          "conv2d weight " + shape_string(wv.shape()) +
              " does not match input " + shape_string(xv.shape()));
  if (bias.valid()) {
    require(g.value(bias).shape() == Shape{cout}, "conv2d bias shape mismatch");
  }
  auto geo = std::make_shared<Geometry>(
      make_geometry(xv.dim(2), xv.dim(3), k, opt.stride, opt.padding, opt.mode));
  const std::size_t rows = cin * k * k;
  const std::size_t pix = geo->out_pixels();
  const std::size_t in_plane = cin * xv.dim(2) * xv.dim(3);

  Tensor<T> out(Shape{n, cout, geo->out_h, geo->out_w});
  std::vector<T> col(rows * pix);
  ConstMatMap<T> wm(wv.data(), static_cast<Eigen::Index>(cout),
                    static_cast<Eigen::Index>(rows));
  for (std::size_t s = 0; s < n; ++s) {
    im2col(xv.data() + s * in_plane, cin, *geo, col.data());
    ConstMatMap<T> cm(col.data(), static_cast<Eigen::Index>(rows),
                      static_cast<Eigen::Index>(pix));
    MatMap<T> om(out.data() + s * cout * pix, static_cast<Eigen::Index>(cout),
                 static_cast<Eigen::Index>(pix));
    om.noalias() = wm * cm;
    if (bias.valid()) {
      const Tensor<T>& bv = g.value(bias);
      for (std::size_t c = 0; c < cout; ++c) om.row(c).array() += bv[c];
    }
  }

  return g.record(std::move(out), {x, w, bias},
                  [x, w, bias, geo, n, cin, cout, rows, pix, in_plane](
                      Graph<T>& g, std::size_t self) {
    const Tensor<T>& gy = g.output_grad(self);
    const Tensor<T>& xv = g.value(x);
    const Tensor<T>& wv = g.value(w);
    const bool need_x = g.requires_grad(x);
    const bool need_w = g.requires_grad(w);
    const bool need_b = bias.valid() && g.requires_grad(bias);
    ConstMatMap<T> wm(wv.data(), static_cast<Eigen::Index>(cout),
                      static_cast<Eigen::Index>(rows));
    std::vector<T> col(rows * pix);
    RowMat<T> gcol;
    for (std::size_t s = 0; s < n; ++s) {
      ConstMatMap<T> gm(gy.data() + s * cout * pix,
                        static_cast<Eigen::Index>(cout),
                        static_cast<Eigen::Index>(pix));
      if (need_w) {
        im2col(xv.data() + s * in_plane, cin, *geo, col.data());
        ConstMatMap<T> cm(col.data(), static_cast<Eigen::Index>(rows),
                          static_cast<Eigen::Index>(pix));
        MatMap<T> gw(g.grad_buffer(w).data(), static_cast<Eigen::Index>(cout),
                     static_cast<Eigen::Index>(rows));
        gw.noalias() += gm * cm.transpose();
      }
      if (need_b) {
        Tensor<T>& gb = g.grad_buffer(bias);
        for (std::size_t c = 0; c < cout; ++c) gb[c] += gm.row(c).sum();
      }
      if (need_x) {
        gcol.noalias() = wm.transpose() * gm;
        col2im(gcol.data(), cin, *geo, g.grad_buffer(x).data() + s * in_plane);
      }
    }
  });
}

template <typename T>
Var conv_transpose2d(Graph<T>& g, Var x, Var w, Var bias, std::size_t stride,
                     std::size_t padding) {
  const Tensor<T>& xv = g.value(x);
  const Tensor<T>& wv = g.value(w);
  require_shape(xv, 4, "conv_transpose2d input");
  require_shape(wv, 4, "conv_transpose2d weight");
  const std::size_t n = xv.dim(0), cin = xv.dim(1);
  const std::size_t in_h = xv.dim(2), in_w = xv.dim(3);
  const std::size_t cout = wv.dim(1), k = wv.dim(2);
  require(wv.dim(0) == cin && wv.dim(3) == k,
          "conv_transpose2d weight " + shape_string(wv.shape()) +
              " does not match input " + shape_string(xv.shape()));
  require(stride >= 1, "conv_transpose2d stride must be at least 1");
  require((in_h - 1) * stride + k > 2 * padding &&
              (in_w - 1) * stride + k > 2 * padding,
          "conv_transpose2d padding too large");
  if (bias.valid()) {
    require(g.value(bias).shape() == Shape{cout},
            "conv_transpose2d bias shape mismatch");
  }
  const std::size_t out_h = (in_h - 1) * stride + k - 2 * padding;
  const std::size_t out_w = (in_w - 1) * stride + k - 2 * padding;
  // The forward conv this op is the adjoint of maps out_h x out_w -> in.
  auto geo = std::make_shared<Geometry>(
      make_geometry(out_h, out_w, k, stride, padding, Padding::kZero));
  require(geo->out_h == in_h && geo->out_w == in_w,
          "conv_transpose2d geometry is not invertible for this input");
  const std::size_t rows = cout * k * k;
  const std::size_t pix = in_h * in_w;
  const std::size_t out_plane = cout * out_h * out_w;

  Tensor<T> out(Shape{n, cout, out_h, out_w});
  ConstMatMap<T> wm(wv.data(), static_cast<Eigen::Index>(cin),
                    static_cast<Eigen::Index>(rows));
  RowMat<T> col;
  for (std::size_t s = 0; s < n; ++s) {
    ConstMatMap<T> xm(xv.data() + s * cin * pix, static_cast<Eigen::Index>(cin),
                      static_cast<Eigen::Index>(pix));
    col.noalias() = wm.transpose() * xm;
    T* plane = out.data() + s * out_plane;
    col2im(col.data(), cout, *geo, plane);
    if (bias.valid()) {
      const Tensor<T>& bv = g.value(bias);
      for (std::size_t c = 0; c < cout; ++c) {
        T* p = plane + c * out_h * out_w;
        for (std::size_t i = 0; i < out_h * out_w; ++i) p[i] += bv[c];
      }
    }
  }

  return g.record(std::move(out), {x, w, bias},
                  [x, w, bias, geo, n, cin, cout, rows, pix, out_plane, out_h,
                   out_w](Graph<T>& g, std::size_t self) {
    const Tensor<T>& gy = g.output_grad(self);
    const Tensor<T>& xv = g.value(x);
    const Tensor<T>& wv = g.value(w);
    const bool need_x = g.requires_grad(x);
    const bool need_w = g.requires_grad(w);
    const bool need_b = bias.valid() && g.requires_grad(bias);
    ConstMatMap<T> wm(wv.data(), static_cast<Eigen::Index>(cin),
                      static_cast<Eigen::Index>(rows));
    std::vector<T> gcol(rows * pix);
    for (std::size_t s = 0; s < n; ++s) {
      const T* gplane = gy.data() + s * out_plane;
      if (need_x || need_w) {
        im2col(gplane, cout, *geo, gcol.data());
      }
      ConstMatMap<T> gc(gcol.data(), static_cast<Eigen::Index>(rows),
                        static_cast<Eigen::Index>(pix));
      if (need_x) {
        MatMap<T> gx(g.grad_buffer(x).data() + s * cin * pix,
                     static_cast<Eigen::Index>(cin),
                     static_cast<Eigen::Index>(pix));
        gx.noalias() += wm * gc;
      }
      if (need_w) {
        ConstMatMap<T> xm(xv.data() + s * cin * pix,
                          static_cast<Eigen::Index>(cin),
                          static_cast<Eigen::Index>(pix));
        MatMap<T> gw(g.grad_buffer(w).data(), static_cast<Eigen::Index>(cin),
                     static_cast<Eigen::Index>(rows));
        gw.noalias() += xm * gc.transpose();
      }
      if (need_b) {
        Tensor<T>& gb = g.grad_buffer(bias);
        for (std::size_t c = 0; c < cout; ++c) {
          const T* p = gplane + c * out_h * out_w;
          T acc{0};
          for (std::size_t i = 0; i < out_h * out_w; ++i) acc += p[i];
          gb[c] += acc;
        }
      }
    }
  });
}

template <typename T>
Var instance_norm(Graph<T>& g, Var x, double eps) {
  const Tensor<T>& xv = g.value(x);
  require_shape(xv, 4, "instance_norm input");
  const std::size_t planes = xv.dim(0) * xv.dim(1);
  const std::size_t area = xv.dim(2) * xv.dim(3);
  require(area >= 1, "instance_norm needs a non-empty plane");
  auto inv_std = std::make_shared<std::vector<T>>(planes);
  Tensor<T> out(xv.shape());
  for (std::size_t p = 0; p < planes; ++p) {
    const T* src = xv.data() + p * area;
    T* dst = out.data() + p * area;
    double mean = 0.0;
    for (std::size_t i = 0; i < area; ++i) mean += src[i];
    mean /= static_cast<double>(area);
    double var = 0.0;
    for (std::size_t i = 0; i < area; ++i) {
      const double d = src[i] - mean;
      var += d * d;
    }
    var /= static_cast<double>(area);
    const double r = 1.0 / std::sqrt(var + eps);
    (*inv_std)[p] = static_cast<T>(r);
    for (std::size_t i = 0; i < area; ++i) {
      dst[i] = static_cast<T>((src[i] - mean) * r);
    }
  }
  return g.record(std::move(out), {x},
                  [x, inv_std, planes, area](Graph<T>& g, std::size_t self) {
    const Tensor<T>& gy = g.output_grad(self);
    const Tensor<T>& y = g.value(Var{self});
    Tensor<T>& gx = g.grad_buffer(x);
    for (std::size_t p = 0; p < planes; ++p) {
      const T* gp = gy.data() + p * area;
      const T* yp = y.data() + p * area;
      double mg = 0.0, mgy = 0.0;
      for (std::size_t i = 0; i < area; ++i) {
        mg += gp[i];
        mgy += static_cast<double>(gp[i]) * yp[i];
      }
      mg /= static_cast<double>(area);
      mgy /= static_cast<double>(area);
      const double r = (*inv_std)[p];
      T* dst = gx.data() + p * area;
      for (std::size_t i = 0; i < area; ++i) {
        dst[i] += static_cast<T>(r * (gp[i] - mg - yp[i] * mgy));
      }
    }
  });
}

template <typename T>
Var channel_affine(Graph<T>& g, Var x, Var gamma, Var beta) {
  const Tensor<T>& xv = g.value(x);
  require_shape(xv, 4, "channel_affine input");
  const Shape param_shape{xv.dim(0), xv.dim(1)};
  require(g.value(gamma).shape() == param_shape &&
              g.value(beta).shape() == param_shape,
          "channel_affine parameters must be [N, C] = " +
              shape_string(param_shape));
  const std::size_t planes = xv.dim(0) * xv.dim(1);
  const std::size_t area = xv.dim(2) * xv.dim(3);
  const Tensor<T>& gv = g.value(gamma);
  const Tensor<T>& bv = g.value(beta);
  Tensor<T> out(xv.shape());
  for (std::size_t p = 0; p < planes; ++p) {
    const T* src = xv.data() + p * area;
    T* dst = out.data() + p * area;
    for (std::size_t i = 0; i < area; ++i) dst[i] = gv[p] * src[i] + bv[p];
  }
  return g.record(std::move(out), {x, gamma, beta},
                  [x, gamma, beta, planes, area](Graph<T>& g, std::size_t self) {
    const Tensor<T>& gy = g.output_grad(self);
    const Tensor<T>& xv = g.value(x);
    const Tensor<T>& gv = g.value(gamma);
    for (std::size_t p = 0; p < planes; ++p) {
      const T* gp = gy.data() + p * area;
      const T* xp = xv.data() + p * area;
      if (g.requires_grad(x)) {
        T* dst = g.grad_buffer(x).data() + p * area;
        for (std::size_t i = 0; i < area; ++i) dst[i] += gv[p] * gp[i];
      }
      if (g.requires_grad(gamma)) {
        T acc{0};
        for (std::size_t i = 0; i < area; ++i) acc += gp[i] * xp[i];
        g.grad_buffer(gamma)[p] += acc;
      }
      if (g.requires_grad(beta)) {
        T acc{0};
        for (std::size_t i = 0; i < area; ++i) acc += gp[i];
        g.grad_buffer(beta)[p] += acc;
      }
    }
  });
}

template <typename T>
Var adain(Graph<T>& g, Var x, Var gamma, Var beta, double eps) {
  return channel_affine(g, instance_norm(g, x, eps), gamma, beta);
}

template <typename T>
Var linear(Graph<T>& g, Var x, Var w, Var bias) {
  const Tensor<T>& xv = g.value(x);
  const Tensor<T>& wv = g.value(w);
  require_shape(xv, 2, "linear input");
  require_shape(wv, 2, "linear weight");
  const std::size_t n = xv.dim(0), in = xv.dim(1), out_dim = wv.dim(0);
  require(wv.dim(1) == in, "linear weight " + shape_string(wv.shape()) +
                               " does not match input " +
                               shape_string(xv.shape()));
  if (bias.valid()) {
    require(g.value(bias).shape() == Shape{out_dim}, "linear bias shape mismatch");
  }
  Tensor<T> out(Shape{n, out_dim});
  ConstMatMap<T> xm(xv.data(), static_cast<Eigen::Index>(n),
                    static_cast<Eigen::Index>(in));
  ConstMatMap<T> wm(wv.data(), static_cast<Eigen::Index>(out_dim),
                    static_cast<Eigen::Index>(in));
  MatMap<T> om(out.data(), static_cast<Eigen::Index>(n),
               static_cast<Eigen::Index>(out_dim));
  om.noalias() = xm * wm.transpose();
  if (bias.valid()) {
    const Tensor<T>& bv = g.value(bias);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < out_dim; ++c) om(r, c) += bv[c];
    }
  }
  return g.record(std::move(out), {x, w, bias},
                  [x, w, bias, n, in, out_dim](Graph<T>& g, std::size_t self) {
    const Tensor<T>& gy = g.output_grad(self);
    ConstMatMap<T> gm(gy.data(), static_cast<Eigen::Index>(n),
                      static_cast<Eigen::Index>(out_dim));
    if (g.requires_grad(x)) {
      ConstMatMap<T> wm(g.value(w).data(), static_cast<Eigen::Index>(out_dim),
                        static_cast<Eigen::Index>(in));
      MatMap<T> gx(g.grad_buffer(x).data(), static_cast<Eigen::Index>(n),
                   static_cast<Eigen::Index>(in));
      gx.noalias() += gm * wm;
    }
    if (g.requires_grad(w)) {
      ConstMatMap<T> xm(g.value(x).data(), static_cast<Eigen::Index>(n),
                        static_cast<Eigen::Index>(in));
      MatMap<T> gw(g.grad_buffer(w).data(), static_cast<Eigen::Index>(out_dim),
                   static_cast<Eigen::Index>(in));
      gw.noalias() += gm.transpose() * xm;
    }
    if (bias.valid() && g.requires_grad(bias)) {
      Tensor<T>& gb = g.grad_buffer(bias);
      for (std::size_t c = 0; c < out_dim; ++c) gb[c] += gm.col(c).sum();
    }
  });
}

namespace {

// Element-wise op with derivative expressed through input and output values.
template <typename T, typename Fwd, typename Deriv>
Var unary(Graph<T>& g, Var x, Fwd fwd, Deriv deriv) {
  const Tensor<T>& xv = g.value(x);
  Tensor<T> out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = fwd(xv[i]);
  return g.record(std::move(out), {x}, [x, deriv](Graph<T>& g, std::size_t self) {
    const Tensor<T>& gy = g.output_grad(self);
    const Tensor<T>& xv = g.value(x);
    const Tensor<T>& yv = g.value(Var{self});
    Tensor<T>& gx = g.grad_buffer(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * deriv(xv[i], yv[i]);
  });
}

}  // namespace

template <typename T>
Var relu(Graph<T>& g, Var x) {
  return unary(
      g, x, [](T v) { return v > T{0} ? v : T{0}; },
      [](T v, T) { return v > T{0} ? T{1} : T{0}; });
}

template <typename T>
Var leaky_relu(Graph<T>& g, Var x, double slope) {
  const T s = static_cast<T>(slope);
  return unary(
      g, x, [s](T v) { return v > T{0} ? v : s * v; },
      [s](T v, T) { return v > T{0} ? T{1} : s; });
}

template <typename T>
Var tanh(Graph<T>& g, Var x) {
  return unary(
      g, x, [](T v) { return std::tanh(v); },
      [](T, T y) { return T{1} - y * y; });
}

template <typename T>
Var clamp(Graph<T>& g, Var x, double lo, double hi) {
  const T l = static_cast<T>(lo), h = static_cast<T>(hi);
  return unary(
      g, x, [l, h](T v) { return std::clamp(v, l, h); },
      [l, h](T v, T) { return (v >= l && v <= h) ? T{1} : T{0}; });
}

template <typename T>
Var scale_shift(Graph<T>& g, Var a, double s, double c) {
  const T st = static_cast<T>(s), ct = static_cast<T>(c);
  return unary(
      g, a, [st, ct](T v) { return v * st + ct; }, [st](T, T) { return st; });
}

template <typename T>
Var add(Graph<T>& g, Var a, Var b) {
  const Tensor<T>& av = g.value(a);
  const Tensor<T>& bv = g.value(b);
  require_same_shape(av, bv, "add");
  Tensor<T> out(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
  return g.record(std::move(out), {a, b}, [a, b](Graph<T>& g, std::size_t self) {
    const Tensor<T>& gy = g.output_grad(self);
    if (g.requires_grad(a)) g.grad_buffer(a).accumulate(gy);
    if (g.requires_grad(b)) g.grad_buffer(b).accumulate(gy);
  });
}

template <typename T>
Var affine(Graph<T>& g, Var x, const Tensor<T>& scale, const Tensor<T>& shift) {
  const Tensor<T>& xv = g.value(x);
  require_same_shape(xv, scale, "affine scale");
  require_same_shape(xv, shift, "affine shift");
  Tensor<T> out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] * scale[i] + shift[i];
  return g.record(std::move(out), {x}, [x, scale](Graph<T>& g, std::size_t self) {
    const Tensor<T>& gy = g.output_grad(self);
    Tensor<T>& gx = g.grad_buffer(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * scale[i];
  });
}

template <typename T>
Var avg_pool2(Graph<T>& g, Var x) {
  const Tensor<T>& xv = g.value(x);
  require_shape(xv, 4, "avg_pool2 input");
  const std::size_t h = xv.dim(2), w = xv.dim(3);
  require(h % 2 == 0 && w % 2 == 0,
          "avg_pool2 needs even spatial dims, got " + shape_string(xv.shape()));
  const std::size_t planes = xv.dim(0) * xv.dim(1);
  const std::size_t oh = h / 2, ow = w / 2;
  Tensor<T> out(Shape{xv.dim(0), xv.dim(1), oh, ow});
  for (std::size_t p = 0; p < planes; ++p) {
    const T* src = xv.data() + p * h * w;
    T* dst = out.data() + p * oh * ow;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x2 = 0; x2 < ow; ++x2) {
        const T* s = src + 2 * y * w + 2 * x2;
        dst[y * ow + x2] = T(0.25) * (s[0] + s[1] + s[w] + s[w + 1]);
      }
    }
  }
  return g.record(std::move(out), {x},
                  [x, planes, h, w, oh, ow](Graph<T>& g, std::size_t self) {
    const Tensor<T>& gy = g.output_grad(self);
    Tensor<T>& gx = g.grad_buffer(x);
    for (std::size_t p = 0; p < planes; ++p) {
      const T* src = gy.data() + p * oh * ow;
      T* dst = gx.data() + p * h * w;
      for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x2 = 0; x2 < ow; ++x2) {
          const T v = T(0.25) * src[y * ow + x2];
          T* d = dst + 2 * y * w + 2 * x2;
          d[0] += v;
          d[1] += v;
          d[w] += v;
          d[w + 1] += v;
        }
      }
    }
  });
}

template <typename T>
Var reshape(Graph<T>& g, Var x, Shape shape) {
  Tensor<T> out = g.value(x).reshaped(std::move(shape));
  return g.record(std::move(out), {x}, [x](Graph<T>& g, std::size_t self) {
    const Tensor<T>& gy = g.output_grad(self);
    Tensor<T>& gx = g.grad_buffer(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
  });
}

template <typename T>
Var slice_columns(Graph<T>& g, Var x, std::size_t begin, std::size_t count) {
  const Tensor<T>& xv = g.value(x);
  require_shape(xv, 2, "slice_columns input");
  const std::size_t n = xv.dim(0), f = xv.dim(1);
  require(begin + count <= f && count > 0, "slice_columns range out of bounds");
  Tensor<T> out(Shape{n, count});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < count; ++c) out[r * count + c] = xv[r * f + begin + c];
  }
  return g.record(std::move(out), {x},
                  [x, n, f, begin, count](Graph<T>& g, std::size_t self) {
    const Tensor<T>& gy = g.output_grad(self);
    Tensor<T>& gx = g.grad_buffer(x);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < count; ++c) gx[r * f + begin + c] += gy[r * count + c];
    }
  });
}

template <typename T>
Var sum(Graph<T>& g, Var x) {
  const Tensor<T>& xv = g.value(x);
  double acc = 0.0;
  for (T v : xv.values()) acc += v;
  return g.record(Tensor<T>::scalar(static_cast<T>(acc)), {x},
                  [x](Graph<T>& g, std::size_t self) {
    const T gy = g.output_grad(self)[0];
    Tensor<T>& gx = g.grad_buffer(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy;
  });
}

template <typename T>
Var l1_distance(Graph<T>& g, Var a, Var b) {
  const Tensor<T>& av = g.value(a);
  const Tensor<T>& bv = g.value(b);
  require_same_shape(av, bv, "l1_distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += std::abs(av[i] - bv[i]);
  return g.record(Tensor<T>::scalar(static_cast<T>(acc)), {a, b},
                  [a, b](Graph<T>& g, std::size_t self) {
    const T gy = g.output_grad(self)[0];
    const Tensor<T>& av = g.value(a);
    const Tensor<T>& bv = g.value(b);
    const bool need_a = g.requires_grad(a);
    const bool need_b = g.requires_grad(b);
    for (std::size_t i = 0; i < av.size(); ++i) {
      const T d = av[i] - bv[i];
      const T s = d > T{0} ? gy : (d < T{0} ? -gy : T{0});
      if (need_a) g.grad_buffer(a)[i] += s;
      if (need_b) g.grad_buffer(b)[i] -= s;
    }
  });
}

template <typename T>
Var mean_squared_to(Graph<T>& g, Var x, double target) {
  const Tensor<T>& xv = g.value(x);
  require(!xv.empty(), "mean_squared_to of an empty tensor");
  double acc = 0.0;
  for (T v : xv.values()) acc += (v - target) * (v - target);
  const double n = static_cast<double>(xv.size());
  return g.record(Tensor<T>::scalar(static_cast<T>(acc / n)), {x},
                  [x, target, n](Graph<T>& g, std::size_t self) {
    const double gy = g.output_grad(self)[0];
    const Tensor<T>& xv = g.value(x);
    Tensor<T>& gx = g.grad_buffer(x);
    for (std::size_t i = 0; i < gx.size(); ++i) {
      gx[i] += static_cast<T>(gy * 2.0 * (xv[i] - target) / n);
    }
  });
}

template <typename T>
Var weighted_sum(Graph<T>& g, const std::vector<Var>& terms,
                 const std::vector<double>& weights) {
  require(terms.size() == weights.size() && !terms.empty(),
          "weighted_sum needs one weight per term");
  double acc = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    require(g.value(terms[i]).size() == 1, "weighted_sum terms must be scalars");
    acc += weights[i] * static_cast<double>(g.value(terms[i])[0]);
  }
  return g.record(Tensor<T>::scalar(static_cast<T>(acc)), terms,
                  [terms, weights](Graph<T>& g, std::size_t self) {
    const double gy = g.output_grad(self)[0];
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (g.requires_grad(terms[i])) {
        g.grad_buffer(terms[i])[0] += static_cast<T>(gy * weights[i]);
      }
    }
  });
}

#define EVCI_INSTANTIATE_OPS(T)                                               \
  template Var conv2d<T>(Graph<T>&, Var, Var, Var, Conv2dOptions);            \
  template Var conv_transpose2d<T>(Graph<T>&, Var, Var, Var, std::size_t,     \
                                   std::size_t);                              \
  template Var instance_norm<T>(Graph<T>&, Var, double);                      \
  template Var channel_affine<T>(Graph<T>&, Var, Var, Var);                   \
  template Var adain<T>(Graph<T>&, Var, Var, Var, double);                    \
  template Var linear<T>(Graph<T>&, Var, Var, Var);                           \
  template Var relu<T>(Graph<T>&, Var);                                       \
  template Var leaky_relu<T>(Graph<T>&, Var, double);                         \
  template Var tanh<T>(Graph<T>&, Var);                                       \
  template Var clamp<T>(Graph<T>&, Var, double, double);                      \
  template Var scale_shift<T>(Graph<T>&, Var, double, double);                \
  template Var add<T>(Graph<T>&, Var, Var);                                   \
  template Var affine<T>(Graph<T>&, Var, const Tensor<T>&, const Tensor<T>&); \
  template Var avg_pool2<T>(Graph<T>&, Var);                                  \
  template Var reshape<T>(Graph<T>&, Var, Shape);                             \
  template Var slice_columns<T>(Graph<T>&, Var, std::size_t, std::size_t);    \
  template Var sum<T>(Graph<T>&, Var);                                        \
  template Var l1_distance<T>(Graph<T>&, Var, Var);                           \
  template Var mean_squared_to<T>(Graph<T>&, Var, double);                    \
  template Var weighted_sum<T>(Graph<T>&, const std::vector<Var>&,            \
                               const std::vector<double>&);

EVCI_INSTANTIATE_OPS(float)
EVCI_INSTANTIATE_OPS(double)

#undef EVCI_INSTANTIATE_OPS

}  // namespace evci::nn
