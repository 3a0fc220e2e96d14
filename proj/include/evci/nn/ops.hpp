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

#ifndef EVCI_NN_OPS_HPP_
#define EVCI_NN_OPS_HPP_

#include <cstddef>
#include <vector>

#include "evci/nn/graph.hpp"

// Differentiable operations over Graph nodes. Feature maps are NCHW;
// every op throws ShapeError on inconsistent inputs.
namespace evci::nn {

enum class Padding { kReflect, kZero };

struct Conv2dOptions {
  std::size_t stride = 1;
  std::size_t padding = 0;
  Padding mode = Padding::kReflect;
};

inline constexpr double kNormEpsilon = 1e-5;

// Cross-correlation. x: [N, Cin, H, W], w: [Cout, Cin, K, K], bias: [Cout]
// or an invalid Var for none. Reflect padding needs padding < H and < W.
template <typename T>
Var conv2d(Graph<T>& g, Var x, Var w, Var bias, Conv2dOptions opt = {});

// Adjoint of the zero-padded conv2d with the same geometry.
// x: [N, Cin, H, W], w: [Cin, Cout, K, K], output spatial size
// (H - 1) * stride - 2 * padding + K.
template <typename T>
Var conv_transpose2d(Graph<T>& g, Var x, Var w, Var bias, std::size_t stride,
                     std::size_t padding);

// Per-(sample, channel) standardization with population variance.
template <typename T>
Var instance_norm(Graph<T>& g, Var x, double eps = kNormEpsilon);

// y[n,c,:,:] = gamma[n,c] * x[n,c,:,:] + beta[n,c]; gamma, beta: [N, C].
template <typename T>
Var channel_affine(Graph<T>& g, Var x, Var gamma, Var beta);

// gamma * instance_norm(x) + beta.
template <typename T>
Var adain(Graph<T>& g, Var x, Var gamma, Var beta, double eps = kNormEpsilon);

// x: [N, in], w: [out, in], bias: [out] or invalid.
template <typename T>
Var linear(Graph<T>& g, Var x, Var w, Var bias);

template <typename T>
Var relu(Graph<T>& g, Var x);
template <typename T>
Var leaky_relu(Graph<T>& g, Var x, double slope = 0.2);
template <typename T>
Var tanh(Graph<T>& g, Var x);

template <typename T>
Var add(Graph<T>& g, Var a, Var b);
// a * s + c for scalars s, c.
template <typename T>
Var scale_shift(Graph<T>& g, Var a, double s, double c = 0.0);
// Element-wise x * scale + shift with constant tensors of x's shape.
template <typename T>
Var affine(Graph<T>& g, Var x, const Tensor<T>& scale, const Tensor<T>& shift);
// Gradient passes where lo <= x <= hi.
template <typename T>
Var clamp(Graph<T>& g, Var x, double lo, double hi);

// Non-overlapping 2x2 mean; H and W must be even.
template <typename T>
Var avg_pool2(Graph<T>& g, Var x);

template <typename T>
Var reshape(Graph<T>& g, Var x, Shape shape);
// Columns [begin, begin + count) of a [N, F] tensor.
template <typename T>
Var slice_columns(Graph<T>& g, Var x, std::size_t begin, std::size_t count);

// Scalar reductions, each producing shape [1].
template <typename T>
Var sum(Graph<T>& g, Var x);
// sum |a - b|
template <typename T>
Var l1_distance(Graph<T>& g, Var a, Var b);
// mean (x - target)^2
template <typename T>
Var mean_squared_to(Graph<T>& g, Var x, double target);
// sum_i weights[i] * terms[i] over scalar terms.
template <typename T>
Var weighted_sum(Graph<T>& g, const std::vector<Var>& terms,
                 const std::vector<double>& weights);

// Output spatial length of a convolution along one axis.
std::size_t conv_output_size(std::size_t in, std::size_t kernel,
                             std::size_t stride, std::size_t padding);

}  // namespace evci::nn

#endif  // EVCI_NN_OPS_HPP_
