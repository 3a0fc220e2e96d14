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


#include "evci/entgan/model.hpp"

#include <cmath>

#include "evci/error.hpp"
#include "evci/nn/ops.hpp"

namespace evci::gan {
namespace {

// std = gain * sqrt(1 / fan_in); gain^2 = 2 is the ReLU-preserving default.
template <typename T>
void add_conv(ParameterSet<T>& set, Rng& rng, const std::string& name,
              std::size_t cin, std::size_t cout, std::size_t k, bool bias,
              double gain = std::sqrt(2.0)) {
  const double std = gain / std::sqrt(static_cast<double>(cin * k * k));
  set.add(name + ".w", Tensor<T>::randn({cout, cin, k, k}, rng, std));
  if (bias) set.add(name + ".b", Tensor<T>({cout}));
}

// Each input pixel of a stride-s transposed conv reaches K^2 / s^2 outputs'
// worth of taps per channel.
template <typename T>
void add_tconv(ParameterSet<T>& set, Rng& rng, const std::string& name,
               std::size_t cin, std::size_t cout, std::size_t k,
               std::size_t stride) {
  const double fan_in =
      static_cast<double>(cin * k * k) / static_cast<double>(stride * stride);
  set.add(name + ".w", Tensor<T>::randn({cin, cout, k, k}, rng,
                                        std::sqrt(2.0 / fan_in)));
  set.add(name + ".b", Tensor<T>({cout}));
}

template <typename T>
void add_linear(ParameterSet<T>& set, Rng& rng, const std::string& name,
                std::size_t in, std::size_t out) {
  set.add(name + ".w", Tensor<T>::randn({out, in}, rng,
                                        std::sqrt(2.0 / static_cast<double>(in))));
  set.add(name + ".b", Tensor<T>({out}));
}

template <typename T>
void add_discriminator(ParameterSet<T>& set, Rng& rng, const std::string& prefix,
                       std::size_t c) {
  add_conv(set, rng, prefix + ".l0", 3, c, 4, true);
  add_conv(set, rng, prefix + ".l1", c, 2 * c, 4, true);
  add_conv(set, rng, prefix + ".l2", 2 * c, 4 * c, 4, true);
  add_conv(set, rng, prefix + ".l3", 4 * c, 1, 4, true);
}

}  // namespace

template <typename T>
Var Binder<T>::operator()(Parameter<T>& p) {
  auto it = bound_.find(&p);
  if (it != bound_.end()) return it->second;
  const Var v = trainable_ ? graph_.parameter(p) : graph_.constant(p.value);
  bound_.emplace(&p, v);
  return v;
}

template <typename T>
EntGan<T>::EntGan(ModelConfig cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  const std::size_t c = cfg_.base_channels;
  const std::size_t cc = cfg_.content_channels();

  add_conv(eg_, rng, "enc.in", 3, c, 7, false);
  add_conv(eg_, rng, "enc.down0", c, 2 * c, 4, false);
  add_conv(eg_, rng, "enc.down1", 2 * c, cc, 4, false);
  for (std::size_t i = 0; i < cfg_.encoder_blocks; ++i) {
    const std::string n = "enc.res" + std::to_string(i);
    add_conv(eg_, rng, n + ".a", cc, cc, 3, false);
    add_conv(eg_, rng, n + ".b", cc, cc, 3, false);
  }

  add_linear(eg_, rng, "gen.mlp0", env::kComponents, cfg_.mlp_hidden);
  add_linear(eg_, rng, "gen.mlp1", cfg_.mlp_hidden, cfg_.mlp_hidden);
  add_linear(eg_, rng, "gen.mlp2", cfg_.mlp_hidden, 2 * cc);
  // Without normalization in the decoder, full-gain residual branches and
  // output layer push tanh into saturation at init. Residual branches start
  // near identity and the output layer at unit gain.
  for (std::size_t i = 0; i < cfg_.generator_blocks; ++i) {
    const std::string n = "gen.res" + std::to_string(i);
    add_conv(eg_, rng, n + ".a", cc, cc, 3, true);
    add_conv(eg_, rng, n + ".b", cc, cc, 3, true, 0.1 * std::sqrt(2.0));
  }
  add_tconv(eg_, rng, "gen.up0", cc, 2 * c, 4, 2);
  add_tconv(eg_, rng, "gen.up1", 2 * c, c, 4, 2);
  add_conv(eg_, rng, "gen.out", c, 3, 7, true, 1.0);

  add_discriminator(d_, rng, "dfull", c);
  add_discriminator(d_, rng, "dhalf", c);
}

template <typename T>
Var EntGan<T>::conv(Binder<T>& b, ParameterSet<T>& set, const std::string& name,
                    Var x, std::size_t stride, std::size_t padding, bool bias) {
  const Var w = b(set.at(name + ".w"));
  const Var bv = bias ? b(set.at(name + ".b")) : Var{};
  return nn::conv2d(b.graph(), x, w, bv, {stride, padding, nn::Padding::kReflect});
}

template <typename T>
Var EntGan<T>::encode(Binder<T>& b, Var image) {
  Graph<T>& g = b.graph();
  const Tensor<T>& x = g.value(image);
  if (x.rank() != 4 || x.dim(1) != 3 || x.dim(2) % 4 || x.dim(3) % 4) {
    throw ShapeError("encoder needs [N,3,H,W] with H, W divisible by 4, got " +
                     nn::shape_string(x.shape()));
  }
  Var h = nn::relu(g, nn::instance_norm(g, conv(b, eg_, "enc.in", image, 1, 3, false)));
  h = nn::relu(g, nn::instance_norm(g, conv(b, eg_, "enc.down0", h, 2, 1, false)));
  h = nn::relu(g, nn::instance_norm(g, conv(b, eg_, "enc.down1", h, 2, 1, false)));
  for (std::size_t i = 0; i < cfg_.encoder_blocks; ++i) {
    const std::string n = "enc.res" + std::to_string(i);
    Var r = nn::relu(g, nn::instance_norm(g, conv(b, eg_, n + ".a", h, 1, 1, false)));
    r = nn::instance_norm(g, conv(b, eg_, n + ".b", r, 1, 1, false));
    h = nn::add(g, h, r);
  }
  return h;
}

template <typename T>
Var EntGan<T>::generate(Binder<T>& b, Var content, Var env) {
  Graph<T>& g = b.graph();
  const std::size_t cc = cfg_.content_channels();
  const Tensor<T>& c = g.value(content);
  const Tensor<T>& e = g.value(env);
  if (c.rank() != 4 || c.dim(1) != cc) {
    throw ShapeError("generator needs a content map with " + std::to_string(cc) +
                     " channels, got " + nn::shape_string(c.shape()));
  }
  if (e.shape() != nn::Shape{c.dim(0), env::kComponents}) {
    throw ShapeError("generator needs one environment vector per sample, got " +
                     nn::shape_string(e.shape()));
  }
  auto lin = [&](const std::string& name, Var x) {
    return nn::linear(g, x, b(eg_.at(name + ".w")), b(eg_.at(name + ".b")));
  };
  Var m = nn::relu(g, lin("gen.mlp0", env));
  m = nn::relu(g, lin("gen.mlp1", m));
  m = lin("gen.mlp2", m);
  const Var gamma = nn::slice_columns(g, m, 0, cc);
  const Var beta = nn::slice_columns(g, m, cc, cc);

  Var h = nn::adain(g, content, gamma, beta);
  for (std::size_t i = 0; i < cfg_.generator_blocks; ++i) {
    const std::string n = "gen.res" + std::to_string(i);
    Var r = nn::relu(g, conv(b, eg_, n + ".a", h, 1, 1, true));
    r = conv(b, eg_, n + ".b", r, 1, 1, true);
    h = nn::add(g, h, r);
  }
  auto up = [&](const std::string& name, Var x) {
    return nn::relu(g, nn::conv_transpose2d(g, x, b(eg_.at(name + ".w")),
                                            b(eg_.at(name + ".b")), 2, 1));
  };
  h = up("gen.up0", h);
  h = up("gen.up1", h);
  h = nn::tanh(g, conv(b, eg_, "gen.out", h, 1, 3, true));
  return nn::scale_shift(g, h, 0.5, 0.5);
}

template <typename T>
Var EntGan<T>::discriminator(Binder<T>& b, const std::string& prefix, Var x) {
  Graph<T>& g = b.graph();
  Var h = x;
  for (int i = 0; i < 4; ++i) {
    h = conv(b, d_, prefix + ".l" + std::to_string(i), h, 2, 1, true);
    if (i < 3) h = nn::leaky_relu(g, h, 0.2);
  }
  return h;
}

template <typename T>
Var EntGan<T>::discriminate(Binder<T>& b, Var image, Scale scale) {
  if (scale == Scale::kFull) return discriminator(b, "dfull", image);
  return discriminator(b, "dhalf", nn::avg_pool2(b.graph(), image));
}

template <typename T>
Tensor<T> EntGan<T>::encode_content(const Image& img) {
  Graph<T> g;
  Binder<T> b(g, false);
  return g.value(encode(b, g.constant(nn::image_to_tensor<T>(img))));
}

template <typename T>
Tensor<T> EntGan<T>::generate(const Tensor<T>& content, const env::EnvVector& e) {
  Graph<T> g;
  Binder<T> b(g, false);
  return g.value(generate(b, g.constant(content), g.constant(env_tensor<T>(e))));
}

template <typename T>
Image EntGan<T>::translate(const Image& img, const env::EnvVector& e) {
  return nn::tensor_to_image(generate(encode_content(img), e));
}

template <typename T>
Tensor<T> env_tensor(const env::EnvVector& e) {
  Tensor<T> t({1, env::kComponents});
  for (std::size_t i = 0; i < env::kComponents; ++i) t[i] = static_cast<T>(e[i]);
  return t;
}

template class Binder<float>;
template class Binder<double>;
template class EntGan<float>;
template class EntGan<double>;
template Tensor<float> env_tensor<float>(const env::EnvVector&);
template Tensor<double> env_tensor<double>(const env::EnvVector&);

}  // namespace evci::gan
