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


#ifndef EVCI_ENTGAN_LOSSES_HPP_
#define EVCI_ENTGAN_LOSSES_HPP_

#include <array>
#include <utility>

#include "evci/entgan/config.hpp"
#include "evci/entgan/model.hpp"
#include "evci/envvec.hpp"
#include "evci/image.hpp"

namespace evci::gan {

// Differentiable (brightness, contrast, saturation) of [N, 3, H, W] images
// as an [N, 3] tensor. Saturation uses the actual per-pixel max/min with the
// lowest channel index taking the gradient at ties.
template <typename T>
Var env_raw_features(Graph<T>& g, Var image);

// env_raw_features normalized by `stats` and clamped to [-1, 1]. Degenerate
// components are constant 0.
template <typename T>
Var env_features(Graph<T>& g, Var image, const env::EnvStats& stats);

struct LossReport {
  double l_rec = 0.0;
  double l_cyc = 0.0;
  double l_env = 0.0;
  double l_perc = 0.0;
  double l_adv_g = 0.0;
  double l_adv_d = 0.0;
  double total_eg = 0.0;
  double total_d = 0.0;
};

// Fills total_eg and total_d from the components.
void apply_weights(LossReport& r, const LossWeights& w);

// Nodes of one translation pass over an image pair (I, I').
//   content = E_c(I)             rec  = G(content, e)
//   trans   = G(content, e')     content_trans = E_c(trans)
//   cyc     = G(content_trans, e)
// with e = E_env(I), e' = E_env(I') computed as constants.
template <typename T>
struct Translation {
  Var image;
  Var content;
  Var rec;
  Var trans;
  Var content_trans;
  Var cyc;
  env::EnvVector e;
  env::EnvVector e_prime;
  // [1, 3] constant nodes holding e and e'.
  Var e_node;
  Var e_prime_node;
};

template <typename T>
Translation<T> translate_pair(EntGan<T>& model, Binder<T>& eg, const Image& I,
                              const Image& I_prime, const env::EnvStats& stats);

// Unweighted encoder/generator terms plus the weighted total.
template <typename T>
struct GeneratorTerms {
  Var rec;
  Var cyc;
  Var env;
  Var perc;
  Var adv_g;
  Var total;
};

// `d` binds the discriminators; pass a frozen binder to keep their
// parameters out of the gradient.
template <typename T>
GeneratorTerms<T> generator_terms(EntGan<T>& model, Binder<T>& d,
                                  const Translation<T>& t,
                                  const env::EnvStats& stats,
                                  const LossWeights& w);

// Least-squares discriminator loss summed over both scales: real images
// target 1, the three fakes target 0.
template <typename T>
Var discriminator_loss(EntGan<T>& model, Binder<T>& d, Var real,
                       const std::array<Var, 3>& fakes);

// Generator-side least-squares loss: the three fakes target 1 at both scales.
template <typename T>
Var generator_adversarial_loss(EntGan<T>& model, Binder<T>& d,
                               const std::array<Var, 3>& fakes);

// (l_adv_g, l_adv_d) for given real and fake images.
template <typename T>
std::pair<double, double> loss_adv(EntGan<T>& model, const Tensor<T>& real,
                                   const std::array<Tensor<T>, 3>& fakes);

// All loss values for a pair with the current parameters; no updates.
template <typename T>
LossReport evaluate_losses(EntGan<T>& model, const Image& I,
                           const Image& I_prime, const env::EnvStats& stats);

}  // namespace evci::gan

#endif  // EVCI_ENTGAN_LOSSES_HPP_
