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


#include "evci/entgan/losses.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "evci/error.hpp"
#include "evci/nn/ops.hpp"

namespace evci::gan {

template <typename T>
Var env_raw_features(Graph<T>& g, Var image) {
  const Tensor<T>& x = g.value(image);
  if (x.rank() != 4 || x.dim(1) != 3) {
    throw ShapeError("environment features need [N,3,H,W], got " +
                     nn::shape_string(x.shape()));
  }
  const std::size_t n = x.dim(0);
  const std::size_t area = x.dim(2) * x.dim(3);
  const double inv_area = 1.0 / static_cast<double>(area);
  const auto& wl = kLumaWeights;

  Tensor<T> out({n, env::kComponents});
  for (std::size_t s = 0; s < n; ++s) {
    const T* r = x.data() + s * 3 * area;
    const T* gr = r + area;
    const T* b = gr + area;
    double sum_y = 0.0, sum_sat = 0.0;
    for (std::size_t i = 0; i < area; ++i) {
      sum_y += wl[0] * r[i] + wl[1] * gr[i] + wl[2] * b[i];
      sum_sat += pixel_saturation(r[i], gr[i], b[i]);
    }
    const double mean_y = sum_y * inv_area;
    double var = 0.0;
    for (std::size_t i = 0; i < area; ++i) {
      const double d = wl[0] * r[i] + wl[1] * gr[i] + wl[2] * b[i] - mean_y;
      var += d * d;
    }
    out[s * 3 + 0] = static_cast<T>(mean_y);
    out[s * 3 + 1] = static_cast<T>(std::sqrt(var * inv_area));
    out[s * 3 + 2] = static_cast<T>(sum_sat * inv_area);
  }

  return g.record(std::move(out), {image},
                  [image, n, area, inv_area](Graph<T>& g, std::size_t self) {
    const Tensor<T>& gy = g.output_grad(self);
    const Tensor<T>& x = g.value(image);
    const Tensor<T>& y = g.value(Var{self});
    Tensor<T>& gx = g.grad_buffer(image);
    const auto& wl = kLumaWeights;
    for (std::size_t s = 0; s < n; ++s) {
      const T* px[3] = {x.data() + s * 3 * area, x.data() + (s * 3 + 1) * area,
                        x.data() + (s * 3 + 2) * area};
      T* gp[3] = {gx.data() + s * 3 * area, gx.data() + (s * 3 + 1) * area,
                  gx.data() + (s * 3 + 2) * area};
      const double mean_y = y[s * 3 + 0];
      const double std_y = y[s * 3 + 1];
      const double g_mean = gy[s * 3 + 0] * inv_area;
      const double g_std = std_y > 0.0 ? gy[s * 3 + 1] * inv_area / std_y : 0.0;
      const double g_sat = gy[s * 3 + 2] * inv_area;
      for (std::size_t i = 0; i < area; ++i) {
        const double v[3] = {px[0][i], px[1][i], px[2][i]};
        const double luma = wl[0] * v[0] + wl[1] * v[1] + wl[2] * v[2];
        const double g_luma = g_mean + g_std * (luma - mean_y);
        double grad[3] = {g_luma * wl[0], g_luma * wl[1], g_luma * wl[2]};
        std::size_t hi = 0, lo = 0;
        for (std::size_t c = 1; c < 3; ++c) {
          if (v[c] > v[hi]) hi = c;
          if (v[c] < v[lo]) lo = c;
        }
        if (v[hi] > 0.0) {
          grad[hi] += g_sat * v[lo] / (v[hi] * v[hi]);
          grad[lo] -= g_sat / v[hi];
        }
        for (std::size_t c = 0; c < 3; ++c) gp[c][i] += static_cast<T>(grad[c]);
      }
    }
  });
}

template <typename T>
Var env_features(Graph<T>& g, Var image, const env::EnvStats& stats) {
  const Var raw = env_raw_features(g, image);
  const nn::Shape shape = g.value(raw).shape();
  Tensor<T> scale(shape), shift(shape);
  for (std::size_t s = 0; s < shape[0]; ++s) {
    for (std::size_t i = 0; i < env::kComponents; ++i) {
      const double span = stats.max[i] - stats.min[i];
      if (span > 0.0) {
        scale[s * 3 + i] = static_cast<T>(2.0 / span);
        shift[s * 3 + i] = static_cast<T>(-2.0 * stats.min[i] / span - 1.0);
      }
    }
  }
  return nn::clamp(g, nn::affine(g, raw, scale, shift), -1.0, 1.0);
}

void apply_weights(LossReport& r, const LossWeights& w) {
  r.total_eg = w.rec * r.l_rec + w.cyc * r.l_cyc + w.env * r.l_env +
               w.perc * r.l_perc + w.adv_g * r.l_adv_g;
  r.total_d = w.adv_d * r.l_adv_d;
}

template <typename T>
Translation<T> translate_pair(EntGan<T>& model, Binder<T>& eg, const Image& I,
                              const Image& I_prime, const env::EnvStats& stats) {
  Graph<T>& g = eg.graph();
  Translation<T> t;
  t.e = env::extract(I, stats);
  t.e_prime = env::extract(I_prime, stats);
  t.e_node = g.constant(env_tensor<T>(t.e));
  t.e_prime_node = g.constant(env_tensor<T>(t.e_prime));
  const Var e = t.e_node;
  const Var e_prime = t.e_prime_node;
  t.image = g.constant(nn::image_to_tensor<T>(I));
  t.content = model.encode(eg, t.image);
  t.rec = model.generate(eg, t.content, e);
  t.trans = model.generate(eg, t.content, e_prime);
  t.content_trans = model.encode(eg, t.trans);
  t.cyc = model.generate(eg, t.content_trans, e);
  return t;
}

template <typename T>
Var generator_adversarial_loss(EntGan<T>& model, Binder<T>& d,
                               const std::array<Var, 3>& fakes) {
  Graph<T>& g = d.graph();
  std::vector<Var> terms;
  for (const Var& f : fakes) {
    terms.push_back(nn::mean_squared_to(g, model.discriminate(d, f, Scale::kFull), 1.0));
    terms.push_back(nn::mean_squared_to(g, model.discriminate(d, f, Scale::kHalf), 1.0));
  }
  return nn::weighted_sum(g, terms, std::vector<double>(terms.size(), 1.0));
}

template <typename T>
Var discriminator_loss(EntGan<T>& model, Binder<T>& d, Var real,
                       const std::array<Var, 3>& fakes) {
  Graph<T>& g = d.graph();
  std::vector<Var> terms;
  for (Scale s : {Scale::kFull, Scale::kHalf}) {
    terms.push_back(nn::mean_squared_to(g, model.discriminate(d, real, s), 1.0));
    for (const Var& f : fakes) {
      terms.push_back(nn::mean_squared_to(g, model.discriminate(d, f, s), 0.0));
    }
  }
  return nn::weighted_sum(g, terms, std::vector<double>(terms.size(), 1.0));
}

template <typename T>
GeneratorTerms<T> generator_terms(EntGan<T>& model, Binder<T>& d,
                                  const Translation<T>& t,
                                  const env::EnvStats& stats,
                                  const LossWeights& w) {
  Graph<T>& g = d.graph();
  const Var e = t.e_node;
  const Var e_prime = t.e_prime_node;

  GeneratorTerms<T> out;
  out.rec = nn::l1_distance(g, t.rec, t.image);
  out.cyc = nn::l1_distance(g, t.cyc, t.image);
  out.env = nn::weighted_sum(
      g,
      {nn::l1_distance(g, env_features(g, t.rec, stats), e),
       nn::l1_distance(g, env_features(g, t.trans, stats), e_prime),
       nn::l1_distance(g, env_features(g, t.cyc, stats), e)},
      {1.0, 1.0, 1.0});
  out.perc = nn::l1_distance(g, t.content_trans, t.content);
  out.adv_g = generator_adversarial_loss(model, d, {t.rec, t.trans, t.cyc});
  out.total = nn::weighted_sum(g, {out.rec, out.cyc, out.env, out.perc, out.adv_g},
                               {w.rec, w.cyc, w.env, w.perc, w.adv_g});
  return out;
}

template <typename T>
std::pair<double, double> loss_adv(EntGan<T>& model, const Tensor<T>& real,
                                   const std::array<Tensor<T>, 3>& fakes) {
  Graph<T> g;
  Binder<T> d(g, false);
  const Var r = g.constant(real);
  const std::array<Var, 3> f = {g.constant(fakes[0]), g.constant(fakes[1]),
                                g.constant(fakes[2])};
  const double adv_g = g.value(generator_adversarial_loss(model, d, f))[0];
  const double adv_d = g.value(discriminator_loss(model, d, r, f))[0];
  return {adv_g, adv_d};
}

template <typename T>
LossReport evaluate_losses(EntGan<T>& model, const Image& I,
                           const Image& I_prime, const env::EnvStats& stats) {
  Graph<T> g;
  Binder<T> eg(g, false);
  Binder<T> d(g, false);
  const LossWeights w = LossWeights::for_image(I.height(), I.width());
  const Translation<T> t = translate_pair(model, eg, I, I_prime, stats);
  const GeneratorTerms<T> terms = generator_terms(model, d, t, stats, w);
  const Var adv_d = discriminator_loss(model, d, t.image, {t.rec, t.trans, t.cyc});

  LossReport r;
  r.l_rec = g.value(terms.rec)[0];
  r.l_cyc = g.value(terms.cyc)[0];
  r.l_env = g.value(terms.env)[0];
  r.l_perc = g.value(terms.perc)[0];
  r.l_adv_g = g.value(terms.adv_g)[0];
  r.l_adv_d = g.value(adv_d)[0];
  apply_weights(r, w);
  return r;
}

#define EVCI_INSTANTIATE_LOSSES(T)                                            \
  template Var env_raw_features<T>(Graph<T>&, Var);                           \
  template Var env_features<T>(Graph<T>&, Var, const env::EnvStats&);         \
  template Translation<T> translate_pair<T>(EntGan<T>&, Binder<T>&,           \
                                            const Image&, const Image&,       \
                                            const env::EnvStats&);            \
  template GeneratorTerms<T> generator_terms<T>(                              \
      EntGan<T>&, Binder<T>&, const Translation<T>&, const env::EnvStats&,    \
      const LossWeights&);                                                    \
  template Var discriminator_loss<T>(EntGan<T>&, Binder<T>&, Var,             \
                                     const std::array<Var, 3>&);              \
  template Var generator_adversarial_loss<T>(EntGan<T>&, Binder<T>&,          \
                                             const std::array<Var, 3>&);      \
  template std::pair<double, double> loss_adv<T>(                             \
      EntGan<T>&, const Tensor<T>&, const std::array<Tensor<T>, 3>&);         \
  template LossReport evaluate_losses<T>(EntGan<T>&, const Image&,            \
                                         const Image&, const env::EnvStats&);

EVCI_INSTANTIATE_LOSSES(float)
EVCI_INSTANTIATE_LOSSES(double)

#undef EVCI_INSTANTIATE_LOSSES

}  // namespace evci::gan
