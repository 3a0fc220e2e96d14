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


#include "evci/entgan/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evci/error.hpp"
#include "evci/nn/ops.hpp"

namespace evci::gan {
namespace {

constexpr double kLoadScale = 286.0 / 256.0;

bool finite(const LossReport& r) {
  for (double v : {r.l_rec, r.l_cyc, r.l_env, r.l_perc, r.l_adv_g, r.l_adv_d,
                   r.total_eg, r.total_d}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto m = static_cast<std::ptrdiff_t>(n);
  while (i < 0 || i >= m) i = i < 0 ? -i : 2 * (m - 1) - i;
  return static_cast<std::size_t>(i);
}

Image pad_to_multiple(const Image& img, std::size_t k) {
  const std::size_t h = (img.height() + k - 1) / k * k;
  const std::size_t w = (img.width() + k - 1) / k * k;
  if (h == img.height() && w == img.width()) return img;
  Image out(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t sy = reflect(static_cast<std::ptrdiff_t>(y), img.height());
    for (std::size_t x = 0; x < w; ++x) {
      out.set_pixel(y, x, img.pixel(sy, reflect(static_cast<std::ptrdiff_t>(x), img.width())));
    }
  }
  return out;
}

}  // namespace

double learning_rate_at(const ModelConfig& cfg, double epochs_done) {
  const double start = static_cast<double>(cfg.decay_start_epoch);
  const double end = static_cast<double>(cfg.epochs);
  if (epochs_done <= start) return cfg.learning_rate;
  if (epochs_done >= end) return 0.0;
  return cfg.learning_rate * (end - epochs_done) / (end - start);
}

Image preprocess_for_training(const Image& img, const ModelConfig& cfg, Rng& rng) {
  const double s = rng.uniform(0.9, 1.1);
  const auto scaled = [&](std::size_t train) {
    const double base = std::round(static_cast<double>(train) * kLoadScale);
    return std::max(train, static_cast<std::size_t>(std::lround(base * s)));
  };
  const std::size_t h = scaled(cfg.image_height);
  const std::size_t w = scaled(cfg.image_width);
  const Image resized = resize(img, w, h);
  Rect r;
  r.w = cfg.image_width;
  r.h = cfg.image_height;
  r.y = rng.index(h - r.h + 1);
  r.x = rng.index(w - r.w + 1);
  Image out = crop(resized, r);
  if (rng.bernoulli(0.5)) out = hflip(out);
  return out;
}

template <typename T>
LossReport train_step(EntGan<T>& model, Optimizers<T>& opt, const Image& I,
                      const Image& I_prime, const env::EnvStats& stats,
                      double lr) {
  return train_step(model, opt, I, I_prime, stats, lr,
                    LossWeights::for_image(I.height(), I.width()));
}

template <typename T>
LossReport train_step(EntGan<T>& model, Optimizers<T>& opt, const Image& I,
                      const Image& I_prime, const env::EnvStats& stats,
                      double lr, const LossWeights& w) {
  Graph<T> g;
  Binder<T> eg(g, true);
  Binder<T> frozen_d(g, false);
  const Translation<T> t = translate_pair(model, eg, I, I_prime, stats);
  const GeneratorTerms<T> terms = generator_terms(model, frozen_d, t, stats, w);

  Graph<T> gd;
  Binder<T> d(gd, true);
  const Var real = gd.constant(g.value(t.image));
  const std::array<Var, 3> fakes = {gd.constant(g.value(t.rec)),
                                    gd.constant(g.value(t.trans)),
                                    gd.constant(g.value(t.cyc))};
  const Var adv_d = discriminator_loss(model, d, real, fakes);
  const Var total_d = nn::weighted_sum(gd, {adv_d}, {w.adv_d});

  LossReport r;
  r.l_rec = g.value(terms.rec)[0];
  r.l_cyc = g.value(terms.cyc)[0];
  r.l_env = g.value(terms.env)[0];
  r.l_perc = g.value(terms.perc)[0];
  r.l_adv_g = g.value(terms.adv_g)[0];
  r.l_adv_d = gd.value(adv_d)[0];
  apply_weights(r, w);
  if (!finite(r)) {
    throw NumericError("non-finite loss: l_rec=" + std::to_string(r.l_rec) +
                       " l_cyc=" + std::to_string(r.l_cyc) +
                       " l_env=" + std::to_string(r.l_env) +
                       " l_perc=" + std::to_string(r.l_perc) +
                       " l_adv_g=" + std::to_string(r.l_adv_g) +
                       " l_adv_d=" + std::to_string(r.l_adv_d));
  }

  model.eg_params().zero_grad();
  g.backward(terms.total);
  nn::adam_step(model.eg_params(), opt.eg, lr);

  model.d_params().zero_grad();
  gd.backward(total_d);
  nn::adam_step(model.d_params(), opt.d, lr);
  return r;
}

Checkpoint fit(const std::vector<Image>& images, const ModelConfig& cfg, Rng& rng,
               const FitOptions& options) {
  cfg.validate();
  if (images.size() < 2) {
    throw ArgumentError("training needs at least 2 images, got " +
                        std::to_string(images.size()));
  }
  env::EnvStats stats;
  if (options.stats) {
    stats = *options.stats;
  } else {
    std::vector<env::RawEnvVector> raw;
    for (const Image& img : images) raw.push_back(env::extract_raw(img));
    stats = env::fit_stats(raw);
  }

  Checkpoint ckpt{EntGan<float>(cfg, rng), stats, 0};
  Optimizers<float> opt(ckpt.model);
  const std::size_t n = images.size();
  std::size_t total = cfg.epochs * n;
  if (options.max_iterations > 0) total = std::min(total, options.max_iterations);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < total; ++k) {
    const std::size_t pos = k % n;
    if (pos == 0) rng.shuffle(order);
    const Image I = preprocess_for_training(images[order[pos]], cfg, rng);
    const Image I_prime = preprocess_for_training(images[order[(pos + 1) % n]], cfg, rng);
    StepLog log;
    log.iteration = k + 1;
    log.lr = learning_rate_at(cfg, static_cast<double>(k) / static_cast<double>(n));
    log.losses = train_step(ckpt.model, opt, I, I_prime, ckpt.stats, log.lr);
    ckpt.step = k + 1;
    if (options.on_step) options.on_step(log, ckpt.model);
  }
  return ckpt;
}

Image translate(EntGan<float>& model, const Image& img, const env::EnvVector& e) {
  const Image padded = pad_to_multiple(img, ModelConfig::kDownsample);
  const Image out = model.translate(padded, e);
  if (padded.height() == img.height() && padded.width() == img.width()) return out;
  Rect r;
  r.w = img.width();
  r.h = img.height();
  return crop(out, r);
}

template struct Optimizers<float>;
template struct Optimizers<double>;
template LossReport train_step<float>(EntGan<float>&, Optimizers<float>&, const Image&,
                                      const Image&, const env::EnvStats&, double);
template LossReport train_step<double>(EntGan<double>&, Optimizers<double>&,
                                       const Image&, const Image&,
                                       const env::EnvStats&, double);
template LossReport train_step<float>(EntGan<float>&, Optimizers<float>&, const Image&,
                                      const Image&, const env::EnvStats&, double,
                                      const LossWeights&);
template LossReport train_step<double>(EntGan<double>&, Optimizers<double>&,
                                       const Image&, const Image&,
                                       const env::EnvStats&, double,
                                       const LossWeights&);

}  // namespace evci::gan
