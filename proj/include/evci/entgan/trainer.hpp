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


#ifndef EVCI_ENTGAN_TRAINER_HPP_
#define EVCI_ENTGAN_TRAINER_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "evci/entgan/checkpoint.hpp"
#include "evci/entgan/losses.hpp"
#include "evci/entgan/model.hpp"
#include "evci/image.hpp"
#include "evci/nn/adam.hpp"
#include "evci/rng.hpp"

namespace evci::gan {

// Learning rate after `epochs_done` (fractional) epochs: constant up to the
// decay start, then linear to 0 at the last epoch.
double learning_rate_at(const ModelConfig& cfg, double epochs_done);

// Resize to 286/256 of the training size, rescale by U[0.9, 1.1] (never
// below the training size), random crop to the training size, random hflip.
Image preprocess_for_training(const Image& img, const ModelConfig& cfg, Rng& rng);

template <typename T>
struct Optimizers {
  nn::AdamState<T> eg;
  nn::AdamState<T> d;

  explicit Optimizers(EntGan<T>& model)
      : eg(model.eg_params()), d(model.d_params()) {}
};

// One encoder/generator update followed by one discriminator update on a
// preprocessed pair. Reported values are from before either update. Throws
// NumericError, leaving the parameters untouched, if any loss is not finite.
template <typename T>
LossReport train_step(EntGan<T>& model, Optimizers<T>& opt, const Image& I,
                      const Image& I_prime, const env::EnvStats& stats,
                      double lr);
// Same with explicit loss weights instead of the image-size defaults.
template <typename T>
LossReport train_step(EntGan<T>& model, Optimizers<T>& opt, const Image& I,
                      const Image& I_prime, const env::EnvStats& stats,
                      double lr, const LossWeights& w);

struct StepLog {
  std::size_t iteration = 0;  // 1-based
  double lr = 0.0;
  LossReport losses;
};

struct FitOptions {
  // Stop after this many steps (0 runs the full schedule).
  std::size_t max_iterations = 0;
  // Normalization statistics; fitted over the given images when absent.
  std::optional<env::EnvStats> stats;
  std::function<void(const StepLog&, EntGan<float>&)> on_step;
};

// Trains from scratch. Each epoch visits a fresh shuffle of the images,
// pairing every image with its successor in that order.
Checkpoint fit(const std::vector<Image>& images, const ModelConfig& cfg, Rng& rng,
               const FitOptions& options = {});

// G(E_c(img), e) with reflect padding up to a multiple of 4, cropped back.
Image translate(EntGan<float>& model, const Image& img, const env::EnvVector& e);

extern template struct Optimizers<float>;
extern template struct Optimizers<double>;

}  // namespace evci::gan

#endif  // EVCI_ENTGAN_TRAINER_HPP_
