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


#ifndef EVCI_ENTGAN_CONFIG_HPP_
#define EVCI_ENTGAN_CONFIG_HPP_

#include <cstddef>
#include <string>

namespace evci::gan {

struct ModelConfig {
  std::size_t base_channels = 64;
  std::size_t mlp_hidden = 256;
  std::size_t image_height = 256;
  std::size_t image_width = 512;
  std::size_t encoder_blocks = 5;
  std::size_t generator_blocks = 4;
  std::size_t epochs = 20;
  double learning_rate = 2e-4;
  std::size_t decay_start_epoch = 10;

  // Content map: 4 * base_channels channels at a quarter of the resolution.
  static constexpr std::size_t kDownsample = 4;

  // 16 base channels at 32x64.
  static ModelConfig toy();

  std::size_t content_channels() const { return 4 * base_channels; }

  // Throws ArgumentError on zero widths, sizes not divisible by 4, or a
  // decay start past the last epoch.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Loss weights for an h x w training image with an h/4 x w/4 content map.
struct LossWeights {
  double rec = 0.0;
  double cyc = 0.0;
  double env = 0.5;
  double perc = 0.0;
  double adv_g = 0.5;
  double adv_d = 0.5;

  static LossWeights for_image(std::size_t height, std::size_t width);
};

std::string config_to_json(const ModelConfig& cfg);
ModelConfig config_from_json(const std::string& text);

}  // namespace evci::gan

#endif  // EVCI_ENTGAN_CONFIG_HPP_
