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


#include "evci/entgan/config.hpp"

#include <json.hpp>

#include "evci/error.hpp"

namespace evci::gan {

ModelConfig ModelConfig::toy() {
  ModelConfig cfg;
  cfg.base_channels = 16;
  cfg.image_height = 32;
  cfg.image_width = 64;
  return cfg;
}

void ModelConfig::validate() const {
  if (base_channels == 0 || mlp_hidden == 0) {
    throw ArgumentError("channel widths must be positive");
  }
  if (image_height == 0 || image_width == 0 || image_height % kDownsample ||
      image_width % kDownsample) {
    throw ArgumentError("image size " + std::to_string(image_height) + "x" +
                        std::to_string(image_width) +
                        " must be positive and divisible by 4");
  }
  if (epochs == 0 || decay_start_epoch > epochs) {
    throw ArgumentError("decay start epoch must lie within the epoch count");
  }
  if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be positive");
}

LossWeights LossWeights::for_image(std::size_t height, std::size_t width) {
  if (height < ModelConfig::kDownsample || width < ModelConfig::kDownsample) {
    throw ArgumentError("image too small for loss weighting");
  }
  const double hw = static_cast<double>(height) * static_cast<double>(width);
  const double content = static_cast<double>(height / ModelConfig::kDownsample) *
                         static_cast<double>(width / ModelConfig::kDownsample);
  LossWeights w;
  w.rec = 10.0 / hw;
  w.cyc = 10.0 / hw;
  w.perc = 1.0 / content;
  return w;
}

std::string config_to_json(const ModelConfig& cfg) {
  nlohmann::ordered_json j;
  j["base_channels"] = cfg.base_channels;
  j["mlp_hidden"] = cfg.mlp_hidden;
  j["image_height"] = cfg.image_height;
  j["image_width"] = cfg.image_width;
  j["encoder_blocks"] = cfg.encoder_blocks;
  j["generator_blocks"] = cfg.generator_blocks;
  j["epochs"] = cfg.epochs;
  j["learning_rate"] = cfg.learning_rate;
  j["decay_start_epoch"] = cfg.decay_start_epoch;
  return j.dump();
}

ModelConfig config_from_json(const std::string& text) {
  ModelConfig cfg;
  try {
    const auto j = nlohmann::json::parse(text);
    cfg.base_channels = j.at("base_channels").get<std::size_t>();
    cfg.mlp_hidden = j.at("mlp_hidden").get<std::size_t>();
    cfg.image_height = j.at("image_height").get<std::size_t>();
    cfg.image_width = j.at("image_width").get<std::size_t>();
    cfg.encoder_blocks = j.at("encoder_blocks").get<std::size_t>();
    cfg.generator_blocks = j.at("generator_blocks").get<std::size_t>();
    cfg.epochs = j.at("epochs").get<std::size_t>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.decay_start_epoch = j.at("decay_start_epoch").get<std::size_t>();
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("bad model config: ") + ex.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace evci::gan
