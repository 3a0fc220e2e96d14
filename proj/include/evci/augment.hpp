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


#ifndef EVCI_AUGMENT_HPP_
#define EVCI_AUGMENT_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evci/dataset.hpp"
#include "evci/entgan/model.hpp"
#include "evci/envvec.hpp"
#include "evci/image.hpp"
#include "evci/rng.hpp"

namespace evci::aug {

using data::BBox;
using env::EnvVector;

// Photometric image-to-image mapping toward an environment vector.
class Translator {
 public:
  virtual ~Translator() = default;
  virtual Image translate(const Image& img, const EnvVector& target) = 0;
};

struct ReferenceResult {
  Image image;
  // False when the input has zero contrast but the target does not.
  bool contrast_reachable = true;
  // False when the input has zero saturation but the target does not, or the
  // target exceeds what chroma scaling can reach inside [0, 1].
  bool saturation_reachable = true;
  // True when any channel had to be clamped into [0, 1].
  bool clamped = false;
};

// Deterministic translator: luma is remapped affinely so its mean and std
// match the denormalized target, then chroma (pixel minus luma) is scaled by
// one factor, found by bisection, so mean saturation matches the target.
ReferenceResult reference_translate(const Image& img, const EnvVector& target,
                                    const env::EnvStats& stats);

class ReferenceTranslator : public Translator {
 public:
  explicit ReferenceTranslator(env::EnvStats stats) : stats_(std::move(stats)) {}
  Image translate(const Image& img, const EnvVector& target) override;

 private:
  env::EnvStats stats_;
};

// Wraps a trained model; pads inputs to a multiple of 4.
class GanTranslator : public Translator {
 public:
  explicit GanTranslator(gan::EntGan<float>& model) : model_(model) {}
  Image translate(const Image& img, const EnvVector& target) override;

 private:
  gan::EntGan<float>& model_;
};

struct GeometricConfig {
  std::size_t target_w = 1333;
  std::size_t target_h = 800;
  double flip_probability = 0.5;
  bool scale_and_crop = false;
  double scale_min = 0.9;
  double scale_max = 1.1;
  std::size_t crop_w = 600;
  std::size_t crop_h = 384;
  // Boxes keeping less than this fraction of their area after clipping are
  // dropped.
  double min_box_retention = 0.25;
};

struct AugConfig {
  double mix_fraction = 0.5;
  env::Sampling sampling = env::Sampling::kUniform;
  // Normalized vectors for target-domain sampling.
  std::vector<EnvVector> target_pool;
  bool mosaic_enabled = false;
  std::size_t max_regions = 4;
  double region_min_fraction = 0.2;
  double region_max_fraction = 0.8;
  GeometricConfig geometric;

  // Throws ArgumentError on out-of-range fields.
  void validate() const;
};

enum class Provenance { kOriginal, kTranslated, kMosaic };

std::string_view to_string(Provenance p);

struct Region {
  Rect rect;
  EnvVector env;
};

struct Sample {
  Image image;
  std::vector<BBox> boxes;
  Provenance provenance = Provenance::kOriginal;
  // Guide for translated samples.
  std::optional<EnvVector> env;
  // Replaced regions of mosaic samples, in painting order.
  std::vector<Region> regions;
};

// One scheduled emission of the mixed stream.
struct StreamDraw {
  std::size_t record = 0;
  Provenance provenance = Provenance::kOriginal;
  std::optional<EnvVector> env;

  friend bool operator==(const StreamDraw&, const StreamDraw&) = default;
};

// Endless schedule over `record_count` records: records are visited in a
// fresh shuffled order each pass, and each emission is original with
// probability mix_fraction, otherwise translated (or mosaic, when enabled)
// toward a freshly sampled vector.
class MixedStream {
 public:
  MixedStream(std::size_t record_count, AugConfig cfg, Rng& rng);

  StreamDraw next();

 private:
  std::size_t count_;
  AugConfig cfg_;
  Rng& rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

std::vector<StreamDraw> mixed_stream(std::size_t record_count, std::size_t n,
                                     const AugConfig& cfg, Rng& rng);

// Produces the sample a draw describes. Mosaic draws consume `rng` for the
// region layout and per-region vectors.
Sample materialize(const StreamDraw& draw, const Image& img,
                   const std::vector<BBox>& boxes, Translator& translator,
                   const AugConfig& cfg, Rng& rng);

// Up to cfg.max_regions regions (count uniform in 0..max), each with integer
// width and height uniform over [ceil(min W), floor(max W)] (likewise for H)
// and a uniform in-bounds position, painted from a translated copy of the
// whole image with a fresh vector. Regions may overlap; later ones win.
Sample mosaic(const Image& img, const std::vector<BBox>& boxes,
              Translator& translator, const AugConfig& cfg, Rng& rng);

// Keep-aspect fit into target_w x target_h, random horizontal flip, then an
// optional random rescale and crop. Boxes follow the geometry, are clipped
// to the output, and are dropped when too little of them survives.
Sample detection_preprocess(const Sample& sample, const GeometricConfig& cfg,
                            Rng& rng);

}  // namespace evci::aug

#endif  // EVCI_AUGMENT_HPP_
