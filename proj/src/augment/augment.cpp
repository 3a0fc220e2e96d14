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


#include "evci/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evci/entgan/trainer.hpp"
#include "evci/error.hpp"

namespace evci::aug {
namespace {

struct Span {
  std::size_t lo = 0;
  std::size_t hi = 0;
  bool empty() const { return lo > hi; }
};

Span region_span(std::size_t dim, double lo, double hi) {
  const double d = static_cast<double>(dim);
  // Small tolerance so products like 0.2 * 10 land on the exact integer.
  return {static_cast<std::size_t>(std::ceil(lo * d - 1e-9)),
          static_cast<std::size_t>(std::floor(hi * d + 1e-9))};
}

void scale_boxes(std::vector<BBox>& boxes, double sx, double sy) {
  for (BBox& b : boxes) {
    b.x *= sx;
    b.w *= sx;
    b.y *= sy;
    b.h *= sy;
  }
}

// Moves boxes by (-dx, -dy), clips them to [0, w] x [0, h] and keeps those
// retaining at least `retention` of their area.
std::vector<BBox> clip_boxes(const std::vector<BBox>& boxes, double dx, double dy,
                             double w, double h, double retention) {
  std::vector<BBox> out;
  for (const BBox& b : boxes) {
    const double x0 = std::max(0.0, b.x - dx);
    const double y0 = std::max(0.0, b.y - dy);
    const double x1 = std::min(w, b.x - dx + b.w);
    const double y1 = std::min(h, b.y - dy + b.h);
    if (x1 <= x0 || y1 <= y0) continue;
    BBox c = b;
    c.x = x0;
    c.y = y0;
    c.w = x1 - x0;
    c.h = y1 - y0;
    if (c.area() < retention * b.area()) continue;
    out.push_back(c);
  }
  return out;
}

}  // namespace

void AugConfig::validate() const {
  if (!(mix_fraction >= 0.0 && mix_fraction <= 1.0)) {
    throw ArgumentError("mix fraction must lie in [0, 1]");
  }
  if (!(region_min_fraction > 0.0 && region_min_fraction <= region_max_fraction &&
        region_max_fraction <= 1.0)) {
    throw ArgumentError("region fractions must satisfy 0 < min <= max <= 1");
  }
  if (sampling == env::Sampling::kTargetDomain && target_pool.empty()) {
    throw ArgumentError("target-domain sampling needs a non-empty pool");
  }
  const GeometricConfig& g = geometric;
  if (g.target_w == 0 || g.target_h == 0 || g.crop_w == 0 || g.crop_h == 0) {
    throw ArgumentError("geometric target and crop sizes must be positive");
  }
  if (!(g.scale_min > 0.0 && g.scale_min <= g.scale_max)) {
    throw ArgumentError("scale range must satisfy 0 < min <= max");
  }
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kOriginal: return "original";
    case Provenance::kTranslated: return "translated";
    case Provenance::kMosaic: return "mosaic";
  }
  return "?";
}

Image GanTranslator::translate(const Image& img, const EnvVector& target) {
  return gan::translate(model_, img, target);
}

MixedStream::MixedStream(std::size_t record_count, AugConfig cfg, Rng& rng)
    : count_(record_count), cfg_(std::move(cfg)), rng_(rng), order_(record_count) {
  if (count_ == 0) throw ArgumentError("mixed stream needs at least one record");
  cfg_.validate();
  std::iota(order_.begin(), order_.end(), std::size_t{0});
}

StreamDraw MixedStream::next() {
  if (pos_ == 0) rng_.shuffle(order_);
  StreamDraw d;
  d.record = order_[pos_];
  pos_ = (pos_ + 1) % count_;
  if (!rng_.bernoulli(cfg_.mix_fraction)) {
    if (cfg_.mosaic_enabled) {
      d.provenance = Provenance::kMosaic;
    } else {
      d.provenance = Provenance::kTranslated;
      d.env = env::sample_env(cfg_.sampling, rng_, cfg_.target_pool);
    }
  }
  return d;
}

std::vector<StreamDraw> mixed_stream(std::size_t record_count, std::size_t n,
                                     const AugConfig& cfg, Rng& rng) {
  MixedStream stream(record_count, cfg, rng);
  std::vector<StreamDraw> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(stream.next());
  return out;
}

Sample materialize(const StreamDraw& draw, const Image& img,
                   const std::vector<BBox>& boxes, Translator& translator,
                   const AugConfig& cfg, Rng& rng) {
  switch (draw.provenance) {
    case Provenance::kOriginal:
      return Sample{img, boxes, Provenance::kOriginal, std::nullopt, {}};
    case Provenance::kTranslated: {
      if (!draw.env) throw ArgumentError("translated draw without a vector");
      return Sample{translator.translate(img, *draw.env), boxes,
                    Provenance::kTranslated, draw.env, {}};
    }
    case Provenance::kMosaic:
      return mosaic(img, boxes, translator, cfg, rng);
  }
  throw ArgumentError("unknown provenance");
}

Sample mosaic(const Image& img, const std::vector<BBox>& boxes,
              Translator& translator, const AugConfig& cfg, Rng& rng) {
  Sample out{img, boxes, Provenance::kMosaic, std::nullopt, {}};
  const std::size_t k = rng.index(cfg.max_regions + 1);
  const Span ws = region_span(img.width(), cfg.region_min_fraction, cfg.region_max_fraction);
  const Span hs = region_span(img.height(), cfg.region_min_fraction, cfg.region_max_fraction);
  if (ws.empty() || hs.empty() || ws.lo == 0 || hs.lo == 0) return out;
  for (std::size_t i = 0; i < k; ++i) {
    Region region;
    region.rect.w = static_cast<std::size_t>(rng.integer(
        static_cast<std::int64_t>(ws.lo), static_cast<std::int64_t>(ws.hi)));
    region.rect.h = static_cast<std::size_t>(rng.integer(
        static_cast<std::int64_t>(hs.lo), static_cast<std::int64_t>(hs.hi)));
    region.rect.x = rng.index(img.width() - region.rect.w + 1);
    region.rect.y = rng.index(img.height() - region.rect.h + 1);
    region.env = env::sample_env(cfg.sampling, rng, cfg.target_pool);
    const Image translated = translator.translate(img, region.env);
    const Rect& r = region.rect;
    for (std::size_t y = r.y; y < r.y + r.h; ++y) {
      for (std::size_t x = r.x; x < r.x + r.w; ++x) {
        out.image.set_pixel(y, x, translated.pixel(y, x));
      }
    }
    out.regions.push_back(region);
  }
  return out;
}

Sample detection_preprocess(const Sample& sample, const GeometricConfig& cfg,
                            Rng& rng) {
  Sample out = sample;
  const Image& src = sample.image;
  out.image = resize(src, cfg.target_w, cfg.target_h, true);
  scale_boxes(out.boxes, static_cast<double>(out.image.width()) / src.width(),
              static_cast<double>(out.image.height()) / src.height());
  out.boxes = clip_boxes(out.boxes, 0.0, 0.0, out.image.width(), out.image.height(),
                         cfg.min_box_retention);

  if (rng.bernoulli(cfg.flip_probability)) {
    out.image = hflip(out.image);
    const double w = static_cast<double>(out.image.width());
    for (BBox& b : out.boxes) b.x = w - b.x - b.w;
  }

  if (cfg.scale_and_crop) {
    const double s = rng.uniform(cfg.scale_min, cfg.scale_max);
    const std::size_t w0 = out.image.width(), h0 = out.image.height();
    const auto scaled = [s](std::size_t d) {
      return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(d * s)));
    };
    out.image = resize(out.image, scaled(w0), scaled(h0));
    scale_boxes(out.boxes, static_cast<double>(out.image.width()) / w0,
                static_cast<double>(out.image.height()) / h0);
    Rect r;
    r.w = std::min(cfg.crop_w, out.image.width());
    r.h = std::min(cfg.crop_h, out.image.height());
    r.x = rng.index(out.image.width() - r.w + 1);
    r.y = rng.index(out.image.height() - r.h + 1);
    out.image = crop(out.image, r);
    out.boxes = clip_boxes(out.boxes, static_cast<double>(r.x), static_cast<double>(r.y),
                           static_cast<double>(r.w), static_cast<double>(r.h),
                           cfg.min_box_retention);
  }
  return out;
}

}  // namespace evci::aug
