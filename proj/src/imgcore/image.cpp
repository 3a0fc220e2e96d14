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

#include "evci/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "evci/error.hpp"

namespace evci {

Image::Image(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width) {
  if (height == 0 || width == 0) {
    throw ShapeError("image dimensions must be positive, got " +
                     std::to_string(height) + "x" + std::to_string(width));
  }
  if (!(fill >= 0.0 && fill <= 1.0)) {
    throw ArgumentError("image fill value outside [0, 1]");
  }
  pixels_.assign(height * width * kChannels, fill);
}

Image Image::from_pixels(std::size_t height, std::size_t width,
                         std::vector<double> pixels) {
  if (height == 0 || width == 0) {
    throw ShapeError("image dimensions must be positive");
  }
  if (pixels.size() != height * width * kChannels) {
    throw ShapeError("pixel buffer has " + std::to_string(pixels.size()) +
                     " values, expected " +
                     std::to_string(height * width * kChannels));
  }
  Image img;
  img.height_ = height;
  img.width_ = width;
  img.pixels_ = std::move(pixels);
  if (!img.in_range()) {
    throw ArgumentError("pixel values outside [0, 1]");
  }
  return img;
}

void Image::set_pixel(std::size_t y, std::size_t x, std::array<double, 3> rgb) {
  double* p = &pixels_[(y * width_ + x) * kChannels];
  p[0] = rgb[0];
  p[1] = rgb[1];
  p[2] = rgb[2];
}

std::array<double, 3> Image::pixel(std::size_t y, std::size_t x) const {
  const double* p = &pixels_[(y * width_ + x) * kChannels];
  return {p[0], p[1], p[2]};
}

bool Image::in_range() const noexcept {
  return std::all_of(pixels_.begin(), pixels_.end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

void Image::clamp() {
  for (double& v : pixels_) v = std::clamp(v, 0.0, 1.0);
}

double pixel_luminance(double r, double g, double b) noexcept {
  return kLumaWeights[0] * r + kLumaWeights[1] * g + kLumaWeights[2] * b;
}

double pixel_saturation(double r, double g, double b) noexcept {
  const double hi = std::max({r, g, b});
  if (hi <= 0.0) return 0.0;
  const double lo = std::min({r, g, b});
  return (hi - lo) / hi;
}

Plane luminance(const Image& img) {
  Plane out{img.height(), img.width(), {}};
  out.values.resize(img.pixel_count());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = pixel_luminance(px[3 * i], px[3 * i + 1], px[3 * i + 2]);
  }
  return out;
}

Plane saturation_map(const Image& img) {
  Plane out{img.height(), img.width(), {}};
  out.values.resize(img.pixel_count());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = pixel_saturation(px[3 * i], px[3 * i + 1], px[3 * i + 2]);
  }
  return out;
}

std::pair<std::size_t, std::size_t> fit_dimensions(std::size_t width,
                                                   std::size_t height,
                                                   std::size_t target_w,
                                                   std::size_t target_h) {
  if (target_w == 0 || target_h == 0) {
    throw ShapeError("resize target dimensions must be positive");
  }
  const double scale =
      std::min(static_cast<double>(target_w) / static_cast<double>(width),
               static_cast<double>(target_h) / static_cast<double>(height));
  auto fitted = [scale](std::size_t n, std::size_t limit) {
    const auto v = static_cast<std::size_t>(
        std::lround(scale * static_cast<double>(n)));
    return std::clamp<std::size_t>(v, 1, limit);
  };
  return {fitted(width, target_w), fitted(height, target_h)};
}

namespace {

// Source sample positions and weights along one axis.
struct AxisTaps {
  std::vector<std::size_t> lo;
  std::vector<std::size_t> hi;
  std::vector<double> frac;
};

AxisTaps axis_taps(std::size_t src, std::size_t dst) {
  AxisTaps taps;
  taps.lo.resize(dst);
  taps.hi.resize(dst);
  taps.frac.resize(dst);
  const double scale = static_cast<double>(src) / static_cast<double>(dst);
  const double last = static_cast<double>(src - 1);
  for (std::size_t i = 0; i < dst; ++i) {
    double s = (static_cast<double>(i) + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, last);
    const auto l = static_cast<std::size_t>(std::floor(s));
    taps.lo[i] = l;
    taps.hi[i] = std::min(l + 1, src - 1);
    taps.frac[i] = s - static_cast<double>(l);
  }
  return taps;
}

}  // namespace

Image resize(const Image& img, std::size_t target_w, std::size_t target_h,
             bool keep_aspect) {
  if (target_w == 0 || target_h == 0) {
    throw ShapeError("resize target dimensions must be positive");
  }
  std::size_t out_w = target_w;
  std::size_t out_h = target_h;
  if (keep_aspect) {
    std::tie(out_w, out_h) =
        fit_dimensions(img.width(), img.height(), target_w, target_h);
  }
  if (out_w == img.width() && out_h == img.height()) return img;

  const AxisTaps xs = axis_taps(img.width(), out_w);
  const AxisTaps ys = axis_taps(img.height(), out_h);
  Image out(out_h, out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    const double fy = ys.frac[y];
    for (std::size_t x = 0; x < out_w; ++x) {
      const double fx = xs.frac[x];
      for (std::size_t c = 0; c < Image::kChannels; ++c) {
        const double top = (1.0 - fx) * img.at(ys.lo[y], xs.lo[x], c) +
                           fx * img.at(ys.lo[y], xs.hi[x], c);
        const double bottom = (1.0 - fx) * img.at(ys.hi[y], xs.lo[x], c) +
                              fx * img.at(ys.hi[y], xs.hi[x], c);
        out.at(y, x, c) = std::clamp((1.0 - fy) * top + fy * bottom, 0.0, 1.0);
      }
    }
  }
  return out;
}

Image crop(const Image& img, const Rect& r) {
  if (r.w == 0 || r.h == 0 || r.x + r.w > img.width() ||
      r.y + r.h > img.height()) {
    throw ShapeError("crop rectangle (" + std::to_string(r.x) + "," +
                     std::to_string(r.y) + "," + std::to_string(r.w) + "," +
                     std::to_string(r.h) + ") not inside " +
                     std::to_string(img.width()) + "x" +
                     std::to_string(img.height()) + " image");
  }
  Image out(r.h, r.w);
  for (std::size_t y = 0; y < r.h; ++y) {
    const auto src = img.pixels().subspan(
        ((r.y + y) * img.width() + r.x) * Image::kChannels,
        r.w * Image::kChannels);
    std::copy(src.begin(), src.end(),
              out.pixels().begin() +
                  static_cast<std::ptrdiff_t>(y * r.w * Image::kChannels));
  }
  return out;
}

Image hflip(const Image& img) {
  Image out(img.height(), img.width());
  const std::size_t w = img.width();
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      out.set_pixel(y, x, img.pixel(y, w - 1 - x));
    }
  }
  return out;
}

Image downsample2(const Image& img) {
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  const std::size_t out_h = (h + 1) / 2;
  const std::size_t out_w = (w + 1) / 2;
  // Index into the virtually padded image.
  auto src_row = [h](std::size_t y) {
    if (y < h) return y;
    return h >= 2 ? h - 2 : h - 1;
  };
  auto src_col = [w](std::size_t x) {
    if (x < w) return x;
    return w >= 2 ? w - 2 : w - 1;
  };
  Image out(out_h, out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    const std::size_t y0 = src_row(2 * y);
    const std::size_t y1 = src_row(2 * y + 1);
    for (std::size_t x = 0; x < out_w; ++x) {
      const std::size_t x0 = src_col(2 * x);
      const std::size_t x1 = src_col(2 * x + 1);
      for (std::size_t c = 0; c < Image::kChannels; ++c) {
        const double sum = img.at(y0, x0, c) + img.at(y0, x1, c) +
                           img.at(y1, x0, c) + img.at(y1, x1, c);
        out.at(y, x, c) = std::clamp(0.25 * sum, 0.0, 1.0);
      }
    }
  }
  return out;
}

std::uint8_t quantize(double v) noexcept {
  const double scaled = std::round(255.0 * std::clamp(v, 0.0, 1.0));
  return static_cast<std::uint8_t>(scaled);
}

}  // namespace evci
