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

#ifndef EVCI_IMAGE_HPP_
#define EVCI_IMAGE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace evci {

// RGB raster with unit-interval channel values, row-major, interleaved.
class Image {
 public:
  static constexpr std::size_t kChannels = 3;

  // Throws ShapeError on a zero dimension, ArgumentError if fill is outside
  // [0, 1].
  Image(std::size_t height, std::size_t width, double fill = 0.0);

  // Takes ownership of `pixels` (height * width * 3 values, HWC order).
  // Throws ShapeError on a size mismatch, ArgumentError on out-of-range
  // values.
  static Image from_pixels(std::size_t height, std::size_t width,
                           std::vector<double> pixels);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t pixel_count() const noexcept { return height_ * width_; }

  double& at(std::size_t y, std::size_t x, std::size_t c) {
    return pixels_[(y * width_ + x) * kChannels + c];
  }
  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return pixels_[(y * width_ + x) * kChannels + c];
  }

  void set_pixel(std::size_t y, std::size_t x, std::array<double, 3> rgb);
  std::array<double, 3> pixel(std::size_t y, std::size_t x) const;

  std::span<double> pixels() noexcept { return pixels_; }
  std::span<const double> pixels() const noexcept { return pixels_; }

  // True when every channel lies in [0, 1].
  bool in_range() const noexcept;

  // Clamps every channel into [0, 1].
  void clamp();

  friend bool operator==(const Image&, const Image&) = default;

 private:
  Image() = default;

  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> pixels_;
};

// Single-channel map of per-pixel reals in [0, 1].
struct Plane {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  double at(std::size_t y, std::size_t x) const {
    return values[y * width + x];
  }
};

// Axis-aligned pixel rectangle, origin top-left.
struct Rect {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t w = 1;
  std::size_t h = 1;

  friend bool operator==(const Rect&, const Rect&) = default;
};

// Luma weights applied to R, G, B.
inline constexpr std::array<double, 3> kLumaWeights = {0.299, 0.587, 0.114};

double pixel_luminance(double r, double g, double b) noexcept;
// HSV saturation: (max - min) / max, or 0 when max is 0.
double pixel_saturation(double r, double g, double b) noexcept;

Plane luminance(const Image& img);
Plane saturation_map(const Image& img);

// Bilinear resampling with pixel-center alignment. With `keep_aspect` the
// image is scaled uniformly to fit inside target_w x target_h and the fitted
// (rounded) dimensions are returned.
Image resize(const Image& img, std::size_t target_w, std::size_t target_h,
             bool keep_aspect = false);

// Output dimensions (width, height) `resize` produces with keep_aspect.
std::pair<std::size_t, std::size_t> fit_dimensions(std::size_t width,
                                                   std::size_t height,
                                                   std::size_t target_w,
                                                   std::size_t target_h);

Image crop(const Image& img, const Rect& r);
Image hflip(const Image& img);

// 2x2 average pooling. Odd dimensions are reflect-padded by one row/column
// first (edge-replicated when the dimension is 1).
Image downsample2(const Image& img);

// q(v) = round(255 v).
std::uint8_t quantize(double v) noexcept;

// Loads an 8-bit RGB PNG or JPEG. Throws IoError for missing files and
// FormatError for undecodable or non-RGB content.
Image load_image(const std::filesystem::path& path);

// Writes PNG or JPEG depending on the extension (.png, .jpg, .jpeg).
void save_image(const Image& img, const std::filesystem::path& path,
                int jpeg_quality = 95);

}  // namespace evci

#endif  // EVCI_IMAGE_HPP_
