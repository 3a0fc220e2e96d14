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


#include <algorithm>
#include <cmath>

#include "evci/augment.hpp"
#include "evci/error.hpp"

namespace evci::aug {
namespace {

constexpr int kBisectionSteps = 80;
constexpr double kMaxChromaGain = 1024.0;
// Below this the input counts as flat; summation noise is not stretched.
constexpr double kFlatTolerance = 1e-9;

// Mean saturation after setting every pixel to luma' + a * (pixel - luma).
double mean_saturation(const std::vector<double>& new_luma, const Image& img,
                       const Plane& luma, double a) {
  const auto px = img.pixels();
  double sum = 0.0;
  for (std::size_t i = 0; i < new_luma.size(); ++i) {
    double c[3];
    for (std::size_t k = 0; k < 3; ++k) {
      c[k] = new_luma[i] + a * (px[i * 3 + k] - luma.values[i]);
    }
    sum += pixel_saturation(c[0], c[1], c[2]);
  }
  return sum / static_cast<double>(new_luma.size());
}

}  // namespace

ReferenceResult reference_translate(const Image& img, const EnvVector& target,
                                    const env::EnvStats& stats) {
  const env::RawEnvVector want = env::denormalize(target, stats);
  const env::RawEnvVector have = env::extract_raw(img);
  const Plane luma = luminance(img);
  const std::size_t n = img.pixel_count();

  ReferenceResult out{img, true, true, false};
  std::vector<double> new_luma(n);
  if (have.contrast() > kFlatTolerance) {
    const double gain = want.contrast() / have.contrast();
    for (std::size_t i = 0; i < n; ++i) {
      new_luma[i] = want.brightness() + (luma.values[i] - have.brightness()) * gain;
    }
  } else {
    out.contrast_reachable = want.contrast() <= 0.0;
    std::fill(new_luma.begin(), new_luma.end(), want.brightness());
  }

  // Mean saturation is non-decreasing in the chroma gain a before clamping,
  // so bisection on [0, hi] finds the target when it is bracketed.
  double a = 0.0;
  if (have.saturation() > kFlatTolerance) {
    double hi = 1.0;
    while (mean_saturation(new_luma, img, luma, hi) < want.saturation() &&
           hi < kMaxChromaGain) {
      hi *= 2.0;
    }
    if (mean_saturation(new_luma, img, luma, hi) < want.saturation()) {
      out.saturation_reachable = false;
      a = hi;
    } else {
      double lo = 0.0;
      for (int it = 0; it < kBisectionSteps; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mean_saturation(new_luma, img, luma, mid) < want.saturation()) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      a = 0.5 * (lo + hi);
    }
  } else {
    out.saturation_reachable = want.saturation() <= 0.0;
  }

  auto px = out.image.pixels();
  const auto src = img.pixels();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      const double v = new_luma[i] + a * (src[i * 3 + k] - luma.values[i]);
      const double c = std::clamp(v, 0.0, 1.0);
      if (c != v) out.clamped = true;
      px[i * 3 + k] = c;
    }
  }
  return out;
}

Image ReferenceTranslator::translate(const Image& img, const EnvVector& target) {
  return reference_translate(img, target, stats_).image;
}

}  // namespace evci::aug
