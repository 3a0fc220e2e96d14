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


#ifndef EVCI_TESTS_SUPPORT_SYNTHETIC_HPP_
#define EVCI_TESTS_SUPPORT_SYNTHETIC_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "evci/dataset.hpp"
#include "evci/image.hpp"
#include "evci/rng.hpp"

namespace evci::testing {

// Smooth colored scene: a tinted gradient background with a few flat
// rectangles. Values stay inside [lo, hi] so affine edits have headroom.
inline Image synthetic_scene(std::size_t h, std::size_t w, Rng& rng,
                             double lo = 0.0, double hi = 1.0) {
  Image img(h, w);
  double base[3], dx[3], dy[3];
  for (int c = 0; c < 3; ++c) {
    base[c] = rng.uniform(0.25, 0.75);
    dx[c] = rng.uniform(-0.3, 0.3);
    dy[c] = rng.uniform(-0.3, 0.3);
  }
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double u = w > 1 ? static_cast<double>(x) / (w - 1) - 0.5 : 0.0;
      const double v = h > 1 ? static_cast<double>(y) / (h - 1) - 0.5 : 0.0;
      for (int c = 0; c < 3; ++c) {
        img.at(y, x, c) = std::clamp(base[c] + dx[c] * u + dy[c] * v, 0.0, 1.0);
      }
    }
  }
  const std::size_t rects = 1 + rng.index(3);
  for (std::size_t r = 0; r < rects; ++r) {
    const std::size_t rw = 1 + rng.index(std::max<std::size_t>(1, w / 2));
    const std::size_t rh = 1 + rng.index(std::max<std::size_t>(1, h / 2));
    const std::size_t x0 = rng.index(w - rw + 1);
    const std::size_t y0 = rng.index(h - rh + 1);
    const std::array<double, 3> color = {rng.uniform(), rng.uniform(), rng.uniform()};
    for (std::size_t y = y0; y < y0 + rh; ++y) {
      for (std::size_t x = x0; x < x0 + rw; ++x) img.set_pixel(y, x, color);
    }
  }
  for (double& v : img.pixels()) v = lo + (hi - lo) * v;
  return img;
}

inline Image random_image(std::size_t h, std::size_t w, Rng& rng) {
  Image img(h, w);
  for (double& v : img.pixels()) v = rng.uniform();
  return img;
}

inline std::vector<Image> synthetic_corpus(std::size_t n, std::size_t h,
                                           std::size_t w, Rng& rng) {
  std::vector<Image> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(synthetic_scene(h, w, rng));
  return out;
}

// At most one box per component class.
inline std::vector<data::BBox> random_boxes(std::size_t h, std::size_t w, Rng& rng,
                                            std::size_t max_boxes = 3) {
  std::vector<data::BBox> out;
  const std::size_t n = rng.index(std::min(max_boxes, data::kNumComponents) + 1);
  for (std::size_t i = 0; i < n; ++i) {
    data::BBox b;
    b.cls = static_cast<data::Component>(i);
    b.w = rng.uniform(1.0, w / 2.0);
    b.h = rng.uniform(1.0, h / 2.0);
    b.x = rng.uniform(0.0, w - b.w);
    b.y = rng.uniform(0.0, h - b.h);
    out.push_back(b);
  }
  return out;
}

// Writes n PNG scenes and a manifest.jsonl under dir. Every fourth record is
// val or test; capture conditions rotate through indoor, day and night.
inline std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir,
                                                     std::size_t n, std::size_t h,
                                                     std::size_t w, std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "img");
  Rng rng(seed);
  std::vector<data::DatasetRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    data::DatasetRecord r;
    r.path = "img/" + std::to_string(i) + ".png";
    r.vehicle = i % 2 ? data::Vehicle::kNiro : data::Vehicle::kBolt;
    switch (i % 3) {
      case 0:
        r.place = data::Place::kIndoor;
        break;
      case 1:
        r.place = data::Place::kOutdoor;
        r.time = data::TimeOfDay::kDaytime;
        r.weather = data::Weather::kSunny;
        break;
      default:
        r.place = data::Place::kOutdoor;
        r.time = data::TimeOfDay::kNight;
        r.weather = data::Weather::kSunny;
    }
    r.split = i % 4 != 3 ? data::Split::kTrain : (i % 8 == 3 ? data::Split::kVal : data::Split::kTest);
    r.width = w;
    r.height = h;
    r.boxes = random_boxes(h, w, rng);
    save_image(synthetic_scene(h, w, rng), dir / r.path);
    records.push_back(r);
  }
  const fs::path manifest = dir / "manifest.jsonl";
  std::ofstream out(manifest);
  data::write_manifest(out, records);
  return manifest;
}

// Image-free records whose capture conditions follow the reference
// per-condition counts. Each time group's records are dealt to train, val
// and test (in that order) using `split_counts[split][group]`.
inline std::vector<data::DatasetRecord> full_count_records(
    const std::array<std::array<std::size_t, 3>, 3>& split_counts) {
  using data::Place;
  using data::TimeOfDay;
  using data::Vehicle;
  using data::Weather;
  struct Capture {
    Vehicle v;
    Place p;
    TimeOfDay t;
    Weather w;
    std::size_t n;
  };
  const Capture captures[] = {
      {Vehicle::kBolt, Place::kIndoor, TimeOfDay::kNone, Weather::kNone, 1059},
      {Vehicle::kBolt, Place::kOutdoor, TimeOfDay::kDaytime, Weather::kSunny, 364},
      {Vehicle::kBolt, Place::kOutdoor, TimeOfDay::kMorning, Weather::kRainy, 341},
      {Vehicle::kBolt, Place::kOutdoor, TimeOfDay::kNight, Weather::kSunny, 326},
      {Vehicle::kBolt, Place::kOutdoor, TimeOfDay::kEvening, Weather::kSunny, 373},
      {Vehicle::kNiro, Place::kIndoor, TimeOfDay::kNone, Weather::kNone, 891},
      {Vehicle::kNiro, Place::kOutdoor, TimeOfDay::kDaytime, Weather::kSunny, 151},
      {Vehicle::kNiro, Place::kOutdoor, TimeOfDay::kMorning, Weather::kSunny, 153},
      {Vehicle::kNiro, Place::kOutdoor, TimeOfDay::kNight, Weather::kSunny, 254},
      {Vehicle::kNiro, Place::kOutdoor, TimeOfDay::kEvening, Weather::kSunny, 241},
  };
  std::vector<data::DatasetRecord> out;
  std::array<std::size_t, 3> dealt{};
  for (const Capture& c : captures) {
    for (std::size_t i = 0; i < c.n; ++i) {
      data::DatasetRecord r;
      r.vehicle = c.v;
      r.place = c.p;
      r.time = c.t;
      r.weather = c.w;
      const auto g = static_cast<std::size_t>(*data::time_group(r));
      std::size_t k = dealt[g]++;
      std::size_t split = 0;
      while (split < 2 && k >= split_counts[split][g]) k -= split_counts[split++][g];
      r.split = static_cast<data::Split>(split);
      r.path = "full/" + std::to_string(out.size()) + ".png";
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace evci::testing

#endif  // EVCI_TESTS_SUPPORT_SYNTHETIC_HPP_
