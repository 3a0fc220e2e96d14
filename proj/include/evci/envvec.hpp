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

#ifndef EVCI_ENVVEC_HPP_
#define EVCI_ENVVEC_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evci/image.hpp"
#include "evci/rng.hpp"

// Environment guide vectors: brightness, RMS contrast and saturation of an
// image, and their normalization against dataset-wide extrema.
namespace evci::env {

inline constexpr std::size_t kComponents = 3;
inline constexpr std::array<const char*, kComponents> kComponentNames = {
    "brightness", "contrast", "saturation"};

// Unnormalized descriptor: mean luminance, population standard deviation of
// luminance, mean HSV saturation.
struct RawEnvVector {
  std::array<double, kComponents> values{};

  double brightness() const { return values[0]; }
  double contrast() const { return values[1]; }
  double saturation() const { return values[2]; }

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  friend bool operator==(const RawEnvVector&, const RawEnvVector&) = default;
};

// Normalized descriptor, every component in [-1, 1].
struct EnvVector {
  std::array<double, kComponents> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  friend bool operator==(const EnvVector&, const EnvVector&) = default;
};

// Component-wise extrema over a set of images.
struct EnvStats {
  std::array<double, kComponents> min{};
  std::array<double, kComponents> max{};
  std::size_t n_images = 0;
  std::string source_manifest;

  friend bool operator==(const EnvStats&, const EnvStats&) = default;
};

RawEnvVector extract_raw(const Image& img);

// Throws ArgumentError on empty input.
EnvStats fit_stats(std::span<const RawEnvVector> vectors);

// Maps each component affinely onto [-1, 1] and clamps. Degenerate
// components (min == max) map to 0.
EnvVector normalize(const RawEnvVector& raw, const EnvStats& stats);
RawEnvVector denormalize(const EnvVector& e, const EnvStats& stats);

// extract_raw followed by normalize.
EnvVector extract(const Image& img, const EnvStats& stats);

// Parses "a,b,c" into a vector; throws ArgumentError on malformed input or
// components outside [-1, 1].
EnvVector parse_env(const std::string& text);
std::string format_env(const EnvVector& e);

// Empirical CDF points of one group.
struct CdfPoint {
  double value = 0.0;
  double fraction = 0.0;
};

struct GroupCdf {
  std::string group;
  std::vector<CdfPoint> points;
};

// One CDF per distinct group label, groups in first-appearance order. Ties
// collapse to one point carrying the final cumulative fraction. Throws
// ArgumentError on an unknown component index or mismatched label count.
std::vector<GroupCdf> cdf(std::span<const RawEnvVector> vectors,
                          std::size_t component,
                          std::span<const std::string> groups);

// Writes `value,fraction,group` rows with a header.
void write_cdf_csv(std::ostream& out, const std::vector<GroupCdf>& cdfs);

enum class Sampling { kUniform, kTargetDomain };

// Half-width of the additive noise used by target-domain sampling.
inline constexpr double kTargetDomainNoise = 0.2;

// Uniform: each component ~ U[-1, 1]. Target-domain: a pool vector chosen
// uniformly plus U[-0.2, 0.2] per component, clamped. Throws ArgumentError
// for target-domain sampling with an empty pool.
EnvVector sample_env(Sampling strategy, Rng& rng,
                     std::span<const EnvVector> target_pool = {});

Sampling parse_sampling(const std::string& text);

// JSON persistence: {"min":[..], "max":[..], "n_images":N,
// "source_manifest":"..."}.
std::string stats_to_json(const EnvStats& stats);
EnvStats stats_from_json(const std::string& text);
void save_stats(const EnvStats& stats, const std::filesystem::path& path);
EnvStats load_stats(const std::filesystem::path& path);

}  // namespace evci::env

#endif  // EVCI_ENVVEC_HPP_
