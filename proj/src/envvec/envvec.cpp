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

#include "evci/envvec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "evci/error.hpp"

namespace evci::env {

RawEnvVector extract_raw(const Image& img) {
  const Plane luma = luminance(img);
  const Plane sat = saturation_map(img);
  const auto n = static_cast<double>(luma.values.size());

  const double mean_y =
      std::accumulate(luma.values.begin(), luma.values.end(), 0.0) / n;
  double sq = 0.0;
  for (double y : luma.values) sq += (y - mean_y) * (y - mean_y);
  const double mean_s =
      std::accumulate(sat.values.begin(), sat.values.end(), 0.0) / n;

  return RawEnvVector{{mean_y, std::sqrt(sq / n), mean_s}};
}

EnvStats fit_stats(std::span<const RawEnvVector> vectors) {
  if (vectors.empty()) {
    throw ArgumentError("cannot fit environment statistics on zero vectors");
  }
  EnvStats stats;
  stats.min = vectors.front().values;
  stats.max = vectors.front().values;
  for (const RawEnvVector& v : vectors) {
    for (std::size_t i = 0; i < kComponents; ++i) {
      stats.min[i] = std::min(stats.min[i], v[i]);
      stats.max[i] = std::max(stats.max[i], v[i]);
    }
  }
  stats.n_images = vectors.size();
  return stats;
}

EnvVector normalize(const RawEnvVector& raw, const EnvStats& stats) {
  EnvVector e;
  for (std::size_t i = 0; i < kComponents; ++i) {
    const double span = stats.max[i] - stats.min[i];
    if (!(span > 0.0)) {
      e[i] = 0.0;
      continue;
    }
    e[i] = std::clamp(2.0 * (raw[i] - stats.min[i]) / span - 1.0, -1.0, 1.0);
  }
  return e;
}

RawEnvVector denormalize(const EnvVector& e, const EnvStats& stats) {
  RawEnvVector raw;
  for (std::size_t i = 0; i < kComponents; ++i) {
    const double span = stats.max[i] - stats.min[i];
    raw[i] = stats.min[i] + (e[i] + 1.0) * 0.5 * span;
  }
  return raw;
}

EnvVector extract(const Image& img, const EnvStats& stats) {
  return normalize(extract_raw(img), stats);
}

EnvVector parse_env(const std::string& text) {
  EnvVector e;
  std::stringstream ss(text);
  std::string item;
  std::size_t count = 0;
  while (std::getline(ss, item, ',')) {
    if (count == kComponents) {
      ++count;
      break;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ArgumentError("malformed environment vector '" + text + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size() || !std::isfinite(v)) {
      throw ArgumentError("malformed environment vector '" + text + "'");
    }
    if (v < -1.0 || v > 1.0) {
      throw ArgumentError("environment vector component " +
                          std::to_string(count) + " outside [-1, 1] in '" +
                          text + "'");
    }
    e[count++] = v;
  }
  if (count != kComponents) {
    throw ArgumentError("environment vector '" + text +
                        "' must have exactly three components");
  }
  return e;
}

std::string format_env(const EnvVector& e) {
  std::ostringstream out;
  out.precision(17);
  out << e[0] << ',' << e[1] << ',' << e[2];
  return out.str();
}

std::vector<GroupCdf> cdf(std::span<const RawEnvVector> vectors,
                          std::size_t component,
                          std::span<const std::string> groups) {
  if (component >= kComponents) {
    throw ArgumentError("unknown environment component index " +
                        std::to_string(component));
  }
  if (groups.size() != vectors.size()) {
    throw ArgumentError("cdf needs one group label per vector");
  }
  std::vector<GroupCdf> out;
  std::vector<std::vector<double>> values;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    auto it = std::find_if(out.begin(), out.end(), [&](const GroupCdf& g) {
      return g.group == groups[i];
    });
    std::size_t slot = static_cast<std::size_t>(it - out.begin());
    if (it == out.end()) {
      out.push_back(GroupCdf{groups[i], {}});
      values.emplace_back();
    }
    values[slot].push_back(vectors[i][component]);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    auto& vals = values[g];
    std::sort(vals.begin(), vals.end());
    const auto n = static_cast<double>(vals.size());
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (k + 1 < vals.size() && vals[k + 1] == vals[k]) continue;
      out[g].points.push_back(
          CdfPoint{vals[k], static_cast<double>(k + 1) / n});
    }
  }
  return out;
}

void write_cdf_csv(std::ostream& out, const std::vector<GroupCdf>& cdfs) {
  const auto old_precision = out.precision(17);
  out << "value,fraction,group\n";
  for (const GroupCdf& g : cdfs) {
    for (const CdfPoint& p : g.points) {
      out << p.value << ',' << p.fraction << ',' << g.group << '\n';
    }
  }
  out.precision(old_precision);
}

EnvVector sample_env(Sampling strategy, Rng& rng,
                     std::span<const EnvVector> target_pool) {
  EnvVector e;
  if (strategy == Sampling::kUniform) {
    for (std::size_t i = 0; i < kComponents; ++i) e[i] = rng.uniform(-1.0, 1.0);
    return e;
  }
  if (target_pool.empty()) {
    throw ArgumentError("target-domain sampling needs a non-empty pool");
  }
  const EnvVector& base = target_pool[rng.index(target_pool.size())];
  for (std::size_t i = 0; i < kComponents; ++i) {
    const double noise = rng.uniform(-kTargetDomainNoise, kTargetDomainNoise);
    e[i] = std::clamp(base[i] + noise, -1.0, 1.0);
  }
  return e;
}

Sampling parse_sampling(const std::string& text) {
  if (text == "uniform") return Sampling::kUniform;
  if (text == "target") return Sampling::kTargetDomain;
  throw ArgumentError("unknown sampling strategy '" + text +
                      "' (expected uniform or target)");
}

std::string stats_to_json(const EnvStats& stats) {
  nlohmann::ordered_json j;
  j["min"] = stats.min;
  j["max"] = stats.max;
  j["n_images"] = stats.n_images;
  j["source_manifest"] = stats.source_manifest;
  return j.dump(2) + "\n";
}

EnvStats stats_from_json(const std::string& text) {
  EnvStats stats;
  try {
    const auto j = nlohmann::json::parse(text);
    stats.min = j.at("min").get<std::array<double, kComponents>>();
    stats.max = j.at("max").get<std::array<double, kComponents>>();
    stats.n_images = j.at("n_images").get<std::size_t>();
    stats.source_manifest = j.value("source_manifest", std::string{});
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("malformed environment statistics: ") +
                      ex.what());
  }
  for (std::size_t i = 0; i < kComponents; ++i) {
    if (!(stats.min[i] <= stats.max[i])) {
      throw ValidationError("environment statistics have min > max for " +
                            std::string(kComponentNames[i]));
    }
  }
  if (stats.n_images == 0) {
    throw ValidationError("environment statistics fitted on zero images");
  }
  return stats;
}

void save_stats(const EnvStats& stats, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << stats_to_json(stats);
}

EnvStats load_stats(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return stats_from_json(ss.str());
}

}  // namespace evci::env
