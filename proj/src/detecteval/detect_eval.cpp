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


#include "evci/detect_eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "evci/error.hpp"

namespace evci::eval {
namespace {

std::size_t class_index(Component c) { return static_cast<std::size_t>(c); }

std::string format_threshold(std::size_t t) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << iou_threshold(t);
  return os.str();
}

}  // namespace

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

MatchResult match(const std::vector<BBox>& dets, const std::vector<BBox>& gts,
                  double threshold) {
  MatchResult r;
  r.tp.assign(dets.size(), false);
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t d = 0; d < dets.size(); ++d) {
    double best = threshold;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double v = iou(dets[d], gts[g]);
      if (v >= best && (best_gt == gts.size() || v > best)) {
        best = v;
        best_gt = g;
      }
    }
    if (best_gt < gts.size()) {
      taken[best_gt] = true;
      r.tp[d] = true;
    }
  }
  r.false_negatives = static_cast<std::size_t>(std::count(taken.begin(), taken.end(), false));
  return r;
}

std::optional<double> average_precision(const std::vector<bool>& tp,
                                        std::size_t n_gt) {
  if (n_gt == 0) return std::nullopt;
  const std::size_t n = tp.size();
  std::vector<double> precision(n), recall(n);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (tp[k]) ++hits;
    precision[k] = static_cast<double>(hits) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(hits) / static_cast<double>(n_gt);
  }
  for (std::size_t k = n; k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < kRecallPoints; ++i) {
    const double r = static_cast<double>(i) / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / static_cast<double>(kRecallPoints);
}

std::optional<double> EvalResult::class_ap(std::size_t cls) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : cells.at(cls)) {
    if (c) {
      sum += *c;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> EvalResult::threshold_ap(std::size_t t) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : cells) {
    if (row.at(t)) {
      sum += *row[t];
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

EvalResult coco_ap(const std::vector<Detection>& dets,
                   const std::vector<GroundTruth>& gts,
                   const std::vector<std::string>& images) {
  if (gts.empty()) throw ValidationError("no ground-truth boxes to evaluate against");
  std::map<std::string, std::size_t> image_index;
  for (const auto& p : images) image_index.emplace(p, image_index.size());
  for (const auto& g : gts) {
    if (!image_index.count(g.path)) image_index.emplace(g.path, image_index.size());
  }
  const std::size_t n_images = image_index.size();

  // gt_boxes[cls][image]
  std::vector<std::vector<std::vector<BBox>>> gt_boxes(
      kClasses, std::vector<std::vector<BBox>>(n_images));
  for (const auto& g : gts) {
    gt_boxes[class_index(g.box.cls)][image_index.at(g.path)].push_back(g.box);
  }

  // Per class: detection indices ranked by score, ties in input order.
  std::vector<std::vector<std::size_t>> ranked(kClasses);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const Detection& d = dets[i];
    if (!image_index.count(d.path)) {
      throw ValidationError("detection for unknown image '" + d.path + "'");
    }
    if (!std::isfinite(d.score)) {
      throw ValidationError("non-finite detection score for '" + d.path + "'");
    }
    if (!(d.box.w > 0.0 && d.box.h > 0.0)) {
      throw ValidationError("detection with non-positive size for '" + d.path + "'");
    }
    ranked[class_index(d.box.cls)].push_back(i);
  }
  for (auto& r : ranked) {
    std::stable_sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) {
      return dets[a].score > dets[b].score;
    });
  }

  EvalResult result;
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t c = 0; c < kClasses; ++c) {
    std::size_t n_gt = 0;
    for (const auto& v : gt_boxes[c]) n_gt += v.size();
    // Matching is per image, so split the ranking by image while keeping
    // each image's detections in rank order.
    std::vector<std::vector<std::size_t>> rank_of(n_images);
    std::vector<std::vector<BBox>> det_boxes(n_images);
    for (std::size_t k = 0; k < ranked[c].size(); ++k) {
      const Detection& d = dets[ranked[c][k]];
      const std::size_t im = image_index.at(d.path);
      rank_of[im].push_back(k);
      det_boxes[im].push_back(d.box);
    }
    for (std::size_t t = 0; t < kThresholds; ++t) {
      std::vector<bool> tp(ranked[c].size(), false);
      for (std::size_t im = 0; im < n_images; ++im) {
        if (det_boxes[im].empty()) continue;
        const MatchResult m = match(det_boxes[im], gt_boxes[c][im], iou_threshold(t));
        for (std::size_t k = 0; k < m.tp.size(); ++k) tp[rank_of[im][k]] = m.tp[k];
      }
      result.cells[c][t] = average_precision(tp, n_gt);
      if (result.cells[c][t]) {
        sum += *result.cells[c][t];
        ++defined;
      }
    }
  }
  result.ap = sum / static_cast<double>(defined);
  return result;
}

std::vector<GroundTruth> ground_truth(const std::vector<data::DatasetRecord>& records) {
  std::vector<GroundTruth> out;
  for (const auto& r : records) {
    for (const auto& b : r.boxes) out.push_back({r.path, b});
  }
  return out;
}

std::vector<Detection> parse_detections(std::istream& in, const std::string& source) {
  std::vector<Detection> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      Detection d;
      d.path = j.at("path").get<std::string>();
      d.box.cls = data::parse_component(j.at("cls").get<std::string>());
      d.score = j.at("score").get<double>();
      d.box.x = j.at("x").get<double>();
      d.box.y = j.at("y").get<double>();
      d.box.w = j.at("w").get<double>();
      d.box.h = j.at("h").get<double>();
      out.push_back(std::move(d));
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError(where + ex.what());
    } catch (const Error& ex) {
      throw FormatError(where + ex.what());
    }
  }
  return out;
}

std::vector<Detection> load_detections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return parse_detections(in, path.string());
}

std::string result_to_json(const EvalResult& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["ap"] = r.ap;
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  nlohmann::ordered_json cells = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < kClasses; ++c) {
    const std::string name(data::to_string(static_cast<Component>(c)));
    per_class[name] = opt(r.class_ap(c));
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < kThresholds; ++t) row.push_back(opt(r.cells[c][t]));
    cells[name] = row;
  }
  nlohmann::ordered_json per_iou = nlohmann::ordered_json::object();
  for (std::size_t t = 0; t < kThresholds; ++t) per_iou[format_threshold(t)] = opt(r.threshold_ap(t));
  j["per_class"] = per_class;
  j["per_iou"] = per_iou;
  j["cells"] = cells;
  return j.dump(2);
}

std::string result_to_text(const EvalResult& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << std::left << std::setw(14) << "class";
  for (std::size_t t = 0; t < kThresholds; ++t) os << std::setw(8) << format_threshold(t);
  os << "mean\n";
  auto cell = [&](const std::optional<double>& v) {
    if (v) {
      os << std::setw(8) << *v;
    } else {
      os << std::setw(8) << "-";
    }
  };
  for (std::size_t c = 0; c < kClasses; ++c) {
    os << std::setw(14) << data::to_string(static_cast<Component>(c));
    for (std::size_t t = 0; t < kThresholds; ++t) cell(r.cells[c][t]);
    cell(r.class_ap(c));
    os << "\n";
  }
  os << std::setw(14) << "all";
  for (std::size_t t = 0; t < kThresholds; ++t) cell(r.threshold_ap(t));
  os << r.ap << "\n";
  return os.str();
}

}  // namespace evci::eval
