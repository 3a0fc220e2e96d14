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


#ifndef EVCI_DETECT_EVAL_HPP_
#define EVCI_DETECT_EVAL_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evci/dataset.hpp"

namespace evci::eval {

using data::BBox;
using data::Component;

inline constexpr std::size_t kClasses = 3;
inline constexpr std::size_t kThresholds = 10;
inline constexpr std::size_t kRecallPoints = 101;

// IoU threshold i: 0.50, 0.55, ..., 0.95.
inline double iou_threshold(std::size_t i) {
  return static_cast<double>(10 + i) / 20.0;
}

struct Detection {
  std::string path;
  BBox box;  // box.cls is the predicted class
  double score = 0.0;
};

struct GroundTruth {
  std::string path;
  BBox box;
};

// Intersection over union; 0 for disjoint boxes.
double iou(const BBox& a, const BBox& b);

struct MatchResult {
  // Per detection, in the order of the sorted input.
  std::vector<bool> tp;
  std::size_t false_negatives = 0;
};

// Greedy matching for one class on one image. `dets` must already be in
// descending score order. Each detection takes the unmatched ground truth
// with the highest IoU >= threshold (earliest ground truth on IoU ties).
MatchResult match(const std::vector<BBox>& dets, const std::vector<BBox>& gts,
                  double threshold);

// 101-point interpolated AP from TP flags in descending score order.
// Returns nullopt when n_gt is 0.
std::optional<double> average_precision(const std::vector<bool>& tp,
                                        std::size_t n_gt);

struct EvalResult {
  // [class][threshold]; nullopt where the class has no ground truth.
  std::array<std::array<std::optional<double>, kThresholds>, kClasses> cells{};
  // Mean over defined cells.
  double ap = 0.0;

  // Mean over thresholds for one class, or over classes for one threshold.
  std::optional<double> class_ap(std::size_t cls) const;
  std::optional<double> threshold_ap(std::size_t t) const;
};

// Detections are ranked per class across all images by descending score,
// ties kept in input order. Throws ValidationError when there is no ground
// truth at all, or a detection names an image without ground-truth entry in
// `images`, or has a non-finite score or non-positive size.
EvalResult coco_ap(const std::vector<Detection>& dets,
                   const std::vector<GroundTruth>& gts,
                   const std::vector<std::string>& images);

// Ground truth of every record; every record path counts as an image.
std::vector<GroundTruth> ground_truth(const std::vector<data::DatasetRecord>& records);

// JSON Lines {"path","cls","score","x","y","w","h"}.
std::vector<Detection> parse_detections(std::istream& in, const std::string& source);
std::vector<Detection> load_detections(const std::filesystem::path& path);

std::string result_to_json(const EvalResult& r);
std::string result_to_text(const EvalResult& r);

}  // namespace evci::eval

#endif  // EVCI_DETECT_EVAL_HPP_
