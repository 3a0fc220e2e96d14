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


#ifndef EVCI_TESTS_SUPPORT_AP_ORACLE_HPP_
#define EVCI_TESTS_SUPPORT_AP_ORACLE_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "evci/detect_eval.hpp"
#include "evci/rng.hpp"

namespace evci::testing {

inline data::BBox eval_box(double x, double y, double w, double h,
                           data::Component c = data::Component::kTop) {
  return data::BBox{c, x, y, w, h};
}

// Independent evaluator: area arithmetic on corners, exhaustive greedy match,
// and the envelope taken directly as a max over all qualifying prefixes.
inline double naive_iou(const data::BBox& a, const data::BBox& b) {
  const double x0 = std::max(a.x, b.x), x1 = std::min(a.x + a.w, b.x + b.w);
  const double y0 = std::max(a.y, b.y), y1 = std::min(a.y + a.h, b.y + b.h);
  const double inter = (x1 > x0 && y1 > y0) ? (x1 - x0) * (y1 - y0) : 0.0;
  return inter / (a.w * a.h + b.w * b.h - inter);
}

inline double naive_ap(const std::vector<bool>& tp, std::size_t n_gt) {
  double sum = 0.0;
  for (std::size_t i = 0; i <= 100; ++i) {
    double best = 0.0;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < tp.size(); ++k) {
      hits += tp[k] ? 1 : 0;
      if (hits * 100 >= i * n_gt) best = std::max(best, double(hits) / double(k + 1));
    }
    sum += best;
  }
  return sum / 101.0;
}

inline double naive_coco(const std::vector<eval::Detection>& dets, const std::vector<eval::GroundTruth>& gts) {
  double total = 0.0;
  int cells = 0;
  for (int c = 0; c < 3; ++c) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < dets.size(); ++i)
      if (int(dets[i].box.cls) == c) order.push_back(i);
    // Insertion sort keeps equal scores in input order.
    for (std::size_t i = 1; i < order.size(); ++i)
      for (std::size_t j = i; j > 0 && dets[order[j]].score > dets[order[j - 1]].score; --j)
        std::swap(order[j], order[j - 1]);
    std::size_t n_gt = 0;
    for (const auto& g : gts) n_gt += int(g.box.cls) == c;
    if (n_gt == 0) continue;
    for (int t = 0; t < 10; ++t) {
      const double thr = 0.5 + 0.05 * t;
      std::vector<bool> used(gts.size(), false), tp;
      for (std::size_t i : order) {
        std::size_t best = gts.size();
        double best_iou = -1.0;
        for (std::size_t g = 0; g < gts.size(); ++g) {
          if (used[g] || int(gts[g].box.cls) != c || gts[g].path != dets[i].path) continue;
          const double v = naive_iou(dets[i].box, gts[g].box);
          if (v >= thr - 1e-12 && v > best_iou) {
            best_iou = v;
            best = g;
          }
        }
        if (best < gts.size()) used[best] = true;
        tp.push_back(best < gts.size());
      }
      total += naive_ap(tp, n_gt);
      ++cells;
    }
  }
  return total / cells;
}

struct Instance {
  std::vector<eval::Detection> dets;
  std::vector<eval::GroundTruth> gts;
  std::vector<std::string> images;
};

inline Instance random_instance(Rng& rng) {
  Instance in;
  const std::size_t n_images = 1 + rng.index(4);
  for (std::size_t im = 0; im < n_images; ++im) {
    const std::string path = "img" + std::to_string(im);
    in.images.push_back(path);
    const std::size_t n_gt = rng.index(6);
    for (std::size_t k = 0; k < n_gt; ++k) {
      const data::BBox g = eval_box(rng.uniform(0, 80), rng.uniform(0, 80), rng.uniform(5, 40),
                         rng.uniform(5, 40), data::Component(rng.index(3)));
      in.gts.push_back({path, g});
      const std::size_t copies = rng.index(3);
      for (std::size_t d = 0; d < copies; ++d) {
        data::BBox b = g;
        b.x += rng.uniform(-0.2, 0.2) * g.w;
        b.y += rng.uniform(-0.2, 0.2) * g.h;
        b.w *= rng.uniform(0.8, 1.2);
        b.h *= rng.uniform(0.8, 1.2);
        if (rng.bernoulli(0.1)) b.cls = data::Component(rng.index(3));
        // Coarse scores so ties occur.
        in.dets.push_back({path, b, double(rng.index(5)) / 4.0});
      }
    }
    const std::size_t spurious = rng.index(3);
    for (std::size_t k = 0; k < spurious; ++k) {
      in.dets.push_back({path,
                         eval_box(rng.uniform(0, 80), rng.uniform(0, 80), rng.uniform(5, 40),
                             rng.uniform(5, 40), data::Component(rng.index(3))),
                         double(rng.index(5)) / 4.0});
    }
  }
  if (in.gts.empty()) in.gts.push_back({"img0", eval_box(1, 1, 10, 10)});
  return in;
}

}  // namespace evci::testing

#endif  // EVCI_TESTS_SUPPORT_AP_ORACLE_HPP_
