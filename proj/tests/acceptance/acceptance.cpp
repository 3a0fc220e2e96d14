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


// Acceptance runner: one PASS/FAIL line per criterion, each with its
// measured runtime against a budget. Exit status is non-zero on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ap_oracle.hpp"
#include "evci/augment.hpp"
#include "evci/dataset.hpp"
#include "evci/detect_eval.hpp"
#include "evci/entgan/losses.hpp"
#include "evci/entgan/trainer.hpp"
#include "evci/envvec.hpp"
#include "evci/nn/gradcheck.hpp"
#include "gradient_suite.hpp"
#include "loss_oracle.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace evci;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // 0: no budget
  std::function<Outcome()> run;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ------------------------------------------------------------------ 1, 2

Outcome env_exactness() {
  double worst = 0.0;
  auto check = [&](const Image& img, std::array<double, 3> want) {
    const env::RawEnvVector r = env::extract_raw(img);
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(r[k] - want[k]));
  };
  for (double v : {0.0, 0.137, 0.5, 0.81, 1.0}) check(Image(6, 9, v), {v, 0.0, 0.0});
  Image half(4, 8, 0.0);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 4; x < 8; ++x) half.set_pixel(y, x, {1.0, 1.0, 1.0});
  check(half, {0.5, 0.5, 0.0});
  Image red(5, 5);
  for (std::size_t y = 0; y < 5; ++y)
    for (std::size_t x = 0; x < 5; ++x) red.set_pixel(y, x, {1.0, 0.0, 0.0});
  check(red, {0.299, 0.0, 1.0});
  return {worst <= 1e-9, "max deviation " + num(worst)};
}

Outcome normalization_contract() {
  Rng rng(21);
  double worst_fixed = 0.0, worst_round = 0.0;
  for (int t = 0; t < 20; ++t) {
    env::EnvStats s;
    for (int k = 0; k < 3; ++k) {
      s.min[k] = rng.uniform(0.0, 0.4);
      s.max[k] = s.min[k] + rng.uniform(0.05, 0.6);
    }
    env::RawEnvVector lo, hi, mid;
    for (int k = 0; k < 3; ++k) {
      lo[k] = s.min[k];
      hi[k] = s.max[k];
      mid[k] = 0.5 * (s.min[k] + s.max[k]);
    }
    const env::EnvVector a = env::normalize(lo, s), b = env::normalize(hi, s), c = env::normalize(mid, s);
    for (int k = 0; k < 3; ++k) {
      worst_fixed = std::max({worst_fixed, std::abs(a[k] + 1.0), std::abs(b[k] - 1.0), std::abs(c[k])});
    }
    for (int i = 0; i < 50; ++i) {
      env::EnvVector e;
      for (int k = 0; k < 3; ++k) e[k] = rng.uniform(-1.0, 1.0);
      const env::EnvVector back = env::normalize(env::denormalize(e, s), s);
      for (int k = 0; k < 3; ++k) worst_round = std::max(worst_round, std::abs(back[k] - e[k]));
    }
  }
  return {worst_fixed <= 1e-12 && worst_round <= 1e-12,
          "endpoints " + num(worst_fixed) + ", round trip over 1000 vectors " + num(worst_round)};
}

// ------------------------------------------------------------------ 3, 4, 5

struct TinySetup {
  Rng rng{17};
  gan::EntGan<double> model{testing::tiny_config(), rng};
  std::vector<Image> images = testing::synthetic_corpus(4, 32, 64, rng);
  env::EnvStats stats = testing::stats_for(images);
};

Outcome gradient_suite() {
  double worst_op = 0.0;
  std::string worst_name;
  std::size_t ops = 0;
  for (const auto& r : testing::run_op_gradient_suite(31, 50)) {
    ++ops;
    if (r.worst >= worst_op) {
      worst_op = r.worst;
      worst_name = r.op;
    }
  }
  const auto env_r = testing::run_env_feature_gradient_trials(32, 50);
  if (env_r.worst > worst_op) {
    worst_op = env_r.worst;
    worst_name = env_r.op;
  }

  TinySetup s;
  const gan::LossWeights w = gan::LossWeights::for_image(32, 64);
  auto& params = s.model.eg_params();
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (int i = 0; i < 20; ++i) {
    const std::size_t p = s.rng.index(params.size());
    coords.emplace_back(p, s.rng.index(params.items()[p].value.size()));
  }
  const auto comp = nn::grad_check_parameters(params, [&](nn::Graph<double>& g) {
    gan::Binder<double> eg(g, true);
    gan::Binder<double> d(g, false);
    const auto t = gan::translate_pair(s.model, eg, s.images[0], s.images[1], s.stats);
    return gan::generator_terms(s.model, d, t, s.stats, w).total;
  }, coords);
  return {worst_op <= 1e-4 && comp.max_rel_error <= 1e-3 && comp.checked == coords.size(),
          std::to_string(ops + 1) + " ops x 50 trials worst " + num(worst_op) + " (" + worst_name +
              "); total_eg over " + std::to_string(comp.checked) + " parameters " +
              num(comp.max_rel_error)};
}

Outcome loss_oracle() {
  TinySetup s;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    for (auto* set : {&s.model.eg_params(), &s.model.d_params()})
      for (auto& p : set->items())
        for (double& v : p.value.values()) v += 0.02 * s.rng.normal();
    const Image I = testing::synthetic_scene(32, 64, s.rng);
    const Image Ip = testing::synthetic_scene(32, 64, s.rng);
    const gan::LossReport r = gan::evaluate_losses(s.model, I, Ip, s.stats);
    worst = std::max(worst, testing::max_loss_rel_diff(r, testing::oracle_losses(s.model, I, Ip, s.stats)));
  }
  const nn::Tensor<double> real = nn::image_to_tensor<double>(s.images[0]);
  const std::array<nn::Tensor<double>, 3> fakes = {nn::image_to_tensor<double>(s.images[1]),
                                                   nn::image_to_tensor<double>(s.images[2]),
                                                   nn::image_to_tensor<double>(s.images[3])};
  testing::set_constant_discriminator(s.model, 1.0);
  const auto [g1, d1] = gan::loss_adv(s.model, real, fakes);
  testing::set_constant_discriminator(s.model, 0.0);
  const auto [g0, d0] = gan::loss_adv(s.model, real, fakes);
  const bool closed = g1 == 0.0 && d1 == 6.0 && g0 == 6.0 && d0 == 2.0;
  return {worst <= 1e-9 && closed,
          "max relative difference " + num(worst) + " over 20 trials; constant D (g,d) = (" +
              num(g1) + "," + num(d1) + ") and (" + num(g0) + "," + num(d0) + ")"};
}

Outcome weighting_identity() {
  TinySetup s;
  const gan::LossWeights w = gan::LossWeights::for_image(32, 64);
  bool ok = w.rec == 10.0 / 2048.0 && w.cyc == w.rec && w.perc == 1.0 / 128.0 &&
            w.env == 0.5 && w.adv_g == 0.5 && w.adv_d == 0.5;
  for (int t = 0; t < 5; ++t) {
    const gan::LossReport r = gan::evaluate_losses(s.model, s.images[t % 4], s.images[(t + 1) % 4], s.stats);
    ok = ok && r.total_eg == w.rec * r.l_rec + w.cyc * r.l_cyc + w.env * r.l_env +
                                w.perc * r.l_perc + w.adv_g * r.l_adv_g;
    ok = ok && r.total_d == w.adv_d * r.l_adv_d;
  }
  return {ok, "weights and five loss reports"};
}

// ------------------------------------------------------------------ 6

double reconstruction_error(gan::EntGan<float>& m, const std::vector<Image>& images,
                            const env::EnvStats& stats) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const Image& img : images) {
    const Image out = gan::translate(m, img, env::extract(img, stats));
    for (std::size_t i = 0; i < img.pixels().size(); ++i) sum += std::abs(out.pixels()[i] - img.pixels()[i]);
    n += img.pixels().size();
  }
  return sum / static_cast<double>(n);
}

Outcome toy_training() {
  Rng rng(2026);
  const auto images = testing::synthetic_corpus(20, 32, 64, rng);
  const env::EnvStats stats = testing::stats_for(images);
  gan::FitOptions opt;
  opt.max_iterations = 200;
  opt.stats = stats;
  std::vector<double> total;
  bool finite = true;
  double rec10 = 0.0, rec200 = 0.0;
  opt.on_step = [&](const gan::StepLog& l, gan::EntGan<float>& m) {
    const auto& r = l.losses;
    for (double v : {r.l_rec, r.l_cyc, r.l_env, r.l_perc, r.l_adv_g, r.l_adv_d, r.total_eg, r.total_d})
      finite = finite && std::isfinite(v);
    total.push_back(r.total_eg);
    if (l.iteration == 10) rec10 = reconstruction_error(m, images, stats);
    if (l.iteration == 200) rec200 = reconstruction_error(m, images, stats);
  };
  gan::Checkpoint c = gan::fit(images, gan::ModelConfig::toy(), rng, opt);
  for (const auto* set : {&c.model.eg_params(), &c.model.d_params()})
    for (const auto& p : set->items())
      for (float v : p.value.values()) finite = finite && std::isfinite(v);
  if (total.size() != 200) return {false, "ran " + std::to_string(total.size()) + " steps"};
  const auto ma = [&](std::size_t end) {
    double s = 0.0;
    for (std::size_t i = end - 10; i < end; ++i) s += total[i];
    return s / 10.0;
  };
  const double drop = 1.0 - ma(200) / ma(10);
  return {finite && drop >= 0.20 && rec200 < rec10,
          "total_eg MA10 " + num(ma(10)) + " -> " + num(ma(200)) + " (drop " + num(100 * drop) +
              "%), reconstruction error " + num(rec10) + " -> " + num(rec200) +
              (finite ? ", all finite" : ", NON-FINITE")};
}

// ------------------------------------------------------------------ 7, 8, 9

Outcome reference_roundtrip() {
  Rng rng(41);
  std::vector<Image> images;
  for (int i = 0; i < 100; ++i) images.push_back(testing::synthetic_scene(24, 32, rng, 0.15, 0.85));
  const env::EnvStats stats = testing::stats_for(images);
  double worst = 0.0;
  std::size_t checked = 0, skipped = 0;
  for (const Image& img : images) {
    const env::EnvVector own = env::extract(img, stats);
    for (int k = 0; k < 10; ++k) {
      env::EnvVector e;
      for (int i = 0; i < 3; ++i) e[i] = std::clamp(own[i] + rng.uniform(-0.4, 0.4), -1.0, 1.0);
      const aug::ReferenceResult r = aug::reference_translate(img, e, stats);
      if (r.clamped || !r.contrast_reachable || !r.saturation_reachable) {
        ++skipped;
        continue;
      }
      const env::EnvVector got = env::extract(r.image, stats);
      for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(got[i] - e[i]));
      ++checked;
    }
  }
  return {worst <= 0.02 && checked >= 200,
          "worst l_inf " + num(worst) + " over " + std::to_string(checked) +
              " clamp-free targets (" + std::to_string(skipped) + " clamped or unreachable skipped)"};
}

Outcome mixing_ratio() {
  aug::AugConfig cfg;
  Rng a(51), b(51);
  const auto da = aug::mixed_stream(100, 10000, cfg, a);
  const auto db = aug::mixed_stream(100, 10000, cfg, b);
  const auto originals = std::count_if(da.begin(), da.end(), [](const aug::StreamDraw& d) {
    return d.provenance == aug::Provenance::kOriginal;
  });
  const double frac = static_cast<double>(originals) / 10000.0;
  return {frac >= 0.48 && frac <= 0.52 && da == db,
          "original fraction " + num(frac) + (da == db ? ", replay identical" : ", REPLAY DIFFERS")};
}

Outcome mosaic_contract() {
  Rng rng(61);
  aug::AugConfig cfg;
  std::size_t max_regions = 0, violations = 0, regions = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t h = 8 + rng.index(40), w = 8 + rng.index(40);
    const Image img = testing::synthetic_scene(h, w, rng);
    const env::EnvStats stats = testing::stats_for({img, testing::synthetic_scene(h, w, rng)});
    aug::ReferenceTranslator tr(stats);
    const auto boxes = testing::random_boxes(h, w, rng);
    const aug::Sample s = aug::mosaic(img, boxes, tr, cfg, rng);
    max_regions = std::max(max_regions, s.regions.size());
    regions += s.regions.size();
    if (s.regions.size() > 4 || s.boxes != boxes) ++violations;
    std::vector<bool> inside(h * w, false);
    for (const aug::Region& r : s.regions) {
      const double fw = static_cast<double>(r.rect.w) / w, fh = static_cast<double>(r.rect.h) / h;
      if (fw < 0.2 - 1e-12 || fw > 0.8 + 1e-12 || fh < 0.2 - 1e-12 || fh > 0.8 + 1e-12 ||
          r.rect.x + r.rect.w > w || r.rect.y + r.rect.h > h) {
        ++violations;
        continue;
      }
      for (std::size_t y = r.rect.y; y < r.rect.y + r.rect.h; ++y)
        for (std::size_t x = r.rect.x; x < r.rect.x + r.rect.w; ++x) inside[y * w + x] = true;
    }
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x)
        if (!inside[y * w + x] && s.image.pixel(y, x) != img.pixel(y, x)) ++violations;
  }
  return {violations == 0 && max_regions <= 4,
          std::to_string(regions) + " regions, max per image " + std::to_string(max_regions) +
              ", violations " + std::to_string(violations)};
}

// ------------------------------------------------------------------ 10, 11

Outcome ap_evaluator() {
  Rng rng(71);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const auto in = testing::random_instance(rng);
    worst = std::max(worst, std::abs(eval::coco_ap(in.dets, in.gts, in.images).ap -
                                     testing::naive_coco(in.dets, in.gts)));
  }
  using testing::eval_box;
  const std::vector<eval::GroundTruth> gts{{"a", eval_box(0, 0, 10, 10, data::Component::kTop)},
                                           {"a", eval_box(20, 0, 10, 10, data::Component::kBottomLeft)},
                                           {"b", eval_box(5, 5, 10, 10, data::Component::kBottomRight)}};
  std::vector<eval::Detection> perfect;
  for (const auto& g : gts) perfect.push_back({g.path, g.box, 0.9});
  const double ap_perfect = eval::coco_ap(perfect, gts, {"a", "b"}).ap;
  const double ap_06 = eval::coco_ap({{"a", eval_box(2.5, 0, 10, 10), 1.0}},
                                     {{"a", eval_box(0, 0, 10, 10)}}, {"a"}).ap;
  return {worst <= 1e-9 && ap_perfect == 1.0 && std::abs(ap_06 - 0.3) <= 1e-12,
          "brute-force max diff " + num(worst) + " over 500 instances; perfect " + num(ap_perfect) +
              ", IoU 0.6 " + num(ap_06)};
}

Outcome manifest_checksum() {
  // Reference split table, [split][indoor, day, night].
  constexpr std::array<std::array<std::size_t, 3>, 3> kEvciA = {
      {{1273, 562, 409}, {267, 74, 196}, {410, 373, 589}}};
  data::Manifest m;
  m.records = testing::full_count_records(kEvciA);
  const data::SplitReport r = data::validate_splits(m);
  std::size_t indoor_train = 0;
  for (const auto& rec : data::select(m, data::Split::kTrain))
    indoor_train += rec.place == data::Place::kIndoor;
  return {r.matches() && r.total_actual == 4153 && indoor_train == 1273,
          "total " + std::to_string(r.total_actual) + ", train indoor " + std::to_string(indoor_train) +
              ", mismatched cells " + std::to_string(r.mismatches().size())};
}

// ------------------------------------------------------------------ 12

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Runs the command with its outputs under `out`, returning the exit code and
// a snapshot of stdout plus every written file.
std::pair<int, std::map<std::string, std::string>> snapshot(const std::string& args,
                                                             const fs::path& out,
                                                             const fs::path& log) {
  fs::remove_all(out);
  const std::string cmd = std::string("\"") + EVCI_CLI_PATH + "\" " + args + " >\"" + log.string() +
                          "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::map<std::string, std::string> files;
  files["<stdout>"] = slurp(log);
  if (fs::exists(out)) {
    for (const auto& e : fs::recursive_directory_iterator(out))
      if (e.is_regular_file()) files[fs::relative(e.path(), out).string()] = slurp(e.path());
  }
  return {status, files};
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "evci_acceptance_cli";
  fs::remove_all(dir);
  const fs::path manifest = testing::write_synthetic_dataset(dir / "data", 12, 32, 64, 81);
  const std::string m = "--manifest \"" + manifest.string() + "\" ";
  const auto o = [&](const char* name) { return "\"" + (dir / name).string() + "\""; };
  {
    std::ofstream p(dir / "pairs.csv");
    p << "image,env\n" << (dir / "data/img/0.png").string() << ",\"0.3,-0.5,0.7\"\n"
      << (dir / "data/img/5.png").string() << ",\n";
  }
  {
    const data::Manifest mf = data::load_manifest(manifest);
    std::ofstream d(dir / "dets.jsonl");
    Rng rng(82);
    for (const auto& rec : mf.records)
      for (const auto& b : rec.boxes)
        d << "{\"path\":\"" << rec.path << "\",\"cls\":\"" << data::to_string(b.cls)
          << "\",\"score\":" << rng.uniform() << ",\"x\":" << b.x + 1 << ",\"y\":" << b.y
          << ",\"w\":" << b.w << ",\"h\":" << b.h << "}\n";
  }
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"stats", "stats " + m + "--out " + o("out")},
      {"train", "train " + m + "--toy --iterations 3 --seed 5 --out " + o("out")},
      {"translate", "translate --stats " + o("stats.json") + " --pairs " + o("pairs.csv") + " --out " + o("out")},
      {"augment", "augment " + m + "--seed 9 --count 12 --mix 0.5 --sampling target --geometric --scale-crop --out " + o("out")},
      {"augment-mosaic", "augment " + m + "--seed 9 --count 12 --mosaic --out " + o("out")},
      {"mosaic", "mosaic " + m + "--seed 3 --out " + o("out")},
      {"eval", "eval " + m + "--split all --detections " + o("dets.jsonl") + " --out " + o("out")},
      {"validate", "validate " + m + "--out " + o("out")},
  };
  // The translate command reads statistics written by a stats run.
  if (snapshot("stats " + m + "--out " + o("st"), dir / "st", dir / "log.txt").first != 0)
    return {false, "stats setup failed"};
  fs::copy_file(dir / "st" / "stats.json", dir / "stats.json");

  std::string report;
  bool ok = true;
  for (const auto& [name, args] : commands) {
    const auto a = snapshot(args, dir / "out", dir / "log.txt");
    const auto b = snapshot(args, dir / "out", dir / "log.txt");
    const bool same = a.first == 0 && b.first == 0 && a.second == b.second;
    ok = ok && same;
    report += (report.empty() ? "" : ", ") + name + (same ? "" : " DIFFERS") + " (" +
              std::to_string(a.second.size()) + " files)";
  }
  fs::remove_all(dir);
  return {ok, report};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "environment vector exactness", 1, env_exactness},
      {2, "normalization contract", 1, normalization_contract},
      {3, "gradient suite", 120, gradient_suite},
      {4, "loss formula oracle", 60, loss_oracle},
      {5, "loss weighting identity", 0, weighting_identity},
      {6, "toy training", 600, toy_training},
      {7, "reference translator round trip", 30, reference_roundtrip},
      {8, "mixing ratio", 10, mixing_ratio},
      {9, "mosaic contract", 60, mosaic_contract},
      {10, "AP evaluator", 30, ap_evaluator},
      {11, "manifest checksum", 1, manifest_checksum},
      {12, "CLI determinism", 0, cli_determinism},
  };
  // Optional criterion ids on the command line select a subset.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = c.budget_s == 0 || secs < c.budget_s;
    const bool pass = r.pass && in_budget;
    failed += !pass;
    char timing[96];
    if (c.budget_s > 0) {
      std::snprintf(timing, sizeof timing, "%.2f s, budget %.0f s%s", secs, c.budget_s,
                    in_budget ? "" : ", OVER BUDGET");
    } else {
      std::snprintf(timing, sizeof timing, "%.2f s", secs);
    }
    std::printf("%s criterion %d %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                r.detail.c_str(), timing);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
