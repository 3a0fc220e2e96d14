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


// evci: command-line front end for environment statistics, translation
// training, augmentation and detection evaluation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evci/augment.hpp"
#include "evci/dataset.hpp"
#include "evci/detect_eval.hpp"
#include "evci/entgan/checkpoint.hpp"
#include "evci/entgan/trainer.hpp"
#include "evci/envvec.hpp"
#include "evci/error.hpp"
#include "evci/image.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using namespace evci;

struct Common {
  std::string manifest;
  std::string scheme = "EVCI-A";
  std::string stats;
  std::string checkpoint;
  std::string out;
  std::uint64_t seed = 0;
};

void log_line(const std::string& s) { std::cerr << s << "\n"; }

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write " + p.string());
  return f;
}

void write_text(const fs::path& p, const std::string& text) {
  auto f = open_out(p);
  f << text;
  if (!f) throw IoError("failed writing " + p.string());
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create directory " + p.string() + ": " + ec.message());
}

data::Manifest manifest_of(const Common& c) {
  return data::load_manifest(c.manifest, data::parse_scheme(c.scheme));
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

json env_json(const env::EnvVector& e) {
  return json::array({e[0], e[1], e[2]});
}

// Loads every record's image; unreadable images are skipped with a warning.
struct Loaded {
  std::vector<data::DatasetRecord> records;
  std::vector<Image> images;
  std::size_t skipped = 0;
};

Loaded load_images(const data::Manifest& m, const std::vector<data::DatasetRecord>& recs) {
  Loaded out;
  for (const auto& r : recs) {
    try {
      Image img = load_image(m.resolve(r));
      if ((r.width && *r.width != img.width()) || (r.height && *r.height != img.height())) {
        throw ValidationError("image is " + std::to_string(img.width()) + "x" +
                              std::to_string(img.height()) + ", manifest declares " +
                              (r.width ? std::to_string(*r.width) : "?") + "x" +
                              (r.height ? std::to_string(*r.height) : "?"));
      }
      out.images.push_back(std::move(img));
      out.records.push_back(r);
    } catch (const Error& ex) {
      log_line("warning: skipping " + r.path + ": " + ex.what());
      ++out.skipped;
    }
  }
  return out;
}

env::EnvStats stats_over(const std::vector<Image>& images, const std::string& source) {
  if (images.empty()) throw ValidationError("no readable images to fit statistics on");
  std::vector<env::RawEnvVector> raw;
  for (const auto& img : images) raw.push_back(env::extract_raw(img));
  env::EnvStats s = env::fit_stats(raw);
  s.source_manifest = source;
  return s;
}

// --stats when given, else fitted over every image of the manifest.
env::EnvStats resolve_stats(const Common& c, const data::Manifest& m) {
  if (!c.stats.empty()) return env::load_stats(c.stats);
  log_line("fitting environment statistics over " + c.manifest);
  return stats_over(load_images(m, m.records).images, c.manifest);
}

// ---------------------------------------------------------------- stats

int cmd_stats(const Common& c) {
  const data::Manifest m = manifest_of(c);
  const Loaded l = load_images(m, m.records);
  const fs::path out = c.out;
  ensure_dir(out);

  std::vector<env::RawEnvVector> raw;
  std::vector<std::string> groups;
  for (std::size_t i = 0; i < l.images.size(); ++i) {
    raw.push_back(env::extract_raw(l.images[i]));
    groups.push_back(data::capture_category(l.records[i]));
  }
  if (raw.empty()) throw ValidationError("no readable images in " + c.manifest);
  env::EnvStats stats = env::fit_stats(raw);
  stats.source_manifest = c.manifest;
  env::save_stats(stats, out / "stats.json");

  for (std::size_t k = 0; k < env::kComponents; ++k) {
    auto f = open_out(out / (std::string("cdf_") + env::kComponentNames[k] + ".csv"));
    env::write_cdf_csv(f, env::cdf(raw, k, groups));
  }
  auto f = open_out(out / "scatter.csv");
  f << "brightness,contrast,saturation,category\n";
  for (std::size_t i = 0; i < raw.size(); ++i) {
    f << fmt(raw[i][0]) << "," << fmt(raw[i][1]) << "," << fmt(raw[i][2]) << ","
      << groups[i] << "\n";
  }
  std::cout << "images: " << raw.size() << "\nskipped: " << l.skipped << "\n";
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainFlags {
  bool toy = false;
  std::size_t iterations = 0;
  std::size_t epochs = 0;
  double lr = 0.0;
  std::size_t base_channels = 0;
  std::string split = "train";
};

int cmd_train(const Common& c, const TrainFlags& t) {
  const data::Manifest m = manifest_of(c);
  gan::ModelConfig cfg = t.toy ? gan::ModelConfig::toy() : gan::ModelConfig{};
  if (t.epochs) cfg.epochs = t.epochs;
  if (t.lr > 0.0) cfg.learning_rate = t.lr;
  if (t.base_channels) cfg.base_channels = t.base_channels;
  if (cfg.decay_start_epoch > cfg.epochs) cfg.decay_start_epoch = cfg.epochs / 2;
  cfg.validate();

  const Loaded train = load_images(m, data::select(m, data::parse_split(t.split)));
  gan::FitOptions opt;
  opt.stats = resolve_stats(c, m);
  opt.max_iterations = t.iterations;

  const fs::path out = c.out;
  ensure_dir(out);
  auto csv = open_out(out / "losses.csv");
  csv << "iter,l_rec,l_cyc,l_env,l_perc,l_adv_g,l_adv_d,total_eg,total_d,lr\n";
  opt.on_step = [&](const gan::StepLog& s, gan::EntGan<float>&) {
    const auto& r = s.losses;
    csv << s.iteration << "," << fmt(r.l_rec) << "," << fmt(r.l_cyc) << ","
        << fmt(r.l_env) << "," << fmt(r.l_perc) << "," << fmt(r.l_adv_g) << ","
        << fmt(r.l_adv_d) << "," << fmt(r.total_eg) << "," << fmt(r.total_d) << ","
        << fmt(s.lr) << "\n";
  };
  log_line("seed=" + std::to_string(c.seed) + " images=" + std::to_string(train.images.size()));
  Rng rng(c.seed);
  const gan::Checkpoint ckpt = gan::fit(train.images, cfg, rng, opt);
  const fs::path ckpt_path = c.checkpoint.empty() ? out / "model.entg" : fs::path(c.checkpoint);
  gan::save_checkpoint(ckpt, ckpt_path);

  json run;
  run["command"] = "train";
  run["seed"] = c.seed;
  run["manifest"] = c.manifest;
  run["split"] = t.split;
  run["steps"] = ckpt.step;
  run["config"] = json::parse(gan::config_to_json(cfg));
  write_text(out / "run.json", run.dump(2) + "\n");
  std::cout << "steps: " << ckpt.step << "\ncheckpoint: " << ckpt_path.string() << "\n";
  return 0;
}

// ------------------------------------------------------------ translators

struct TranslatorSetup {
  std::optional<gan::Checkpoint> ckpt;
  env::EnvStats stats;
  std::unique_ptr<aug::Translator> translator;
};

// The trained model when --checkpoint is given, else the reference
// translator over --stats (or statistics fitted on the manifest).
TranslatorSetup make_translator(const Common& c, const data::Manifest* m) {
  TranslatorSetup s;
  if (!c.checkpoint.empty()) {
    s.ckpt.emplace(gan::load_checkpoint(c.checkpoint));
    s.stats = c.stats.empty() ? s.ckpt->stats : env::load_stats(c.stats);
    s.translator = std::make_unique<aug::GanTranslator>(s.ckpt->model);
    return s;
  }
  if (c.stats.empty() && m == nullptr) {
    throw ArgumentError("the reference translator needs --stats");
  }
  s.stats = m ? resolve_stats(c, *m) : env::load_stats(c.stats);
  s.translator = std::make_unique<aug::ReferenceTranslator>(s.stats);
  return s;
}

double mean_abs_diff(const Image& a, const Image& b) {
  double s = 0.0;
  const auto pa = a.pixels(), pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) s += std::abs(pa[i] - pb[i]);
  return s / static_cast<double>(pa.size());
}

// ------------------------------------------------------------ translate

struct TranslateFlags {
  std::string image;
  std::string env;
  std::string pairs;
};

int cmd_translate(const Common& c, const TranslateFlags& t) {
  TranslatorSetup s = make_translator(c, nullptr);
  struct Job {
    std::string image;
    std::optional<env::EnvVector> e;
    fs::path output;
  };
  std::vector<Job> jobs;
  if (!t.pairs.empty()) {
    std::ifstream in(t.pairs);
    if (!in) throw IoError("cannot read " + t.pairs);
    std::string line;
    std::size_t n = 0;
    std::getline(in, line);  // header: image,env
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      Job j;
      j.image = line.substr(0, comma);
      if (comma != std::string::npos) {
        std::string e = line.substr(comma + 1);
        if (e.size() >= 2 && e.front() == '"' && e.back() == '"') e = e.substr(1, e.size() - 2);
        if (!e.empty()) j.e = env::parse_env(e);
      }
      std::ostringstream name;
      name << std::setw(6) << std::setfill('0') << n++ << ".png";
      j.output = fs::path(c.out) / name.str();
      jobs.push_back(j);
    }
    ensure_dir(c.out);
  } else {
    if (t.image.empty()) throw ArgumentError("translate needs --image or --pairs");
    jobs.push_back({t.image, t.env.empty() ? std::nullopt
                                           : std::optional(env::parse_env(t.env)),
                    c.out});
  }

  std::cout << "image,env,output,mean_abs_diff\n";
  for (const Job& j : jobs) {
    const Image img = load_image(j.image);
    const env::EnvVector e = j.e ? *j.e : env::extract(img, s.stats);
    const Image result = s.translator->translate(img, e);
    save_image(result, j.output);
    std::cout << j.image << ",\"" << env::format_env(e) << "\"," << j.output.string()
              << "," << fmt(mean_abs_diff(result, img)) << "\n";
  }
  return 0;
}

// ------------------------------------------------------------ augment

struct AugmentFlags {
  double mix = 0.5;
  std::string sampling = "uniform";
  bool mosaic = false;
  std::size_t count = 0;
  bool geometric = false;
  bool scale_crop = false;
};

json sample_line(const data::DatasetRecord& rec, const aug::Sample& s,
                 const std::string& path) {
  data::DatasetRecord r = rec;
  r.path = path;
  r.boxes = s.boxes;
  r.width = s.image.width();
  r.height = s.image.height();
  json j = json::parse(data::record_to_json(r));
  j["source_path"] = rec.path;
  j["provenance"] = std::string(aug::to_string(s.provenance));
  j["env_vector"] = s.env ? env_json(*s.env) : json(nullptr);
  json regions = json::array();
  for (const auto& reg : s.regions) {
    regions.push_back({{"x", reg.rect.x}, {"y", reg.rect.y}, {"w", reg.rect.w},
                       {"h", reg.rect.h}, {"env_vector", env_json(reg.env)}});
  }
  j["regions"] = regions;
  return j;
}

std::string image_name(std::size_t i) {
  std::ostringstream os;
  os << "images/" << std::setw(6) << std::setfill('0') << i << ".png";
  return os.str();
}

aug::AugConfig aug_config(const AugmentFlags& a, const data::Manifest& m,
                          const env::EnvStats& stats) {
  aug::AugConfig cfg;
  cfg.mix_fraction = a.mix;
  cfg.sampling = env::parse_sampling(a.sampling);
  cfg.mosaic_enabled = a.mosaic;
  cfg.geometric.scale_and_crop = a.scale_crop;
  if (cfg.sampling == env::Sampling::kTargetDomain) {
    auto pool_records = data::select(m, std::nullopt, [](const data::DatasetRecord& r) {
      return r.split != data::Split::kTrain;
    });
    for (const Image& img : load_images(m, pool_records).images) {
      cfg.target_pool.push_back(env::extract(img, stats));
    }
  }
  cfg.validate();
  return cfg;
}

void write_run(const fs::path& out, const std::string& command, const Common& c,
               const AugmentFlags& a) {
  json run;
  run["command"] = command;
  run["seed"] = c.seed;
  run["manifest"] = c.manifest;
  run["translator"] = c.checkpoint.empty() ? "reference" : c.checkpoint;
  run["mix"] = a.mix;
  run["sampling"] = a.sampling;
  run["mosaic"] = a.mosaic;
  run["geometric"] = a.geometric;
  run["scale_crop"] = a.scale_crop;
  write_text(out / "run.json", run.dump(2) + "\n");
}

int cmd_augment(const Common& c, const AugmentFlags& a) {
  const data::Manifest m = manifest_of(c);
  TranslatorSetup s = make_translator(c, &m);
  const aug::AugConfig cfg = aug_config(a, m, s.stats);
  const Loaded train = load_images(m, data::select(m, data::Split::kTrain));
  if (train.images.empty()) throw ValidationError("no readable training images");

  const fs::path out = c.out;
  ensure_dir(out / "images");
  auto manifest = open_out(out / "manifest.jsonl");
  log_line("seed=" + std::to_string(c.seed));
  Rng rng(c.seed);
  aug::MixedStream stream(train.images.size(), cfg, rng);
  const std::size_t count = a.count ? a.count : train.images.size();
  std::size_t counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < count; ++i) {
    const aug::StreamDraw d = stream.next();
    const auto& rec = train.records[d.record];
    aug::Sample sample = aug::materialize(d, train.images[d.record], rec.boxes,
                                          *s.translator, cfg, rng);
    if (a.geometric) sample = aug::detection_preprocess(sample, cfg.geometric, rng);
    const std::string name = image_name(i);
    save_image(sample.image, out / name);
    manifest << sample_line(rec, sample, name).dump() << "\n";
    ++counts[static_cast<int>(sample.provenance)];
  }
  write_run(out, "augment", c, a);
  std::cout << "samples: " << count << "\noriginal: " << counts[0]
            << "\ntranslated: " << counts[1] << "\nmosaic: " << counts[2] << "\n";
  return 0;
}

int cmd_mosaic(const Common& c, AugmentFlags a) {
  a.mosaic = true;
  a.mix = 0.0;
  const data::Manifest m = manifest_of(c);
  TranslatorSetup s = make_translator(c, &m);
  const aug::AugConfig cfg = aug_config(a, m, s.stats);
  const Loaded train = load_images(m, data::select(m, data::Split::kTrain));

  const fs::path out = c.out;
  ensure_dir(out / "images");
  auto manifest = open_out(out / "manifest.jsonl");
  log_line("seed=" + std::to_string(c.seed));
  Rng rng(c.seed);
  std::size_t regions = 0;
  for (std::size_t i = 0; i < train.images.size(); ++i) {
    const auto& rec = train.records[i];
    const aug::Sample sample = aug::mosaic(train.images[i], rec.boxes, *s.translator, cfg, rng);
    const std::string name = image_name(i);
    save_image(sample.image, out / name);
    manifest << sample_line(rec, sample, name).dump() << "\n";
    regions += sample.regions.size();
  }
  write_run(out, "mosaic", c, a);
  std::cout << "samples: " << train.images.size() << "\nregions: " << regions << "\n";
  return 0;
}

// ------------------------------------------------------------ eval

int cmd_eval(const Common& c, const std::string& detections, const std::string& split) {
  const data::Manifest m = manifest_of(c);
  const auto records = split == "all" ? m.records : data::select(m, data::parse_split(split));
  std::vector<std::string> images;
  for (const auto& r : records) images.push_back(r.path);
  const eval::EvalResult r =
      eval::coco_ap(eval::load_detections(detections), eval::ground_truth(records), images);
  const std::string text = eval::result_to_text(r);
  std::cout << text;
  if (!c.out.empty()) {
    ensure_dir(c.out);
    write_text(fs::path(c.out) / "eval.json", eval::result_to_json(r) + "\n");
    write_text(fs::path(c.out) / "eval.txt", text);
  }
  return 0;
}

// ------------------------------------------------------------ validate

int cmd_validate(const Common& c) {
  const data::Manifest m = manifest_of(c);
  const data::SplitReport report = data::validate_splits(m);
  std::cout << report.to_text();
  if (!c.out.empty()) {
    ensure_dir(c.out);
    write_text(fs::path(c.out) / "validation.json", report.to_json() + "\n");
    write_text(fs::path(c.out) / "validation.txt", report.to_text());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Environment statistics, translation and augmentation toolkit"};
  app.require_subcommand(1);
  Common c;
  TrainFlags train;
  TranslateFlags tr;
  AugmentFlags aug_flags;
  std::string detections, eval_split = "test";

  auto manifest_opt = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--manifest", c.manifest, "JSON Lines dataset manifest");
    if (required) o->required();
    sub->add_option("--scheme", c.scheme, "Split scheme: EVCI-A or EVCI-B")
        ->capture_default_str();
  };
  auto seed_opt = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  };

  auto* stats = app.add_subcommand("stats", "Environment statistics, CDF and scatter CSVs");
  manifest_opt(stats, true);
  stats->add_option("--out", c.out, "Output directory")->required();

  auto* train_cmd = app.add_subcommand("train", "Train the translation network");
  manifest_opt(train_cmd, true);
  seed_opt(train_cmd);
  train_cmd->add_option("--out", c.out, "Output directory")->required();
  train_cmd->add_option("--stats", c.stats, "Environment statistics JSON");
  train_cmd->add_option("--checkpoint", c.checkpoint, "Checkpoint path (default <out>/model.entg)");
  train_cmd->add_flag("--toy", train.toy, "Toy configuration: 16 channels at 32x64");
  train_cmd->add_option("--iterations", train.iterations, "Stop after this many steps");
  train_cmd->add_option("--epochs", train.epochs, "Epoch count");
  train_cmd->add_option("--lr", train.lr, "Initial learning rate");
  train_cmd->add_option("--base-channels", train.base_channels, "Base channel width");
  train_cmd->add_option("--split", train.split, "Split to train on")->capture_default_str();

  auto* translate = app.add_subcommand("translate", "Translate images toward vectors");
  translate->add_option("--checkpoint", c.checkpoint, "Trained checkpoint");
  translate->add_option("--stats", c.stats, "Statistics (reference translator, or override)");
  translate->add_option("--image", tr.image, "Input image");
  translate->add_option("--env", tr.env, "Vector \"b,c,s\" in [-1,1]; default: the image's own");
  translate->add_option("--pairs", tr.pairs, "CSV with header image,env");
  translate->add_option("--out", c.out, "Output image (or directory with --pairs)")->required();

  auto add_aug_flags = [&](CLI::App* sub) {
    manifest_opt(sub, true);
    seed_opt(sub);
    sub->add_option("--out", c.out, "Output directory")->required();
    sub->add_option("--stats", c.stats, "Environment statistics JSON");
    sub->add_option("--checkpoint", c.checkpoint, "Trained checkpoint (default: reference translator)");
    sub->add_option("--sampling", aug_flags.sampling, "uniform or target")->capture_default_str();
    sub->add_flag("--geometric", aug_flags.geometric, "Apply detection resize/flip");
    sub->add_flag("--scale-crop", aug_flags.scale_crop, "With --geometric: random scale and crop");
  };
  auto* augment = app.add_subcommand("augment", "Materialize a mixed augmented training set");
  add_aug_flags(augment);
  augment->add_option("--mix", aug_flags.mix, "Fraction of original samples")->capture_default_str();
  augment->add_flag("--mosaic", aug_flags.mosaic, "Mosaic instead of full translation");
  augment->add_option("--count", aug_flags.count, "Samples to emit (default: training size)");

  auto* mosaic = app.add_subcommand("mosaic", "Mosaic-augment every training image");
  add_aug_flags(mosaic);

  auto* eval_cmd = app.add_subcommand("eval", "COCO-style AP of detections");
  manifest_opt(eval_cmd, true);
  eval_cmd->add_option("--detections", detections, "Detections JSON Lines")
      ->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--split", eval_split, "Split to evaluate, or all")->capture_default_str();
  eval_cmd->add_option("--out", c.out, "Output directory for eval.json and eval.txt");

  auto* validate = app.add_subcommand("validate", "Compare split counts with the reference split table");
  manifest_opt(validate, true);
  validate->add_option("--out", c.out, "Output directory for the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*stats) return cmd_stats(c);
    if (*train_cmd) return cmd_train(c, train);
    if (*translate) return cmd_translate(c, tr);
    if (*augment) return cmd_augment(c, aug_flags);
    if (*mosaic) return cmd_mosaic(c, aug_flags);
    if (*eval_cmd) return cmd_eval(c, detections, eval_split);
    if (*validate) return cmd_validate(c);
  } catch (const evci::Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
