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

#include "evci/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "evci/error.hpp"

namespace evci::data {
namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 3> kComponentNames = {
    "top", "bottom_left", "bottom_right"};
constexpr std::array<std::string_view, 2> kVehicleNames = {"bolt", "niro"};
constexpr std::array<std::string_view, 2> kPlaceNames = {"indoor", "outdoor"};
constexpr std::array<std::string_view, 5> kTimeNames = {
    "daytime", "morning", "night", "evening", "none"};
constexpr std::array<std::string_view, 3> kWeatherNames = {"sunny", "rainy",
                                                           "none"};
constexpr std::array<std::string_view, 3> kSplitNames = {"train", "val",
                                                         "test"};
constexpr std::array<std::string_view, 3> kGroupNames = {
    "indoor", "daytime/morning", "night/evening"};

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view field, std::string_view value,
                const std::array<std::string_view, N>& names) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == value) return static_cast<Enum>(i);
  }
  std::string allowed;
  for (std::size_t i = 0; i < N; ++i) {
    if (i) allowed += ", ";
    allowed += names[i];
  }
  throw ValidationError("unknown " + std::string(field) + " '" +
                        std::string(value) + "' (expected one of " + allowed +
                        ")");
}

// Reference split sizes, indexed [split][group].
using SplitTable = std::array<std::array<std::size_t, 3>, 3>;
constexpr SplitTable kEvciA = {{{1273, 562, 409}, {267, 74, 196}, {410, 373, 589}}};
constexpr SplitTable kEvciB = {{{1207, 832, 0}, {319, 0, 287}, {424, 177, 907}}};

struct Capture {
  Vehicle vehicle;
  Place place;
  TimeOfDay time;
  Weather weather;
  std::size_t count;
};

// Indoor captures carry no weather label; their time label is free.
constexpr std::array<Capture, 10> kCaptures = {{
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
}};

std::optional<std::size_t> capture_index(const DatasetRecord& r) {
  for (std::size_t i = 0; i < kCaptures.size(); ++i) {
    const Capture& c = kCaptures[i];
    if (c.vehicle != r.vehicle || c.place != r.place) continue;
    if (r.place == Place::kIndoor) {
      if (r.weather == Weather::kNone) return i;
      continue;
    }
    if (c.time == r.time && c.weather == r.weather) return i;
  }
  return std::nullopt;
}

std::string located(const std::string& source, std::size_t line,
                    const std::string& msg) {
  return source + ":" + std::to_string(line) + ": " + msg;
}

DatasetRecord parse_record(const json& j) {
  if (!j.is_object()) throw FormatError("record is not a JSON object");
  DatasetRecord r;
  try {
    r.path = j.at("path").get<std::string>();
    r.vehicle = parse_enum<Vehicle>("vehicle", j.at("vehicle").get<std::string>(),
                                    kVehicleNames);
    r.place = parse_enum<Place>("place", j.at("place").get<std::string>(),
                                kPlaceNames);
    r.time = parse_enum<TimeOfDay>("time", j.value("time", std::string("none")),
                                   kTimeNames);
    r.weather = parse_enum<Weather>(
        "weather", j.value("weather", std::string("none")), kWeatherNames);
    r.split = parse_enum<Split>("split", j.at("split").get<std::string>(),
                                kSplitNames);
    if (j.contains("width")) r.width = j.at("width").get<std::size_t>();
    if (j.contains("height")) r.height = j.at("height").get<std::size_t>();
    if (j.contains("boxes")) {
      for (const auto& jb : j.at("boxes")) {
        BBox b;
        b.cls = parse_enum<Component>("cls", jb.at("cls").get<std::string>(),
                                      kComponentNames);
        b.x = jb.at("x").get<double>();
        b.y = jb.at("y").get<double>();
        b.w = jb.at("w").get<double>();
        b.h = jb.at("h").get<double>();
        r.boxes.push_back(b);
      }
    }
  } catch (const json::exception& ex) {
    throw FormatError(std::string("bad record field: ") + ex.what());
  }
  if (r.path.empty()) throw ValidationError("empty image path");

  std::array<bool, kNumComponents> seen{};
  for (const BBox& b : r.boxes) {
    const auto name = std::string(to_string(b.cls));
    if (!(std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.w) &&
          std::isfinite(b.h)) ||
        !(b.w > 0.0 && b.h > 0.0)) {
      throw ValidationError("box '" + name + "' must have positive finite w, h");
    }
    if (b.x < 0.0 || b.y < 0.0) {
      throw ValidationError("box '" + name + "' starts outside the image");
    }
    if ((r.width && b.x + b.w > static_cast<double>(*r.width)) ||
        (r.height && b.y + b.h > static_cast<double>(*r.height))) {
      throw ValidationError("box '" + name + "' extends past the image bounds");
    }
    auto& flag = seen[static_cast<std::size_t>(b.cls)];
    if (flag) throw ValidationError("more than one '" + name + "' box");
    flag = true;
  }
  return r;
}

}  // namespace

std::string_view to_string(Component v) { return kComponentNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Vehicle v) { return kVehicleNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Place v) { return kPlaceNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(TimeOfDay v) { return kTimeNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Weather v) { return kWeatherNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Split v) { return kSplitNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(TimeGroup v) { return kGroupNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Scheme v) {
  return v == Scheme::kEvciA ? "EVCI-A" : "EVCI-B";
}

Component parse_component(std::string_view s) {
  return parse_enum<Component>("cls", s, kComponentNames);
}

Split parse_split(std::string_view s) {
  return parse_enum<Split>("split", s, kSplitNames);
}

Scheme parse_scheme(std::string_view s) {
  if (s == "EVCI-A" || s == "A" || s == "a") return Scheme::kEvciA;
  if (s == "EVCI-B" || s == "B" || s == "b") return Scheme::kEvciB;
  throw ValidationError("unknown split scheme '" + std::string(s) +
                        "' (expected EVCI-A or EVCI-B)");
}

std::optional<TimeGroup> time_group(const DatasetRecord& r) {
  if (r.place == Place::kIndoor) return TimeGroup::kIndoor;
  switch (r.time) {
    case TimeOfDay::kDaytime:
    case TimeOfDay::kMorning:
      return TimeGroup::kDayMorning;
    case TimeOfDay::kNight:
    case TimeOfDay::kEvening:
      return TimeGroup::kNightEvening;
    case TimeOfDay::kNone:
      break;
  }
  return std::nullopt;
}

std::string capture_category(const DatasetRecord& r) {
  if (r.place == Place::kIndoor) return "indoor";
  return std::string(to_string(r.time));
}

std::filesystem::path Manifest::resolve(const DatasetRecord& r) const {
  std::filesystem::path p(r.path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

Manifest parse_manifest(std::istream& in, Scheme scheme,
                        const std::string& source_name) {
  Manifest m;
  m.scheme = scheme;
  std::unordered_set<std::string> paths;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(),
                    [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& ex) {
      throw FormatError(located(source_name, line_no,
                                std::string("malformed JSON: ") + ex.what()));
    }
    DatasetRecord r;
    try {
      r = parse_record(j);
    } catch (const FormatError& ex) {
      throw FormatError(located(source_name, line_no, ex.what()));
    } catch (const ValidationError& ex) {
      throw ValidationError(located(source_name, line_no, ex.what()));
    }
    if (!paths.insert(r.path).second) {
      throw ValidationError(
          located(source_name, line_no, "duplicate path '" + r.path + "'"));
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path, Scheme scheme) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  Manifest m = parse_manifest(in, scheme, path.string());
  m.base_dir = path.parent_path();
  return m;
}

std::string record_to_json(const DatasetRecord& r) {
  nlohmann::ordered_json j;
  j["path"] = r.path;
  j["vehicle"] = to_string(r.vehicle);
  j["place"] = to_string(r.place);
  j["time"] = to_string(r.time);
  j["weather"] = to_string(r.weather);
  j["split"] = to_string(r.split);
  if (r.width) j["width"] = *r.width;
  if (r.height) j["height"] = *r.height;
  auto boxes = nlohmann::ordered_json::array();
  for (const BBox& b : r.boxes) {
    nlohmann::ordered_json jb;
    jb["cls"] = to_string(b.cls);
    jb["x"] = b.x;
    jb["y"] = b.y;
    jb["w"] = b.w;
    jb["h"] = b.h;
    boxes.push_back(std::move(jb));
  }
  j["boxes"] = std::move(boxes);
  return j.dump();
}

void write_manifest(std::ostream& out,
                    const std::vector<DatasetRecord>& records) {
  for (const DatasetRecord& r : records) out << record_to_json(r) << '\n';
}

std::size_t expected_split_count(Scheme scheme, Split split, TimeGroup group) {
  const SplitTable& t = scheme == Scheme::kEvciA ? kEvciA : kEvciB;
  return t[static_cast<std::size_t>(split)][static_cast<std::size_t>(group)];
}

std::vector<SplitCell> SplitReport::mismatches() const {
  std::vector<SplitCell> out;
  std::copy_if(cells.begin(), cells.end(), std::back_inserter(out),
               [](const SplitCell& c) { return !c.matches(); });
  return out;
}

bool SplitReport::matches() const {
  return mismatches().empty() && total_actual == total_expected &&
         issues.empty() &&
         std::all_of(captures.begin(), captures.end(), [](const CaptureCell& c) {
           return c.expected == c.actual;
         });
}

std::string SplitReport::to_text() const {
  std::ostringstream out;
  out << "split table (" << to_string(scheme) << ")\n";
  out << "  split  group            expected  actual\n";
  for (const SplitCell& c : cells) {
    out << "  " << std::left << std::setw(5) << to_string(c.split) << "  "
        << std::setw(16) << to_string(c.group) << " " << std::setw(9)
        << c.expected << c.actual << (c.matches() ? "" : "  MISMATCH") << '\n';
  }
  out << std::right;
  out << "capture conditions\n";
  for (const CaptureCell& c : captures) {
    out << "  " << to_string(c.vehicle) << '/' << to_string(c.place);
    if (c.place == Place::kOutdoor) {
      out << '/' << to_string(c.time) << '/' << to_string(c.weather);
    }
    out << ": expected " << c.expected << ", actual " << c.actual
        << (c.expected == c.actual ? "" : "  MISMATCH") << '\n';
  }
  out << "total: expected " << total_expected << ", actual " << total_actual
      << (total_expected == total_actual ? "" : "  MISMATCH") << '\n';
  for (const std::string& issue : issues) out << "issue: " << issue << '\n';
  out << (matches() ? "all cells match\n" : "deviations found\n");
  return out.str();
}

std::string SplitReport::to_json() const {
  nlohmann::ordered_json j;
  j["scheme"] = to_string(scheme);
  auto jc = nlohmann::ordered_json::array();
  for (const SplitCell& c : cells) {
    jc.push_back({{"split", to_string(c.split)},
                  {"group", to_string(c.group)},
                  {"expected", c.expected},
                  {"actual", c.actual},
                  {"match", c.matches()}});
  }
  j["cells"] = std::move(jc);
  auto jcap = nlohmann::ordered_json::array();
  for (const CaptureCell& c : captures) {
    jcap.push_back({{"vehicle", to_string(c.vehicle)},
                    {"place", to_string(c.place)},
                    {"time", to_string(c.time)},
                    {"weather", to_string(c.weather)},
                    {"expected", c.expected},
                    {"actual", c.actual}});
  }
  j["captures"] = std::move(jcap);
  j["total_expected"] = total_expected;
  j["total_actual"] = total_actual;
  j["issues"] = issues;
  j["match"] = matches();
  return j.dump(2) + "\n";
}

SplitReport validate_splits(const Manifest& m) {
  SplitReport report;
  report.scheme = m.scheme;
  std::array<std::array<std::size_t, 3>, 3> counts{};
  std::array<std::size_t, kCaptures.size()> capture_counts{};
  for (const DatasetRecord& r : m.records) {
    const auto group = time_group(r);
    if (group) {
      ++counts[static_cast<std::size_t>(r.split)][static_cast<std::size_t>(*group)];
    } else {
      report.issues.push_back(r.path + ": outdoor record without a time label");
    }
    if (const auto ci = capture_index(r)) {
      ++capture_counts[*ci];
    } else if (group) {
      report.issues.push_back(r.path + ": capture condition " +
                              std::string(to_string(r.vehicle)) + "/" +
                              std::string(to_string(r.place)) + "/" +
                              std::string(to_string(r.time)) + "/" +
                              std::string(to_string(r.weather)) +
                              " is not part of the dataset");
    }
  }
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t g = 0; g < 3; ++g) {
      const auto split = static_cast<Split>(s);
      const auto tg = static_cast<TimeGroup>(g);
      report.cells.push_back(SplitCell{split, tg,
                                       expected_split_count(m.scheme, split, tg),
                                       counts[s][g]});
    }
  }
  for (std::size_t i = 0; i < kCaptures.size(); ++i) {
    const Capture& c = kCaptures[i];
    report.captures.push_back(CaptureCell{c.vehicle, c.place, c.time, c.weather,
                                          c.count, capture_counts[i]});
  }
  report.total_actual = m.records.size();
  return report;
}

std::vector<DatasetRecord> select(const Manifest& m, std::optional<Split> split,
                                  const RecordPredicate& pred) {
  std::vector<DatasetRecord> out;
  for (const DatasetRecord& r : m.records) {
    if (split && r.split != *split) continue;
    if (pred && !pred(r)) continue;
    out.push_back(r);
  }
  return out;
}

}  // namespace evci::data
