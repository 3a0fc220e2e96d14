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

#ifndef EVCI_DATASET_HPP_
#define EVCI_DATASET_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evci::data {

// The three annotated parts of a charging inlet.
enum class Component { kTop, kBottomLeft, kBottomRight };
inline constexpr std::size_t kNumComponents = 3;

enum class Vehicle { kBolt, kNiro };
enum class Place { kIndoor, kOutdoor };
enum class TimeOfDay { kDaytime, kMorning, kNight, kEvening, kNone };
enum class Weather { kSunny, kRainy, kNone };
enum class Split { kTrain, kVal, kTest };
enum class Scheme { kEvciA, kEvciB };

// Outdoor captures are grouped in pairs; indoor captures form their own group.
enum class TimeGroup { kIndoor, kDayMorning, kNightEvening };

std::string_view to_string(Component v);
std::string_view to_string(Vehicle v);
std::string_view to_string(Place v);
std::string_view to_string(TimeOfDay v);
std::string_view to_string(Weather v);
std::string_view to_string(Split v);
std::string_view to_string(Scheme v);
std::string_view to_string(TimeGroup v);

// Parsers throw ValidationError naming the rejected value.
Component parse_component(std::string_view s);
Split parse_split(std::string_view s);
Scheme parse_scheme(std::string_view s);

// Pixel box, origin top-left, x right, y down.
struct BBox {
  Component cls = Component::kTop;
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  friend bool operator==(const BBox&, const BBox&) = default;
};

struct DatasetRecord {
  std::string path;
  Vehicle vehicle = Vehicle::kBolt;
  Place place = Place::kIndoor;
  TimeOfDay time = TimeOfDay::kNone;
  Weather weather = Weather::kNone;
  Split split = Split::kTrain;
  std::vector<BBox> boxes;
  // Image dimensions, when the manifest carries them; enables the
  // box-inside-image check at load time.
  std::optional<std::size_t> width;
  std::optional<std::size_t> height;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

// Group of a record for the split table; nullopt for outdoor records without
// a time label.
std::optional<TimeGroup> time_group(const DatasetRecord& r);

// Capture category used for statistics plots: "indoor" or the time label.
std::string capture_category(const DatasetRecord& r);

struct Manifest {
  std::vector<DatasetRecord> records;
  Scheme scheme = Scheme::kEvciA;
  // Directory relative record paths resolve against.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const DatasetRecord& r) const;
};

// Parses JSON Lines, one record per non-blank line. Errors name the line:
// FormatError for malformed JSON or missing keys, ValidationError for
// unknown enumeration values, invalid or duplicate boxes and duplicate paths.
Manifest parse_manifest(std::istream& in, Scheme scheme,
                        const std::string& source_name = "<manifest>");
Manifest load_manifest(const std::filesystem::path& path,
                       Scheme scheme = Scheme::kEvciA);

std::string record_to_json(const DatasetRecord& r);
void write_manifest(std::ostream& out, const std::vector<DatasetRecord>& records);

// Expected image count per (split, group) cell of the reference split table.
std::size_t expected_split_count(Scheme scheme, Split split, TimeGroup group);
inline constexpr std::size_t kFullDatasetSize = 4153;

struct SplitCell {
  Split split;
  TimeGroup group;
  std::size_t expected = 0;
  std::size_t actual = 0;

  bool matches() const { return expected == actual; }
};

// Per-capture-condition cell of the dataset composition table.
struct CaptureCell {
  Vehicle vehicle;
  Place place;
  TimeOfDay time;
  Weather weather;
  std::size_t expected = 0;
  std::size_t actual = 0;
};

struct SplitReport {
  Scheme scheme = Scheme::kEvciA;
  std::vector<SplitCell> cells;       // 9 cells, split-major
  std::vector<CaptureCell> captures;  // 10 capture conditions
  std::size_t total_expected = kFullDatasetSize;
  std::size_t total_actual = 0;
  // Records whose capture condition is not one of the collected ones.
  std::vector<std::string> issues;

  std::vector<SplitCell> mismatches() const;
  bool matches() const;
  std::string to_text() const;
  std::string to_json() const;
};

SplitReport validate_splits(const Manifest& m);

using RecordPredicate = std::function<bool(const DatasetRecord&)>;

// Records in manifest order with the given split (any split when nullopt)
// that satisfy the predicate (all when empty).
std::vector<DatasetRecord> select(const Manifest& m, std::optional<Split> split,
                                  const RecordPredicate& pred = {});

}  // namespace evci::data

#endif  // EVCI_DATASET_HPP_
