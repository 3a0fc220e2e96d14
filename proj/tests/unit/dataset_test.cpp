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


#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "evci/dataset.hpp"
#include "evci/error.hpp"
#include "synthetic.hpp"

namespace evci::data {
namespace {

using Table = std::array<std::array<std::size_t, 3>, 3>;

// Reference split sizes [split][group], groups indoor, day/morning,
// night/evening.
constexpr Table kTableA = {{{1273, 562, 409}, {267, 74, 196}, {410, 373, 589}}};
constexpr Table kTableB = {{{1207, 832, 0}, {319, 0, 287}, {424, 177, 907}}};

Manifest parse(const std::string& text, Scheme scheme = Scheme::kEvciA) {
  std::istringstream in(text);
  return parse_manifest(in, scheme, "m.jsonl");
}

const char* kLine =
    R"({"path":"a.png","vehicle":"niro","place":"outdoor","time":"night","weather":"sunny","split":"val",)"
    R"("boxes":[{"cls":"top","x":1,"y":2,"w":3,"h":4},{"cls":"bottom_right","x":5.5,"y":6,"w":7,"h":8}]})";

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(ManifestTest, EmptyFileHasNoRecords) {
  EXPECT_TRUE(parse("").records.empty());
  EXPECT_TRUE(parse("\n  \n").records.empty());
}

TEST(ManifestTest, OneLineParsesExactly) {
  const Manifest m = parse(kLine);
  ASSERT_EQ(m.records.size(), 1u);
  const DatasetRecord& r = m.records[0];
  EXPECT_EQ(r.path, "a.png");
  EXPECT_EQ(r.vehicle, Vehicle::kNiro);
  EXPECT_EQ(r.place, Place::kOutdoor);
  EXPECT_EQ(r.time, TimeOfDay::kNight);
  EXPECT_EQ(r.weather, Weather::kSunny);
  EXPECT_EQ(r.split, Split::kVal);
  ASSERT_EQ(r.boxes.size(), 2u);
  EXPECT_EQ(r.boxes[0], (BBox{Component::kTop, 1, 2, 3, 4}));
  EXPECT_EQ(r.boxes[1], (BBox{Component::kBottomRight, 5.5, 6, 7, 8}));
  EXPECT_FALSE(r.width.has_value());
}

TEST(ManifestTest, RecordJsonRoundTrips) {
  DatasetRecord r = parse(kLine).records[0];
  r.width = 640;
  r.height = 480;
  const Manifest back = parse(record_to_json(r));
  EXPECT_EQ(back.records[0], r);
  std::ostringstream out;
  write_manifest(out, {r, r});
  EXPECT_EQ(out.str(), record_to_json(r) + "\n" + record_to_json(r) + "\n");
}

TEST(ManifestTest, UnknownClassNamesTheLine) {
  const std::string bad =
      std::string(kLine) + "\n" +
      R"({"path":"b.png","vehicle":"bolt","place":"indoor","split":"train","boxes":[{"cls":"left","x":0,"y":0,"w":1,"h":1}]})";
  EXPECT_THROW(parse(bad), ValidationError);
  const std::string msg = error_of(bad);
  EXPECT_NE(msg.find("m.jsonl:2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("left"), std::string::npos) << msg;
}

TEST(ManifestTest, Rejections) {
  EXPECT_THROW(parse("{not json"), FormatError);
  EXPECT_THROW(parse(R"({"path":"a","vehicle":"bolt","place":"indoor"})"), FormatError);
  EXPECT_THROW(parse(R"({"path":"a","vehicle":"tesla","place":"indoor","split":"train"})"),
               ValidationError);
  EXPECT_THROW(parse(std::string(kLine) + "\n" + kLine), ValidationError);
  EXPECT_NE(error_of(std::string(kLine) + "\n" + kLine).find("duplicate"), std::string::npos);
  const auto with_box = [](const std::string& box, const std::string& extra = "") {
    return R"({"path":"a","vehicle":"bolt","place":"indoor","split":"train")" + extra +
           R"(,"boxes":[)" + box + "]}";
  };
  EXPECT_THROW(parse(with_box(R"({"cls":"top","x":0,"y":0,"w":0,"h":1})")), ValidationError);
  EXPECT_THROW(parse(with_box(R"({"cls":"top","x":-1,"y":0,"w":2,"h":1})")), ValidationError);
  EXPECT_THROW(parse(with_box(R"({"cls":"top","x":0,"y":0,"w":1,"h":1},{"cls":"top","x":2,"y":0,"w":1,"h":1})")),
               ValidationError);
  EXPECT_THROW(parse(with_box(R"({"cls":"top","x":5,"y":0,"w":6,"h":1})", R"(,"width":10,"height":10)")),
               ValidationError);
  EXPECT_NO_THROW(parse(with_box(R"({"cls":"top","x":4,"y":0,"w":6,"h":10})", R"(,"width":10,"height":10)")));
}

TEST(ManifestTest, LoadResolvesRelativePaths) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "evci_dataset_test";
  fs::create_directories(dir);
  std::ofstream(dir / "m.jsonl") << kLine << "\n";
  const Manifest m = load_manifest(dir / "m.jsonl", Scheme::kEvciB);
  EXPECT_EQ(m.scheme, Scheme::kEvciB);
  EXPECT_EQ(m.resolve(m.records[0]), dir / "a.png");
  EXPECT_THROW(load_manifest(dir / "absent.jsonl"), IoError);
}

TEST(SchemeTest, Names) {
  EXPECT_EQ(parse_scheme("EVCI-A"), Scheme::kEvciA);
  EXPECT_EQ(parse_scheme("B"), Scheme::kEvciB);
  EXPECT_THROW(parse_scheme("C"), ValidationError);
  EXPECT_EQ(parse_split("test"), Split::kTest);
  EXPECT_THROW(parse_split("dev"), ValidationError);
}

TEST(ExpectedCountsTest, ReferenceTablesAreConsistent) {
  for (auto [scheme, table] : {std::pair{Scheme::kEvciA, kTableA}, std::pair{Scheme::kEvciB, kTableB}}) {
    std::size_t total = 0;
    std::array<std::size_t, 3> per_group{};
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t g = 0; g < 3; ++g) {
        EXPECT_EQ(expected_split_count(scheme, static_cast<Split>(s), static_cast<TimeGroup>(g)),
                  table[s][g]);
        total += table[s][g];
        per_group[g] += table[s][g];
      }
    }
    EXPECT_EQ(total, kFullDatasetSize);
    EXPECT_EQ(per_group, (std::array<std::size_t, 3>{1950, 1009, 1194}));
  }
}

TEST(ValidateSplitsTest, FullEvciAManifestMatches) {
  Manifest m;
  m.records = testing::full_count_records(kTableA);
  const SplitReport r = validate_splits(m);
  EXPECT_TRUE(r.matches()) << r.to_text();
  EXPECT_EQ(r.total_actual, 4153u);
  EXPECT_EQ(r.cells[0].actual, 1273u);
  EXPECT_EQ(r.cells[1].actual, 562u);
  EXPECT_EQ(r.cells[2].actual, 409u);
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_TRUE(j.is_object());
}

TEST(ValidateSplitsTest, FullEvciBTestSplit) {
  Manifest m;
  m.scheme = Scheme::kEvciB;
  m.records = testing::full_count_records(kTableB);
  EXPECT_TRUE(validate_splits(m).matches());
  EXPECT_EQ(select(m, Split::kTest).size(), 424u + 177u + 907u);
}

TEST(ValidateSplitsTest, SubsetFlagsEveryDeviatingCell) {
  Manifest m;
  m.records = testing::full_count_records(kTableA);
  m.records.resize(100);  // all indoor training records
  const SplitReport r = validate_splits(m);
  EXPECT_FALSE(r.matches());
  EXPECT_EQ(r.mismatches().size(), 9u);
  EXPECT_NE(r.to_text().find("MISMATCH"), std::string::npos);
}

TEST(ValidateSplitsTest, UnknownCaptureConditionIsAnIssue) {
  Manifest m;
  m.records = testing::full_count_records(kTableA);
  m.records.back().weather = Weather::kRainy;  // niro evening rainy is not collected
  const SplitReport r = validate_splits(m);
  EXPECT_EQ(r.issues.size(), 1u);
  EXPECT_FALSE(r.matches());
}

TEST(ValidateSplitsProperty, PermutationInvariant) {
  Manifest m;
  m.records = testing::full_count_records(kTableA);
  const SplitReport a = validate_splits(m);
  Rng rng(3);
  rng.shuffle(m.records);
  const SplitReport b = validate_splits(m);
  EXPECT_EQ(a.to_json(), b.to_json());
}

TEST(SelectTest, StableAndIdempotent) {
  Manifest m;
  m.records = testing::full_count_records(kTableA);
  EXPECT_TRUE(select(m, std::nullopt, [](const DatasetRecord&) { return false; }).empty());
  const auto night = [](const DatasetRecord& r) { return r.time == TimeOfDay::kNight; };
  const auto a = select(m, Split::kTest, night);
  EXPECT_EQ(a, select(m, Split::kTest, night));
  for (std::size_t i = 1; i < a.size(); ++i) {
    EXPECT_LT(std::stoi(a[i - 1].path.substr(5)), std::stoi(a[i].path.substr(5)));
  }
  Manifest sub;
  sub.records = a;
  EXPECT_EQ(select(sub, Split::kTest, night), a);
  std::size_t total = 0;
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) total += select(m, s).size();
  EXPECT_EQ(total, m.records.size());
}

TEST(CaptureCategoryTest, IndoorOrTimeLabel) {
  DatasetRecord r;
  r.place = Place::kIndoor;
  r.time = TimeOfDay::kNight;
  EXPECT_EQ(capture_category(r), "indoor");
  EXPECT_EQ(time_group(r), TimeGroup::kIndoor);
  r.place = Place::kOutdoor;
  EXPECT_EQ(capture_category(r), "night");
  EXPECT_EQ(time_group(r), TimeGroup::kNightEvening);
  r.time = TimeOfDay::kNone;
  EXPECT_FALSE(time_group(r).has_value());
}

}  // namespace
}  // namespace evci::data
