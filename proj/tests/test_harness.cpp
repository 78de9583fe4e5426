// Copyright 2026 The Footfall Authors. All Rights Reserved.
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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "footfall/error.hpp"
#include "footfall/harness.hpp"
#include "test_util.hpp"

using namespace footfall;

namespace {

Dataset open_small() {
  return Dataset(load_manifest(footfall::testing::shared_small_dataset() /
                               kManifestFileName));
}

LoocvOptions quick_options() {
  LoocvOptions o;
  o.train.epochs = 2;
  o.train.dims.hidden1 = 32;
  o.train.dims.hidden2 = 16;
  o.train.energy_knots = 5;
  return o;
}

// Memoized: several cases inspect the same small run.
const Report& small_loocv() {
  static const Report r = [] {
    Dataset ds = open_small();
    return loocv(ds, quick_options());
  }();
  return r;
}

MetricsTable sample_table() {
  std::vector<ClipOutcome> clips;
  clips.push_back({Action::kQuiet, RobotCondition::kStatic, true, 10.0, true, true});
  clips.push_back({Action::kQuiet, RobotCondition::kStatic, true, 30.0, false, true});
  clips.push_back({Action::kLoud, RobotCondition::kDynamic, true, 5.0, true, false});
  clips.push_back({Action::kEmpty, RobotCondition::kStatic, false, std::nullopt,
                   std::nullopt, true});
  return tabulate("demo", clips);
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("fold plans") {
  const auto eight = plan_folds({"a", "b", "c", "d", "e", "f", "g", "h"});
  CHECK(eight.size() == 8);
  for (const auto& f : eight) {
    CHECK(f.train_rooms.size() == 7);
    CHECK(std::find(f.train_rooms.begin(), f.train_rooms.end(),
                    f.held_out_room) == f.train_rooms.end());
  }
  CHECK(plan_folds({"x", "y"}).size() == 2);
  bool thrown = false;
  try {
    plan_folds({"only"});
  } catch (const Error& e) {
    thrown = e.code() == Errc::kInsufficientRooms;
  }
  CHECK(thrown);
}

TEST_CASE("tabulate") {
  const auto t = sample_table();
  CHECK(*t.mae_deg.at(Action::kQuiet, RobotCondition::kStatic) == doctest::Approx(20.0));
  CHECK(*t.mae_deg.at(Action::kLoud, RobotCondition::kDynamic) == doctest::Approx(5.0));
  CHECK_FALSE(t.mae_deg.at(Action::kNormal, RobotCondition::kStatic).has_value());
  CHECK_FALSE(t.mae_deg.at(Action::kEmpty, RobotCondition::kStatic).has_value());
  CHECK(*t.mae_deg.overall == doctest::Approx(15.0));
  CHECK(*t.distance_acc.at(Action::kQuiet, RobotCondition::kStatic) == doctest::Approx(0.5));
  CHECK(*t.presence_acc.at(Action::kEmpty, RobotCondition::kStatic) == 1.0);
  // Balanced over empty and person clips: (1 + 2/3) / 2.
  CHECK(*t.presence_acc.overall == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("mean over folds skips absent cells") {
  auto a = sample_table();
  auto b = sample_table();
  b.mae_deg.at(Action::kQuiet, RobotCondition::kStatic) = 40.0;
  b.mae_deg.at(Action::kNormal, RobotCondition::kStatic) = 8.0;
  const auto m = mean_tables("demo", {&a, &b});
  CHECK(*m.mae_deg.at(Action::kQuiet, RobotCondition::kStatic) == doctest::Approx(30.0));
  CHECK(*m.mae_deg.at(Action::kNormal, RobotCondition::kStatic) == doctest::Approx(8.0));
}

TEST_CASE("report rendering") {
  Report r;
  r.kind = "baseline";
  r.seed = 3;
  r.aggregate.push_back(sample_table());
  FoldReport f;
  f.held_out_room = "room1";
  f.test_samples = 4;
  f.methods.push_back(sample_table());
  r.folds.push_back(f);

  const std::string csv = render_csv(r);
  CHECK(csv == render_csv(r));
  CHECK(csv.rfind("scope,method,metric,static_quiet,static_normal,static_loud,"
                  "static_empty,dynamic_quiet,dynamic_normal,dynamic_loud,"
                  "dynamic_empty,overall\n", 0) == 0);
  CHECK(csv.find("aggregate,demo,mae_deg,20.0000,\xE2\x80\x93,") != std::string::npos);
  CHECK(csv.find("fold:room1,demo,presence_acc") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

  const std::string json = render_json(r);
  CHECK(json.find("\"normal\": null") != std::string::npos);
  CHECK(parse_json_report(json) == r);
  CHECK(render_json(parse_json_report(json)) == json);
  CHECK(r.find("demo") == &r.aggregate[0]);
  CHECK(r.find("nope") == nullptr);
  CHECK_THROWS_AS(parse_json_report("{}"), Error);
  CHECK(parse_report_format("json") == ReportFormat::kJson);
  CHECK_THROWS_AS(parse_report_format("xml"), Error);
}

TEST_CASE("report files") {
  footfall::testing::TempDir dir("report");
  Report r;
  r.kind = "loocv";
  r.aggregate.push_back(sample_table());
  write_report(dir.path() / "r.csv", r, ReportFormat::kCsv);
  std::ifstream in(dir.path() / "r.csv", std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  CHECK(s.str() == render_csv(r));
}

TEST_CASE("baseline rows") {
  Dataset ds = open_small();
  const auto rep = baseline_report(ds, default_geometry());
  CHECK(rep.folds.size() == 2);
  const MetricsTable* uniform = rep.find(kUniformMethod);
  const MetricsTable* front = rep.find(kConstantFrontMethod);
  const MetricsTable* gcc = rep.find(kGccMethod);
  REQUIRE(uniform);
  REQUIRE(front);
  REQUIRE(gcc);
  for (Action a : kMovingActions) {
    CHECK(*uniform->mae_deg.at(a, RobotCondition::kStatic) == 90.0);
    const double f = *front->mae_deg.at(a, RobotCondition::kStatic);
    CHECK(f > 0.0);
    CHECK(f <= 90.0);
  }
  CHECK(*gcc->mae_deg.at(Action::kLoud, RobotCondition::kStatic) <
        *front->mae_deg.at(Action::kLoud, RobotCondition::kStatic));
  CHECK_FALSE(uniform->mae_deg.at(Action::kEmpty, RobotCondition::kStatic).has_value());
}

TEST_CASE("loocv on two rooms") {
  const Report& r = small_loocv();
  CHECK(r.kind == "loocv");
  REQUIRE(r.folds.size() == 2);
  for (const auto& f : r.folds) {
    CHECK(f.held_out_reads_during_training == 0);
    CHECK(f.train_samples == 84);
    CHECK(f.test_samples == 84);
    CHECK(f.methods.size() == 4);
    CHECK(f.w_backsub.has_value());
  }
  CHECK(r.folds[0].held_out_room == "room1");
  CHECK(r.folds[1].held_out_room == "room2");
  REQUIRE(r.find(kDetectorMethod));
  const auto& det = *r.find(kDetectorMethod);
  CHECK(det.presence_acc.overall.has_value());
  CHECK(*det.mae_deg.overall <= 180.0);
  CHECK(*r.find(kUniformMethod)->mae_deg.overall == 90.0);
}

TEST_CASE("loocv reports are byte identical across runs") {
  Dataset ds = open_small();
  const Report again = loocv(ds, quick_options());
  CHECK(render_csv(again) == render_csv(small_loocv()));
  CHECK(render_json(again) == render_json(small_loocv()));
}

TEST_CASE("loocv needs two rooms") {
  auto m = load_manifest(footfall::testing::shared_small_dataset() / kManifestFileName);
  std::erase_if(m.samples, [](const LabeledSample& s) { return s.room_id != "room1"; });
  Dataset ds(m);
  bool thrown = false;
  try {
    loocv(ds, quick_options());
  } catch (const Error& e) {
    thrown = e.code() == Errc::kInsufficientRooms;
  }
  CHECK(thrown);
}

}  // TEST_SUITE
