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
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "footfall/audio.hpp"
#include "footfall/error.hpp"
#include "footfall/gcc.hpp"
#include "footfall/baseline.hpp"
#include "footfall/simulator.hpp"
#include "test_util.hpp"

using namespace footfall;

namespace {

Vec2 polar(double deg, double r) {
  const double t = deg * std::numbers::pi / 180.0;
  return {r * std::cos(t), r * std::sin(t)};
}

// Analytic delay of mic b relative to mic a, in samples.
double analytic_delay(const ArrayGeometry& g, MicPair p, Vec2 src) {
  const double ra = (src - g.positions[p.a]).norm();
  const double rb = (src - g.positions[p.b]).norm();
  return (rb - ra) / kSpeedOfSound * kSampleRate;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("footstep sources") {
  const auto empty = synth_source(Action::kEmpty, 2.0, 1);
  CHECK(empty.samples.size() == 2 * 44100);
  CHECK(std::all_of(empty.samples.begin(), empty.samples.end(),
                    [](float v) { return v == 0.0f; }));
  CHECK(empty.step_onsets.empty());

  const auto a = synth_source(Action::kNormal, 3.0, 2);
  const auto b = synth_source(Action::kNormal, 3.0, 2);
  CHECK(a.samples == b.samples);
  CHECK(a.step_onsets.size() >= 4);

  const auto quiet = synth_source(Action::kQuiet, 3.0, 3);
  const auto loud = synth_source(Action::kLoud, 3.0, 3);
  REQUIRE(quiet.step_onsets == loud.step_onsets);
  int bursts = 0;
  for (std::size_t i = 0; i < quiet.samples.size(); ++i) {
    if (std::abs(quiet.samples[i]) < 1e-4f) continue;
    REQUIRE(loud.samples[i] / quiet.samples[i] == doctest::Approx(9.0).epsilon(1e-5));
    ++bursts;
  }
  CHECK(bursts > 1000);
}

TEST_CASE("trajectories") {
  const Trajectory t({{0, 0}, {3, 0}, {3, 4}}, 1.0);
  CHECK(t.length() == doctest::Approx(7.0));
  CHECK(t.at(1.5).x == doctest::Approx(1.5));
  CHECK(t.at(5.0).y == doctest::Approx(2.0));
  // Past the end the walker stays at the last waypoint.
  CHECK(t.at(8.0).y == doctest::Approx(4.0));
  CHECK_THROWS_AS(Trajectory({}, 1.0), Error);
  const auto s = Trajectory::stationary({1, 2});
  CHECK(s.at(100.0).x == 1.0);
}

TEST_CASE("robot motion bounds") {
  RobotMotion m;
  CHECK(m.max_speed() <= kMaxRobotSpeed);
  CHECK(m.max_turn_rate() <= kMaxRobotTurnRate);
  SceneConfig scene;
  scene.action = Action::kEmpty;
  scene.robot.moving = true;
  scene.robot.motion.translate_period = 1.0;
  CHECK_THROWS_AS(check_scene(scene), Error);
  scene.robot.motion = RobotMotion{};
  scene.action = Action::kNormal;
  scene.walker = Trajectory::stationary({0.1, 0.0});
  CHECK_THROWS_AS(check_scene(scene), Error);
  scene.walker = Trajectory::stationary({7.0, 0.0});
  CHECK_THROWS_AS(check_scene(scene), Error);
  scene.walker = Trajectory::stationary({2.0, 0.0});
  CHECK_NOTHROW(check_scene(scene));
}

TEST_CASE("bisector source has zero front delay") {
  const auto g = default_geometry();
  const auto src = synth_source(Action::kLoud, 1.0, 4);
  const auto clip = propagate(src.samples, Trajectory::stationary({2.5, 0.0}),
                              RobotTrack{}, g);
  const auto r = gcc_phat(clip.channel(0), clip.channel(1), 39);
  CHECK(std::abs(r.delay) <= 1.0);
  // Pure symmetry: the two front channels are identical.
  for (std::size_t i = 0; i < clip.n_samples(); i += 101) {
    REQUIRE(clip.channel(0)[i] == doctest::Approx(clip.channel(1)[i]).epsilon(1e-5));
  }
}

TEST_CASE("geometric oracle on stationary sources") {
  const auto g = default_geometry();
  int total = 0;
  for (int k = 0; k < 12; ++k) {
    const double deg = -80.0 + 160.0 * k / 11.0;
    const Vec2 p = polar(deg, 1.0 + 0.3 * k);
    const auto src = synth_source(Action::kNormal, 1.0, 10 + k);
    const auto clip = propagate(src.samples, Trajectory::stationary(p),
                                RobotTrack{}, g);
    const auto r = gcc_phat(clip.channel(0), clip.channel(1), 39);
    REQUIRE(std::abs(r.delay - analytic_delay(g, g.front, p)) <= 1.0);
    ++total;
  }
  CHECK(total == 12);
}

TEST_CASE("one over r") {
  const auto g = default_geometry();
  const auto src = synth_source(Action::kNormal, 1.0, 5);
  const auto near = propagate(src.samples, Trajectory::stationary(polar(40, 1.5)),
                              RobotTrack{}, g);
  const auto far = propagate(src.samples, Trajectory::stationary(polar(40, 3.0)),
                             RobotTrack{}, g);
  for (int c = 0; c < 4; ++c) {
    const double ratio = rms(far).per_channel[c] / rms(near).per_channel[c];
    CHECK(ratio == doctest::Approx(0.5).epsilon(0.1));
  }
}

TEST_CASE("cardioid front and back") {
  const auto g = default_geometry();
  const auto src = synth_source(Action::kNormal, 1.0, 6);
  const auto clip = propagate(src.samples, Trajectory::stationary({3.0, 0.0}),
                              RobotTrack{}, g);
  const auto r = rms(clip);
  CHECK(r.per_channel[0] > 3.0 * r.per_channel[2]);
}

TEST_CASE("noise beds") {
  SceneConfig scene;
  scene.room_id = "r";
  scene.duration_s = 2.0;
  scene.seed = 7;
  scene.room_noise.level = 0.004;
  MultiChannelClip clean(4, 2 * 44100);
  const auto noisy = add_noise_beds(clean, scene);
  CHECK(rms(noisy).pooled > 0.001);
  CHECK(scene_labels(scene, clean.n_samples()).front().presence == false);

  scene.beds = false;
  CHECK(add_noise_beds(clean, scene) == clean);
  scene.beds = true;

  auto dyn = scene;
  dyn.robot_condition = RobotCondition::kDynamic;
  CHECK(rms(add_noise_beds(clean, dyn)).pooled > rms(noisy).pooled);
  CHECK(add_noise_beds(clean, scene) == noisy);
}

TEST_CASE("labels follow the walker") {
  SceneConfig scene;
  scene.room_id = "r";
  scene.action = Action::kLoud;
  scene.walker = Trajectory::stationary({0.0, 1.0});
  const auto labels = scene_labels(scene, 2 * 44100);
  REQUIRE(labels.size() == 5);
  for (const auto& s : labels) {
    CHECK(s.presence);
    CHECK(*s.azimuth_x == doctest::Approx(360.0));
    CHECK(*s.radial_distance == doctest::Approx(1.0));
    CHECK(*s.radial_distance <= 1.7);
  }
}

TEST_CASE("plan arithmetic and label statistics") {
  DatasetConfig cfg;
  cfg.action_seconds = 60.0;
  const auto plan = plan_dataset(cfg);
  std::size_t presence = 0;
  std::vector<double> dist;
  for (const auto& p : plan) {
    if (p.kind != PlannedRecording::Kind::kSample) continue;
    for (const auto& s : scene_labels(p.scene, static_cast<std::size_t>(p.scene.duration_s * 44100))) {
      validate(s);
      if (!s.presence) continue;
      ++presence;
      dist.push_back(*s.radial_distance);
      const auto c = encode_cyclic(*s.azimuth_x);
      REQUIRE(circular_pixel_error(decode_cyclic(c.sin, c.cos), *s.azimuth_x) < 1e-6);
    }
  }
  CHECK(presence == 8u * 3 * 2 * 237);
  std::nth_element(dist.begin(), dist.begin() + dist.size() / 2, dist.end());
  const double median = dist[dist.size() / 2];
  MESSAGE("median walker distance " << median);
  CHECK(std::abs(median - 1.7) <= 0.3);
}

TEST_CASE("config sections") {
  const auto cfg = DatasetConfig::from_config(KeyValueConfig::parse(
      "[dataset]\nrooms = 3\nconditions = dynamic\nseed = 99\n"
      "[footstep]\nloud_ratio = 7\n[reverb]\nenabled = false\n"));
  CHECK(cfg.rooms == 3);
  CHECK(cfg.conditions == std::vector<RobotCondition>{RobotCondition::kDynamic});
  CHECK(cfg.seed == 99);
  CHECK(cfg.footsteps.loud_ratio == 7.0);
  CHECK_FALSE(cfg.reverb.enabled);
}

TEST_CASE("generated dataset") {
  footfall::testing::TempDir a("sim_a"), b("sim_b");
  const auto cfg = footfall::testing::small_dataset_config(2);
  const auto plan = plan_dataset(cfg);
  const auto m = generate_dataset(plan, default_geometry(), a.path());
  generate_dataset(plan, default_geometry(), b.path());
  CHECK(slurp(a.path() / kManifestFileName) == slurp(b.path() / kManifestFileName));
  CHECK(slurp(a.path() / "room1/static/loud_1.wav") ==
        slurp(b.path() / "room1/static/loud_1.wav"));
  CHECK(load_manifest(a.path() / kManifestFileName) == m);
  CHECK(m.rooms() == std::vector<std::string>{"room1", "room2"});
  CHECK(m.augmentation.size() == 1);
  CHECK(m.samples.size() == 2u * 4 * 21);

  // Energy ordering per room at a fixed bed level.
  for (const auto& room : m.rooms()) {
    double level[4];
    for (Action act : kAllActions) {
      const std::string name = std::string(to_string(act)) + "_1.wav";
      level[static_cast<int>(act)] =
          rms(read_recording(a.path() / room / "static" / name)).pooled;
    }
    CHECK(level[int(Action::kLoud)] > level[int(Action::kNormal)]);
    CHECK(level[int(Action::kNormal)] > level[int(Action::kQuiet)]);
    CHECK(level[int(Action::kQuiet)] > level[int(Action::kEmpty)]);
  }
}

}  // TEST_SUITE
