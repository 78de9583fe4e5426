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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "footfall/audio.hpp"
#include "footfall/config.hpp"
#include "footfall/geometry.hpp"
#include "footfall/manifest.hpp"

namespace footfall {

struct FootstepModel {
  double base_amplitude = 1.0;  // quiet action, source level
  double normal_ratio = 3.0;
  double loud_ratio = 9.0;
  double burst_min_s = 0.020;
  double burst_max_s = 0.040;
  double interval_min_s = 0.45;
  double interval_max_s = 0.60;
  double band_low_hz = 80.0;
  double band_high_hz = 2000.0;

  double amplitude(Action a) const;
};

// Piecewise-linear walk at constant speed; holds the last waypoint.
class Trajectory {
 public:
  Trajectory() : Trajectory({Vec2{1.0, 0.0}}, 1.0) {}
  Trajectory(std::vector<Vec2> waypoints, double speed);
  static Trajectory stationary(Vec2 p) { return Trajectory({p}, 1.0); }

  Vec2 at(double t) const;
  const std::vector<Vec2>& waypoints() const { return waypoints_; }
  double speed() const { return speed_; }
  double length() const { return cumulative_.back(); }

 private:
  std::vector<Vec2> waypoints_;
  double speed_;
  std::vector<double> cumulative_;
};

// Slow back-and-forth translation along the start heading plus a heading
// oscillation.
struct RobotMotion {
  double translate_amplitude = 0.3;  // m
  double translate_period = 8.0;     // s
  double rotate_amplitude = 0.5;     // rad
  double rotate_period = 20.0;       // s
  double phase = 0.0;                // rad

  double max_speed() const;
  double max_turn_rate() const;
};

inline constexpr double kMaxRobotSpeed = 0.25;     // m/s
inline constexpr double kMaxRobotTurnRate = 0.17;  // rad/s

struct RobotTrack {
  Pose start;
  bool moving = false;
  RobotMotion motion;

  Pose at(double t) const;
};

struct RoomNoiseSpec {
  double level = 0.004;  // RMS per channel
  double tilt = 1.0;     // power spectrum ~ f^-tilt
  double shared_fraction = 0.3;
  std::vector<double> hum_hz;  // fundamentals; 3 harmonics each
  double hum_level = 0.0;
};

struct RobotNoiseSpec {
  double hum_hz = 120.0;
  double hum_level = 0.004;
  double noise_level = 0.004;  // band-limited motor noise
  double click_rate = 4.0;     // per second
  double click_level = 0.05;
  double gain_jitter = 0.1;
};

struct ReverbSpec {
  bool enabled = true;
  double t60 = 0.2;
  double level = 0.35;  // tail gain relative to the direct path at 1 m
};

struct SceneConfig {
  std::string room_id;
  RoomNoiseSpec room_noise;
  RobotNoiseSpec robot_noise;
  RobotCondition robot_condition = RobotCondition::kStatic;
  RobotTrack robot;
  Action action = Action::kEmpty;
  FootstepModel footsteps;
  Trajectory walker;
  ReverbSpec reverb;
  bool beds = true;
  double duration_s = 23.0;
  std::uint64_t seed = 0;
};

inline constexpr double kMinWalkerDistance = 0.3;
inline constexpr double kMaxWalkerDistance = 6.0;
inline constexpr double kNearFieldClamp = 0.3;

// Throws kInvalidTrajectory when the walker leaves (0.3 m, 6 m] around the
// robot, the walker speed is not positive, or the robot moves too fast.
void check_scene(const SceneConfig& scene);

struct SourceSignal {
  std::vector<float> samples;
  std::vector<std::size_t> step_onsets;
};

SourceSignal synth_source(Action action, double duration_s, std::uint64_t seed,
                          const FootstepModel& model = {});

// Direct path plus optional diffuse tail to every microphone.
MultiChannelClip propagate(std::span<const float> source,
                           const Trajectory& walker, const RobotTrack& robot,
                           const ArrayGeometry& geometry,
                           const ReverbSpec& reverb = {.enabled = false},
                           std::uint64_t seed = 0);

MultiChannelClip add_noise_beds(const MultiChannelClip& clean,
                                const SceneConfig& scene);

// check_scene, synth_source, propagate, add_noise_beds.
MultiChannelClip render_scene(const SceneConfig& scene,
                              const ArrayGeometry& geometry);

// Labels of the 4 Hz clips of a rendered scene (clip_path left empty).
std::vector<LabeledSample> scene_labels(const SceneConfig& scene,
                                        std::size_t n_samples);

struct RoomSampler {
  double width_min = 4.5, width_max = 7.0;
  double depth_min = 4.0, depth_max = 6.0;
  double level_min = 0.003, level_max = 0.006;
  double tilt_min = 0.8, tilt_max = 1.4;
  double hum_probability = 0.5;
  double hum_level = 0.002;
  double shared_fraction = 0.3;
};

struct WalkerSampler {
  double speed_min = 0.5, speed_max = 1.2;
  double wall_margin = 0.3;
  double robot_clearance = 0.7;
};

struct DatasetConfig {
  int rooms = 8;
  std::vector<RobotCondition> conditions = {RobotCondition::kStatic,
                                            RobotCondition::kDynamic};
  std::vector<Action> actions = {Action::kQuiet, Action::kNormal,
                                 Action::kLoud};
  int recordings_per_action = 1;
  int empty_recordings = 1;
  double action_seconds = 23.0;
  double empty_profile_seconds = 20.0;
  int augmentation_rooms = 4;
  double augmentation_seconds = 20.0;
  std::uint64_t seed = 7;
  FootstepModel footsteps;
  RoomSampler room;
  WalkerSampler walker;
  RobotNoiseSpec robot_noise;
  RobotMotion motion;
  ReverbSpec reverb;
  bool beds = true;

  // Sections [dataset], [footstep], [room], [walker], [robot], [reverb].
  static DatasetConfig from_config(const KeyValueConfig& config);
};

struct PlannedRecording {
  enum class Kind { kEmptyProfile, kAugmentation, kSample };
  Kind kind = Kind::kSample;
  SceneConfig scene;
  std::string path;  // relative to the output directory
};

std::vector<PlannedRecording> plan_dataset(const DatasetConfig& config);

// Renders every planned recording (in parallel), writes the WAV files and
// manifest.jsonl under `out_dir`, and returns the manifest.
Manifest generate_dataset(std::span<const PlannedRecording> plan,
                          const ArrayGeometry& geometry,
                          const std::filesystem::path& out_dir);

inline constexpr const char* kManifestFileName = "manifest.jsonl";

}  // namespace footfall
