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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace footfall {

enum class Action { kQuiet, kNormal, kLoud, kEmpty };
enum class RobotCondition { kStatic, kDynamic };

inline constexpr Action kMovingActions[] = {Action::kQuiet, Action::kNormal,
                                            Action::kLoud};
inline constexpr Action kAllActions[] = {Action::kEmpty, Action::kQuiet,
                                         Action::kNormal, Action::kLoud};
inline constexpr RobotCondition kConditions[] = {RobotCondition::kStatic,
                                                 RobotCondition::kDynamic};

std::string_view to_string(Action a);
std::string_view to_string(RobotCondition c);
Action parse_action(std::string_view s);
RobotCondition parse_condition(std::string_view s);

// One labeled 1 s clip. The label describes the scene at the clip start.
struct LabeledSample {
  std::string clip_path;  // relative to the manifest directory
  double clip_offset_s = 0.0;
  std::string room_id;
  Action action = Action::kEmpty;
  RobotCondition robot_condition = RobotCondition::kStatic;
  std::optional<double> azimuth_x;        // pixels in [0, 1440)
  std::optional<double> radial_distance;  // meters in (0, 6]
  bool presence = false;

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

// Empty-room audio used to build the subtraction profile of one room and
// robot condition.
struct EmptyProfileRef {
  std::string room_id;
  RobotCondition robot_condition = RobotCondition::kStatic;
  std::string path;

  friend bool operator==(const EmptyProfileRef&,
                         const EmptyProfileRef&) = default;
};

// Foreign empty-room audio mixed into training clips.
struct AugmentationRef {
  std::string room_id;
  std::string path;

  friend bool operator==(const AugmentationRef&,
                         const AugmentationRef&) = default;
};

struct Manifest {
  std::vector<LabeledSample> samples;
  std::vector<EmptyProfileRef> empty_profiles;
  std::vector<AugmentationRef> augmentation;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& rel) const {
    return base_dir / rel;
  }
  // Sorted, de-duplicated room ids referenced by samples.
  std::vector<std::string> rooms() const;
  const EmptyProfileRef* find_profile(const std::string& room,
                                      RobotCondition condition) const;

  friend bool operator==(const Manifest& a, const Manifest& b) {
    return a.samples == b.samples && a.empty_profiles == b.empty_profiles &&
           a.augmentation == b.augmentation;
  }
};

// Checks the sample label invariants and that every (room, condition) used by
// a sample has an empty-profile reference. Throws kMalformedLabel or
// kMissingEmptyProfile.
void validate(const Manifest& manifest);
void validate(const LabeledSample& sample);

// Line-delimited JSON, one record per line, tagged by "kind".
std::string serialize_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text,
                        const std::filesystem::path& base_dir = {});
void save_manifest(const std::filesystem::path& path,
                   const Manifest& manifest);
Manifest load_manifest(const std::filesystem::path& path);

}  // namespace footfall
