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

#include <optional>

#include "footfall/audio.hpp"
#include "footfall/gcc.hpp"
#include "footfall/geometry.hpp"

namespace footfall {

// ceil(fs * d_max / c) + 2 for the largest pair baseline of `g`.
int default_max_lag(const ArrayGeometry& g, int sample_rate = kSampleRate);

// Front pair when the true angle is within 90 degrees of straight ahead
// (inclusive), back pair otherwise. Evaluation-only: needs the label.
MicPair oracle_pair(const ArrayGeometry& g, std::optional<double> true_theta_deg);

// Broadside direction of `pair` in the robot frame, degrees in [0, 360).
double constant_front(const ArrayGeometry& g, MicPair pair);

// Robot-frame direction for an angle measured from the pair broadside,
// positive toward microphone `pair.a`.
double pair_angle_to_robot(const ArrayGeometry& g, MicPair pair,
                           double pair_angle_deg);

struct BaselinePrediction {
  double angle_deg = 0.0;
  MicPair pair;
  GccResult gcc;
  bool low_confidence = false;
};

inline constexpr double kLowConfidencePeak = 0.05;

BaselinePrediction baseline_predict(const MultiChannelClip& clip,
                                    const ArrayGeometry& g,
                                    std::optional<double> true_theta_deg,
                                    std::optional<int> max_lag = std::nullopt);

}  // namespace footfall
