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

#include "footfall/baseline.hpp"

#include <cmath>
#include <numbers>

#include "footfall/error.hpp"

namespace footfall {

int default_max_lag(const ArrayGeometry& g, int sample_rate) {
  return static_cast<int>(
             std::ceil(sample_rate * g.max_baseline() / kSpeedOfSound)) +
         2;
}

MicPair oracle_pair(const ArrayGeometry& g,
                    std::optional<double> true_theta_deg) {
  if (!true_theta_deg) {
    throw Error(Errc::kMissingLabel, "oracle pair selection needs a label");
  }
  return circular_error(*true_theta_deg, 0.0) <= 90.0 ? g.front : g.back;
}

double constant_front(const ArrayGeometry& g, MicPair pair) {
  const Vec2 n = g.broadside(pair);
  return wrap_degrees(std::atan2(n.y, n.x) * 180.0 / std::numbers::pi);
}

double pair_angle_to_robot(const ArrayGeometry& g, MicPair pair,
                           double pair_angle_deg) {
  const Vec2 axis = (g.positions[pair.a] - g.positions[pair.b]).normalized();
  const Vec2 n = g.broadside(pair);
  const double phi = pair_angle_deg * std::numbers::pi / 180.0;
  const Vec2 dir = n * std::cos(phi) + axis * std::sin(phi);
  return wrap_degrees(std::atan2(dir.y, dir.x) * 180.0 / std::numbers::pi);
}

BaselinePrediction baseline_predict(const MultiChannelClip& clip,
                                    const ArrayGeometry& g,
                                    std::optional<double> true_theta_deg,
                                    std::optional<int> max_lag) {
  if (clip.n_channels() != g.n_mics()) {
    throw Error(Errc::kChannelCountMismatch,
                "clip channels do not match the array");
  }
  BaselinePrediction out;
  out.pair = oracle_pair(g, true_theta_deg);
  const int lag = max_lag.value_or(default_max_lag(g, clip.sample_rate()));
  out.gcc = gcc_phat(clip.channel(out.pair.a), clip.channel(out.pair.b), lag);
  const double tau = out.gcc.delay / clip.sample_rate();
  const double phi = tdoa_to_angle(tau, g.baseline(out.pair));
  out.angle_deg = pair_angle_to_robot(g, out.pair, phi);
  out.low_confidence = out.gcc.peak_value < kLowConfidencePeak;
  return out;
}

}  // namespace footfall
