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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "footfall/config.hpp"

namespace footfall {

inline constexpr int kPanoramaWidth = 1440;
inline constexpr double kSpeedOfSound = 343.0;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  Vec2 normalized() const {
    const double n = norm();
    return {x / n, y / n};
  }
  Vec2 rotated(double radians) const {
    const double c = std::cos(radians), s = std::sin(radians);
    return {c * x - s * y, s * x + c * y};
  }
};

enum class PolarPattern { kCardioid, kOmni };

struct MicPair {
  int a = 0;
  int b = 1;
  friend bool operator==(const MicPair&, const MicPair&) = default;
};

// Planar microphone array in the robot frame: x forward, y left, meters.
struct ArrayGeometry {
  std::vector<Vec2> positions;
  std::vector<Vec2> facings;  // unit vectors
  PolarPattern pattern = PolarPattern::kCardioid;
  MicPair front{0, 1};
  MicPair back{2, 3};

  int n_mics() const { return static_cast<int>(positions.size()); }
  double baseline(MicPair p) const {
    return (positions[p.a] - positions[p.b]).norm();
  }
  double max_baseline() const;
  // All unordered pairs (i < j) in lexicographic order.
  std::vector<MicPair> all_pairs() const;
  // Unit vector perpendicular to the pair axis, pointing away from the
  // array centroid.
  Vec2 broadside(MicPair p) const;
  // Gain of microphone `m` for a source in robot-frame direction `dir`.
  double gain(int m, Vec2 dir) const;
};

// Square of the given side centered on the robot origin with mics facing
// outward along the diagonals. Index order: front-left, front-right,
// back-left, back-right.
ArrayGeometry default_geometry(double side = 0.20);
ArrayGeometry geometry_from_config(const KeyValueConfig& cfg);
ArrayGeometry load_geometry(const std::filesystem::path& path);
std::string geometry_to_text(const ArrayGeometry& g);
// FNV-1a of the canonical text; stored in model checkpoints.
std::uint64_t geometry_hash(const ArrayGeometry& g);
// Throws kGeometryMissing on an unusable geometry.
void validate(const ArrayGeometry& g);

struct CyclicCode {
  double sin = 0.0;
  double cos = 1.0;
};

// (sin 2πx/W, cos 2πx/W); throws kOutOfRange unless 0 <= x < W.
CyclicCode encode_cyclic(double x, int width = kPanoramaWidth);
// Clamps both inputs to [-1, 1] and returns the quadrant-aware angle as a
// pixel in [0, W). Throws kDegenerateDirection when both clamped inputs are
// below 1e-9 in magnitude.
double decode_cyclic(double sin_value, double cos_value,
                     int width = kPanoramaWidth);

// Distance on the circle, degrees in [0, 180].
double circular_error(double a_deg, double b_deg);
// Pixel distance on a panorama of the given width, in [0, W/2].
double circular_pixel_error(double a, double b, int width = kPanoramaWidth);

// asin(clamp(c * tau / d, -1, 1)) in degrees, relative to the pair broadside.
double tdoa_to_angle(double tau_seconds, double baseline_m,
                     double speed_of_sound = kSpeedOfSound);

// 0.5 * (1 + cos phi).
double cardioid_gain(double phi);

struct Pose {
  Vec2 position;
  double heading = 0.0;  // radians, counterclockwise from world +x
};

// Azimuth of `person` seen from the robot, degrees counterclockwise from the
// robot's forward vector, in [0, 360). Throws kCoincidentPosition.
double world_to_robot_azimuth(Vec2 person, const Pose& robot);
double robot_azimuth_to_pixel(double theta_deg, int width = kPanoramaWidth);
double pixel_to_degrees(double x, int width = kPanoramaWidth);
// Wraps any angle into [0, 360).
double wrap_degrees(double deg);

}  // namespace footfall
