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

#include "footfall/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "footfall/error.hpp"

namespace footfall {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRadToDeg = 180.0 / kPi;

}  // namespace

double ArrayGeometry::max_baseline() const {
  double best = 0.0;
  for (const auto& p : all_pairs()) best = std::max(best, baseline(p));
  return best;
}

std::vector<MicPair> ArrayGeometry::all_pairs() const {
  std::vector<MicPair> pairs;
  for (int i = 0; i < n_mics(); ++i) {
    for (int j = i + 1; j < n_mics(); ++j) pairs.push_back({i, j});
  }
  return pairs;
}

Vec2 ArrayGeometry::broadside(MicPair p) const {
  const Vec2 axis = (positions[p.a] - positions[p.b]).normalized();
  Vec2 normal{-axis.y, axis.x};
  Vec2 centroid;
  for (const auto& q : positions) centroid = centroid + q;
  centroid = centroid * (1.0 / positions.size());
  const Vec2 mid = (positions[p.a] + positions[p.b]) * 0.5;
  Vec2 outward = mid - centroid;
  if (outward.norm() < 1e-12) {
    outward = facings[p.a] + facings[p.b];
  }
  if (normal.dot(outward) < 0.0) normal = normal * -1.0;
  return normal;
}

double ArrayGeometry::gain(int m, Vec2 dir) const {
  if (pattern == PolarPattern::kOmni) return 1.0;
  const double c = std::clamp(facings[m].dot(dir.normalized()), -1.0, 1.0);
  return cardioid_gain(std::acos(c));
}

ArrayGeometry default_geometry(double side) {
  const double h = side / 2.0;
  const double d = std::numbers::sqrt2 / 2.0;
  ArrayGeometry g;
  g.positions = {{h, h}, {h, -h}, {-h, h}, {-h, -h}};
  g.facings = {{d, d}, {d, -d}, {-d, d}, {-d, -d}};
  g.pattern = PolarPattern::kCardioid;
  return g;
}

void validate(const ArrayGeometry& g) {
  auto missing = [](const std::string& why) {
    return Error(Errc::kGeometryMissing, why);
  };
  if (g.n_mics() < 2) throw missing("at least two microphones required");
  if (g.facings.size() != g.positions.size()) {
    throw missing("one facing per microphone required");
  }
  for (const auto& f : g.facings) {
    if (std::abs(f.norm() - 1.0) > 1e-6) throw missing("facings must be unit");
  }
  for (MicPair p : {g.front, g.back}) {
    if (p.a < 0 || p.b < 0 || p.a >= g.n_mics() || p.b >= g.n_mics() ||
        p.a == p.b) {
      throw missing("pair indices out of range");
    }
    if (g.baseline(p) <= 0.0) throw missing("coincident pair microphones");
  }
}

ArrayGeometry geometry_from_config(const KeyValueConfig& cfg) {
  ArrayGeometry g;
  for (int m = 0;; ++m) {
    const std::string key = "mic" + std::to_string(m);
    if (!cfg.has(key + ".position")) break;
    auto pos = cfg.get_doubles(key + ".position");
    auto face = cfg.get_doubles(key + ".facing");
    if (pos.size() != 2 || face.size() != 2) {
      throw Error(Errc::kGeometryMissing, key + " needs 2-D position/facing");
    }
    g.positions.push_back({pos[0], pos[1]});
    g.facings.push_back(Vec2{face[0], face[1]}.normalized());
  }
  const std::string pattern = cfg.get_string("polar_pattern", "cardioid");
  if (pattern == "cardioid") {
    g.pattern = PolarPattern::kCardioid;
  } else if (pattern == "omni") {
    g.pattern = PolarPattern::kOmni;
  } else {
    throw Error(Errc::kGeometryMissing, "unknown polar pattern " + pattern);
  }
  auto pair = [&](const std::string& key, MicPair fallback) {
    auto v = cfg.get_doubles(key);
    if (v.empty()) return fallback;
    if (v.size() != 2) throw Error(Errc::kGeometryMissing, key + " needs 2 ids");
    return MicPair{static_cast<int>(v[0]), static_cast<int>(v[1])};
  };
  g.front = pair("front_pair", {0, 1});
  g.back = pair("back_pair", {2, 3});
  validate(g);
  return g;
}

ArrayGeometry load_geometry(const std::filesystem::path& path) {
  return geometry_from_config(KeyValueConfig::load(path));
}

std::string geometry_to_text(const ArrayGeometry& g) {
  std::ostringstream os;
  char buf[128];
  os << "polar_pattern = "
     << (g.pattern == PolarPattern::kCardioid ? "cardioid" : "omni") << '\n';
  os << "front_pair = " << g.front.a << ' ' << g.front.b << '\n';
  os << "back_pair = " << g.back.a << ' ' << g.back.b << '\n';
  for (int m = 0; m < g.n_mics(); ++m) {
    std::snprintf(buf, sizeof(buf),
                  "[mic%d]\nposition = %.9g %.9g\nfacing = %.9g %.9g\n", m,
                  g.positions[m].x, g.positions[m].y, g.facings[m].x,
                  g.facings[m].y);
    os << buf;
  }
  return os.str();
}

std::uint64_t geometry_hash(const ArrayGeometry& g) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : geometry_to_text(g)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

CyclicCode encode_cyclic(double x, int width) {
  if (!(x >= 0.0 && x < width)) {
    throw Error(Errc::kOutOfRange, "pixel " + std::to_string(x) +
                                       " outside [0, " + std::to_string(width) +
                                       ")");
  }
  const double a = 2.0 * kPi * x / width;
  return {std::sin(a), std::cos(a)};
}

double decode_cyclic(double sin_value, double cos_value, int width) {
  const double s = std::clamp(sin_value, -1.0, 1.0);
  const double c = std::clamp(cos_value, -1.0, 1.0);
  if (std::abs(s) < 1e-9 && std::abs(c) < 1e-9) {
    throw Error(Errc::kDegenerateDirection, "both cyclic components vanish");
  }
  double x = std::atan2(s, c) / (2.0 * kPi) * width;
  if (x < 0.0) x += width;
  if (x >= width) x -= width;
  return x;
}

double circular_error(double a_deg, double b_deg) {
  const double d = std::fmod(std::abs(a_deg - b_deg), 360.0);
  return std::min(d, 360.0 - d);
}

double circular_pixel_error(double a, double b, int width) {
  const double d = std::fmod(std::abs(a - b), static_cast<double>(width));
  return std::min(d, width - d);
}

double tdoa_to_angle(double tau_seconds, double baseline_m,
                     double speed_of_sound) {
  if (!(baseline_m > 0.0)) {
    throw Error(Errc::kOutOfRange, "baseline must be positive");
  }
  const double s =
      std::clamp(speed_of_sound * tau_seconds / baseline_m, -1.0, 1.0);
  return std::asin(s) * kRadToDeg;
}

double cardioid_gain(double phi) { return 0.5 * (1.0 + std::cos(phi)); }

double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w -= 360.0;
  return w;
}

double world_to_robot_azimuth(Vec2 person, const Pose& robot) {
  const Vec2 d = person - robot.position;
  if (d.norm() < 1e-9) {
    throw Error(Errc::kCoincidentPosition, "person at robot origin");
  }
  const Vec2 local = d.rotated(-robot.heading);
  return wrap_degrees(std::atan2(local.y, local.x) * kRadToDeg);
}

double robot_azimuth_to_pixel(double theta_deg, int width) {
  double x = wrap_degrees(theta_deg) / 360.0 * width;
  if (x >= width) x -= width;
  return x;
}

double pixel_to_degrees(double x, int width) { return 360.0 * x / width; }

}  // namespace footfall
