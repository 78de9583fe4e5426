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

#include "footfall/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <numbers>
#include <random>
#include <sstream>

#include "footfall/augment.hpp"
#include "footfall/error.hpp"
#include "footfall/fft.hpp"
#include "footfall/gcc.hpp"
#include "footfall/spectro.hpp"

namespace footfall {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// RBJ biquad, direct form I.
class Biquad {
 public:
  static Biquad lowpass(double f0, double fs) { return make(f0, fs, false); }
  static Biquad highpass(double f0, double fs) { return make(f0, fs, true); }

  double operator()(double x) {
    const double y = b0_ * x + b1_ * x1_ + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
    x2_ = x1_;
    x1_ = x;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  static Biquad make(double f0, double fs, bool high) {
    const double w0 = kTwoPi * f0 / fs;
    const double alpha = std::sin(w0) / (2.0 * std::numbers::sqrt2 / 2.0);
    const double c = std::cos(w0);
    const double a0 = 1.0 + alpha;
    Biquad q;
    if (high) {
      q.b0_ = (1.0 + c) / 2.0 / a0;
      q.b1_ = -(1.0 + c) / a0;
    } else {
      q.b0_ = (1.0 - c) / 2.0 / a0;
      q.b1_ = (1.0 - c) / a0;
    }
    q.b2_ = q.b0_;
    q.a1_ = -2.0 * c / a0;
    q.a2_ = (1.0 - alpha) / a0;
    return q;
  }

  double b0_ = 1, b1_ = 0, b2_ = 0, a1_ = 0, a2_ = 0;
  double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
};

// Gaussian noise with power spectrum ~ f^-tilt inside [lo, hi], unit RMS.
std::vector<double> colored_noise(std::size_t n, double tilt, double lo,
                                  double hi, std::mt19937_64& rng) {
  const std::size_t size = next_smooth_size(std::max<std::size_t>(n, 16));
  RealFft fft(size);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> buf(size);
  for (double& v : buf) v = gauss(rng);
  std::vector<std::complex<double>> spec(fft.bins());
  fft.forward(buf, spec);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * kSampleRate / size;
    if (f < lo || f > hi) {
      spec[k] = 0.0;
    } else {
      spec[k] *= std::pow(std::max(f, 20.0) / 1000.0, -tilt / 2.0);
    }
  }
  fft.inverse(spec, buf);
  buf.resize(n);
  double ss = 0.0;
  for (double v : buf) ss += v * v;
  const double r = std::sqrt(ss / std::max<std::size_t>(n, 1));
  if (r > 0.0) {
    for (double& v : buf) v /= r;
  }
  return buf;
}

// Linear convolution of x with h, truncated to x.size().
std::vector<double> convolve(std::span<const float> x,
                             std::span<const double> h) {
  const std::size_t size = next_smooth_size(x.size() + h.size());
  RealFft fft(size);
  std::vector<double> a(size, 0.0), b(size, 0.0);
  std::copy(x.begin(), x.end(), a.begin());
  std::copy(h.begin(), h.end(), b.begin());
  std::vector<std::complex<double>> fa(fft.bins()), fb(fft.bins());
  fft.forward(a, fa);
  fft.forward(b, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  fft.inverse(fa, a);
  a.resize(x.size());
  for (double& v : a) v /= static_cast<double>(size);
  return a;
}

template <typename F>
void parallel_for(std::size_t n, F&& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < n; ++k) {
    try {
      body(k);
    } catch (...) {
#pragma omp critical(footfall_simulator_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::size_t samples_for(double seconds) {
  return static_cast<std::size_t>(std::llround(seconds * kSampleRate));
}

}  // namespace

double FootstepModel::amplitude(Action a) const {
  switch (a) {
    case Action::kQuiet:
      return base_amplitude;
    case Action::kNormal:
      return base_amplitude * normal_ratio;
    case Action::kLoud:
      return base_amplitude * loud_ratio;
    case Action::kEmpty:
      break;
  }
  return 0.0;
}

Trajectory::Trajectory(std::vector<Vec2> waypoints, double speed)
    : waypoints_(std::move(waypoints)), speed_(speed) {
  if (waypoints_.empty()) {
    throw Error(Errc::kInvalidTrajectory, "trajectory needs a waypoint");
  }
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    cumulative_.push_back(cumulative_.back() +
                          (waypoints_[i] - waypoints_[i - 1]).norm());
  }
}

Vec2 Trajectory::at(double t) const {
  if (waypoints_.size() == 1 || t <= 0.0) return waypoints_.front();
  const double s = t * speed_;
  if (s >= cumulative_.back()) return waypoints_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const double seg = cumulative_[i + 1] - cumulative_[i];
  const double u = seg > 0.0 ? (s - cumulative_[i]) / seg : 0.0;
  return waypoints_[i] + (waypoints_[i + 1] - waypoints_[i]) * u;
}

double RobotMotion::max_speed() const {
  return translate_period > 0.0
             ? std::abs(translate_amplitude) * kTwoPi / translate_period
             : 0.0;
}

double RobotMotion::max_turn_rate() const {
  return rotate_period > 0.0
             ? std::abs(rotate_amplitude) * kTwoPi / rotate_period
             : 0.0;
}

Pose RobotTrack::at(double t) const {
  if (!moving) return start;
  Pose p = start;
  const Vec2 forward{std::cos(start.heading), std::sin(start.heading)};
  if (motion.translate_period > 0.0) {
    p.position = start.position +
                 forward * (motion.translate_amplitude *
                            std::sin(kTwoPi * t / motion.translate_period +
                                     motion.phase));
  }
  if (motion.rotate_period > 0.0) {
    p.heading = start.heading +
                motion.rotate_amplitude *
                    std::sin(kTwoPi * t / motion.rotate_period + motion.phase);
  }
  return p;
}

void check_scene(const SceneConfig& scene) {
  if (!(scene.duration_s > 0.0)) {
    throw Error(Errc::kInvalidTrajectory, "scene duration must be positive");
  }
  if (scene.robot.moving &&
      (scene.robot.motion.max_speed() > kMaxRobotSpeed + 1e-12 ||
       scene.robot.motion.max_turn_rate() > kMaxRobotTurnRate + 1e-12)) {
    throw Error(Errc::kInvalidTrajectory, "robot moves faster than allowed");
  }
  if (scene.action == Action::kEmpty) return;
  if (!(scene.walker.speed() > 0.0)) {
    throw Error(Errc::kInvalidTrajectory, "walker speed must be positive");
  }
  const double step = 0.05;
  for (double t = 0.0; t <= scene.duration_s + 1e-9; t += step) {
    const double r =
        (scene.walker.at(t) - scene.robot.at(t).position).norm();
    if (!(r > kMinWalkerDistance && r <= kMaxWalkerDistance)) {
      throw Error(Errc::kInvalidTrajectory,
                  "walker at " + std::to_string(r) + " m at t = " +
                      std::to_string(t) + " s");
    }
  }
}

SourceSignal synth_source(Action action, double duration_s, std::uint64_t seed,
                          const FootstepModel& model) {
  if (!(duration_s > 0.0)) {
    throw Error(Errc::kInvalidTrajectory, "duration must be positive");
  }
  SourceSignal out;
  const std::size_t n = samples_for(duration_s);
  out.samples.assign(n, 0.0f);
  if (action == Action::kEmpty) return out;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = model.amplitude(action);
  const double interval =
      model.interval_min_s +
      (model.interval_max_s - model.interval_min_s) * unit(rng);
  const double jitter = 0.25 * (model.interval_max_s - model.interval_min_s);
  double t = interval * unit(rng);
  const auto tail = samples_for(0.010);
  std::vector<double> burst;
  while (t < duration_s) {
    const double dur = model.burst_min_s +
                       (model.burst_max_s - model.burst_min_s) * unit(rng);
    const std::size_t len = samples_for(dur);
    const double tau = dur / 4.0;
    burst.assign(len + tail, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      burst[i] = gauss(rng) * std::exp(-static_cast<double>(i) / kSampleRate /
                                       tau);
    }
    Biquad hp1 = Biquad::highpass(model.band_low_hz, kSampleRate);
    Biquad hp2 = hp1;
    Biquad lp1 = Biquad::lowpass(model.band_high_hz, kSampleRate);
    Biquad lp2 = lp1;
    double peak = 0.0;
    for (double& v : burst) {
      v = lp2(lp1(hp2(hp1(v))));
      peak = std::max(peak, std::abs(v));
    }
    const std::size_t onset = samples_for(t);
    out.step_onsets.push_back(onset);
    for (std::size_t i = 0; i < burst.size() && onset + i < n; ++i) {
      out.samples[onset + i] += static_cast<float>(scale * burst[i] / peak);
    }
    t += std::clamp(interval + jitter * (2.0 * unit(rng) - 1.0),
                    model.interval_min_s, model.interval_max_s);
  }
  return out;
}

MultiChannelClip propagate(std::span<const float> source,
                           const Trajectory& walker, const RobotTrack& robot,
                           const ArrayGeometry& geometry,
                           const ReverbSpec& reverb, std::uint64_t seed) {
  validate(geometry);
  const std::size_t n = source.size();
  const int mics = geometry.n_mics();
  MultiChannelClip out(mics, n);
  const double fs = kSampleRate;

  parallel_for(static_cast<std::size_t>(mics), [&](std::size_t mu) {
    const int m = static_cast<int>(mu);
    auto ch = out.channel(m);
    for (std::size_t t = 0; t < n; ++t) {
      const double time = t / fs;
      const Pose pose = robot.at(time);
      const Vec2 mic =
          pose.position + geometry.positions[m].rotated(pose.heading);
      const Vec2 src = walker.at(time);
      const Vec2 d = src - mic;
      const double r = d.norm();
      const double pos = static_cast<double>(t) - r / kSpeedOfSound * fs;
      if (pos < 0.0) continue;
      const auto i0 = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(i0);
      const double s0 = source[i0];
      const double s1 = i0 + 1 < n ? source[i0 + 1] : 0.0;
      const double s = s0 + (s1 - s0) * frac;
      if (s == 0.0) continue;
      const Vec2 dir_robot = d.rotated(-pose.heading);
      const double g = geometry.gain(m, dir_robot);
      ch[t] = static_cast<float>(s * g / std::max(r, kNearFieldClamp));
    }
  });

  if (reverb.enabled && reverb.level > 0.0 && reverb.t60 > 0.0) {
    const std::size_t len = samples_for(1.5 * reverb.t60);
    for (int m = 0; m < mics; ++m) {
      std::mt19937_64 rng(mix_seed(seed, 0x7265 + m));
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<double> h(len);
      double energy = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        h[i] = gauss(rng) * std::exp(-6.907755 * (i / fs) / reverb.t60);
        energy += h[i] * h[i];
      }
      const double norm = reverb.level / std::sqrt(energy);
      // The tail starts after a short pre-delay so the direct path stays the
      // first arrival.
      const std::size_t pre = samples_for(0.003);
      std::vector<double> hd(pre + len, 0.0);
      for (std::size_t i = 0; i < len; ++i) hd[pre + i] = h[i] * norm;
      const std::vector<double> wet = convolve(source, hd);
      auto ch = out.channel(m);
      for (std::size_t t = 0; t < n; ++t) {
        ch[t] = static_cast<float>(ch[t] + 0.5 * wet[t]);
      }
    }
  }
  return out;
}

MultiChannelClip add_noise_beds(const MultiChannelClip& clean,
                                const SceneConfig& scene) {
  if (!scene.beds) return clean;
  MultiChannelClip out = clean;
  const std::size_t n = clean.n_samples();
  const int ch = clean.n_channels();
  const double fs = kSampleRate;
  const double nyquist = fs / 2.0;

  const RoomNoiseSpec& room = scene.room_noise;
  if (room.level > 0.0) {
    std::mt19937_64 rng(mix_seed(scene.seed, 0x726f6f6d));
    const std::vector<double> shared =
        colored_noise(n, room.tilt, 20.0, nyquist, rng);
    const double ws = std::sqrt(std::clamp(room.shared_fraction, 0.0, 1.0));
    const double wi = std::sqrt(1.0 - ws * ws);
    for (int c = 0; c < ch; ++c) {
      const std::vector<double> own =
          colored_noise(n, room.tilt, 20.0, nyquist, rng);
      auto x = out.channel(c);
      for (std::size_t t = 0; t < n; ++t) {
        x[t] = static_cast<float>(x[t] + room.level * (wi * own[t] + ws * shared[t]));
      }
    }
  }
  if (room.hum_level > 0.0 && !room.hum_hz.empty()) {
    std::mt19937_64 rng(mix_seed(scene.seed, 0x68756d));
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    for (double f0 : room.hum_hz) {
      for (int k = 1; k <= 3; ++k) {
        const double ph = phase(rng);
        const double amp = room.hum_level / k;
        for (int c = 0; c < ch; ++c) {
          auto x = out.channel(c);
          for (std::size_t t = 0; t < n; ++t) {
            x[t] = static_cast<float>(
                x[t] + amp * std::sin(kTwoPi * f0 * k * t / fs + ph));
          }
        }
      }
    }
  }

  if (scene.robot_condition == RobotCondition::kDynamic) {
    const RobotNoiseSpec& robot = scene.robot_noise;
    std::mt19937_64 rng(mix_seed(scene.seed, 0x726f626f74));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> bed(n, 0.0);
    if (robot.noise_level > 0.0) {
      const std::vector<double> motor =
          colored_noise(n, 0.5, 100.0, 1200.0, rng);
      for (std::size_t t = 0; t < n; ++t) bed[t] += robot.noise_level * motor[t];
    }
    if (robot.hum_level > 0.0) {
      const double wobble_rate = 0.3 + 0.4 * unit(rng);
      for (int k = 1; k <= 4; ++k) {
        const double ph = kTwoPi * unit(rng);
        const double amp = robot.hum_level / k;
        double phase = ph;
        for (std::size_t t = 0; t < n; ++t) {
          const double f = robot.hum_hz * k *
                           (1.0 + 0.02 * std::sin(kTwoPi * wobble_rate * t / fs));
          phase += kTwoPi * f / fs;
          bed[t] += amp * std::sin(phase);
        }
      }
    }
    if (robot.click_level > 0.0 && robot.click_rate > 0.0) {
      std::exponential_distribution<double> gap(robot.click_rate);
      const std::size_t click_len = samples_for(0.004);
      double t = gap(rng);
      while (t < n / fs) {
        const std::size_t onset = samples_for(t);
        const double amp = robot.click_level * (0.5 + unit(rng));
        for (std::size_t i = 0; i < click_len && onset + i < n; ++i) {
          bed[onset + i] +=
              amp * gauss(rng) * std::exp(-static_cast<double>(i) / (0.001 * fs));
        }
        t += gap(rng);
      }
    }
    for (int c = 0; c < ch; ++c) {
      const double g =
          1.0 + robot.gain_jitter * (2.0 * unit(rng) - 1.0);
      auto x = out.channel(c);
      for (std::size_t t = 0; t < n; ++t) {
        x[t] = static_cast<float>(x[t] + g * bed[t]);
      }
    }
  }
  return out;
}

MultiChannelClip render_scene(const SceneConfig& scene,
                              const ArrayGeometry& geometry) {
  check_scene(scene);
  const SourceSignal src =
      synth_source(scene.action, scene.duration_s,
                   mix_seed(scene.seed, 0x73726320), scene.footsteps);
  const MultiChannelClip clean =
      propagate(src.samples, scene.walker, scene.robot, geometry, scene.reverb,
                mix_seed(scene.seed, 0x72766220));
  return add_noise_beds(clean, scene);
}

std::vector<LabeledSample> scene_labels(const SceneConfig& scene,
                                        std::size_t n_samples) {
  std::vector<LabeledSample> out;
  for (const ClipWindow& w : sample_clips(n_samples)) {
    LabeledSample s;
    s.clip_offset_s = w.offset_s;
    s.room_id = scene.room_id;
    s.action = scene.action;
    s.robot_condition = scene.robot_condition;
    if (scene.action != Action::kEmpty) {
      const Pose pose = scene.robot.at(w.offset_s);
      const Vec2 p = scene.walker.at(w.offset_s);
      s.presence = true;
      s.azimuth_x = robot_azimuth_to_pixel(world_to_robot_azimuth(p, pose));
      s.radial_distance = (p - pose.position).norm();
    }
    out.push_back(std::move(s));
  }
  return out;
}

DatasetConfig DatasetConfig::from_config(const KeyValueConfig& c) {
  DatasetConfig d;
  d.rooms = static_cast<int>(c.get_int("dataset.rooms", d.rooms));
  if (c.has("dataset.conditions")) {
    d.conditions.clear();
    std::istringstream is(c.get_string("dataset.conditions", ""));
    for (std::string tok; is >> tok;) d.conditions.push_back(parse_condition(tok));
  }
  if (c.has("dataset.actions")) {
    d.actions.clear();
    std::istringstream is(c.get_string("dataset.actions", ""));
    for (std::string tok; is >> tok;) d.actions.push_back(parse_action(tok));
  }
  d.recordings_per_action = static_cast<int>(
      c.get_int("dataset.recordings_per_action", d.recordings_per_action));
  d.empty_recordings =
      static_cast<int>(c.get_int("dataset.empty_recordings", d.empty_recordings));
  d.action_seconds = c.get_double("dataset.action_seconds", d.action_seconds);
  d.empty_profile_seconds =
      c.get_double("dataset.empty_profile_seconds", d.empty_profile_seconds);
  d.augmentation_rooms = static_cast<int>(
      c.get_int("dataset.augmentation_rooms", d.augmentation_rooms));
  d.augmentation_seconds =
      c.get_double("dataset.augmentation_seconds", d.augmentation_seconds);
  d.seed = static_cast<std::uint64_t>(c.get_int("dataset.seed", 7));
  d.beds = c.get_bool("dataset.beds", d.beds);

  FootstepModel& f = d.footsteps;
  f.base_amplitude = c.get_double("footstep.base_amplitude", f.base_amplitude);
  f.normal_ratio = c.get_double("footstep.normal_ratio", f.normal_ratio);
  f.loud_ratio = c.get_double("footstep.loud_ratio", f.loud_ratio);
  f.burst_min_s = c.get_double("footstep.burst_min_s", f.burst_min_s);
  f.burst_max_s = c.get_double("footstep.burst_max_s", f.burst_max_s);
  f.interval_min_s = c.get_double("footstep.interval_min_s", f.interval_min_s);
  f.interval_max_s = c.get_double("footstep.interval_max_s", f.interval_max_s);
  f.band_low_hz = c.get_double("footstep.band_low_hz", f.band_low_hz);
  f.band_high_hz = c.get_double("footstep.band_high_hz", f.band_high_hz);

  RoomSampler& r = d.room;
  r.width_min = c.get_double("room.width_min", r.width_min);
  r.width_max = c.get_double("room.width_max", r.width_max);
  r.depth_min = c.get_double("room.depth_min", r.depth_min);
  r.depth_max = c.get_double("room.depth_max", r.depth_max);
  r.level_min = c.get_double("room.level_min", r.level_min);
  r.level_max = c.get_double("room.level_max", r.level_max);
  r.tilt_min = c.get_double("room.tilt_min", r.tilt_min);
  r.tilt_max = c.get_double("room.tilt_max", r.tilt_max);
  r.hum_probability = c.get_double("room.hum_probability", r.hum_probability);
  r.hum_level = c.get_double("room.hum_level", r.hum_level);
  r.shared_fraction = c.get_double("room.shared_fraction", r.shared_fraction);

  WalkerSampler& w = d.walker;
  w.speed_min = c.get_double("walker.speed_min", w.speed_min);
  w.speed_max = c.get_double("walker.speed_max", w.speed_max);
  w.wall_margin = c.get_double("walker.wall_margin", w.wall_margin);
  w.robot_clearance = c.get_double("walker.robot_clearance", w.robot_clearance);

  RobotNoiseSpec& n = d.robot_noise;
  n.hum_hz = c.get_double("robot.hum_hz", n.hum_hz);
  n.hum_level = c.get_double("robot.hum_level", n.hum_level);
  n.noise_level = c.get_double("robot.noise_level", n.noise_level);
  n.click_rate = c.get_double("robot.click_rate", n.click_rate);
  n.click_level = c.get_double("robot.click_level", n.click_level);
  n.gain_jitter = c.get_double("robot.gain_jitter", n.gain_jitter);
  RobotMotion& m = d.motion;
  m.translate_amplitude =
      c.get_double("robot.translate_amplitude", m.translate_amplitude);
  m.translate_period = c.get_double("robot.translate_period", m.translate_period);
  m.rotate_amplitude = c.get_double("robot.rotate_amplitude", m.rotate_amplitude);
  m.rotate_period = c.get_double("robot.rotate_period", m.rotate_period);

  d.reverb.enabled = c.get_bool("reverb.enabled", d.reverb.enabled);
  d.reverb.t60 = c.get_double("reverb.t60", d.reverb.t60);
  d.reverb.level = c.get_double("reverb.level", d.reverb.level);

  auto bad = [](const std::string& what) {
    throw Error(Errc::kInvalidConfig, what);
  };
  if (d.rooms < 1) bad("dataset.rooms must be >= 1");
  if (d.conditions.empty()) bad("dataset.conditions is empty");
  if (d.action_seconds < 1.0) bad("dataset.action_seconds must be >= 1");
  if (d.empty_profile_seconds < kMinEmptySeconds) {
    bad("dataset.empty_profile_seconds must be >= 10");
  }
  if (d.augmentation_rooms > 0 && d.augmentation_seconds < 1.0) {
    bad("dataset.augmentation_seconds must be >= 1");
  }
  if (m.max_speed() > kMaxRobotSpeed + 1e-12) bad("robot translates too fast");
  if (m.max_turn_rate() > kMaxRobotTurnRate + 1e-12) bad("robot turns too fast");
  if (!(w.speed_min > 0.0 && w.speed_max >= w.speed_min)) bad("walker speeds");
  if (!(r.width_min > 0.0 && r.width_max >= r.width_min && r.depth_min > 0.0 &&
        r.depth_max >= r.depth_min)) {
    bad("room size ranges");
  }
  return d;
}

namespace {

struct RoomLayout {
  double width = 5.0, depth = 4.0;
  Pose robot;
  RoomNoiseSpec noise;
};

RoomLayout sample_room(const DatasetConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double a, double b) { return a + (b - a) * unit(rng); };
  RoomLayout room;
  room.width = between(cfg.room.width_min, cfg.room.width_max);
  room.depth = between(cfg.room.depth_min, cfg.room.depth_max);
  room.robot.position = {between(0.4, 0.6) * room.width,
                         between(0.4, 0.6) * room.depth};
  room.robot.heading = between(0.0, kTwoPi);
  room.noise.level = between(cfg.room.level_min, cfg.room.level_max);
  room.noise.tilt = between(cfg.room.tilt_min, cfg.room.tilt_max);
  room.noise.shared_fraction = cfg.room.shared_fraction;
  if (unit(rng) < cfg.room.hum_probability) {
    room.noise.hum_hz = {unit(rng) < 0.5 ? 50.0 : 60.0};
    room.noise.hum_level = cfg.room.hum_level * between(0.5, 1.5);
  }
  return room;
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  const double u = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + ab * u)).norm();
}

Trajectory sample_walker(const DatasetConfig& cfg, const RoomLayout& room,
                         double duration, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double m = cfg.walker.wall_margin;
  const double speed =
      cfg.walker.speed_min + (cfg.walker.speed_max - cfg.walker.speed_min) * unit(rng);
  const Vec2 robot = room.robot.position;
  auto draw = [&] {
    for (int tries = 0; tries < 10000; ++tries) {
      const Vec2 p{m + (room.width - 2 * m) * unit(rng),
                   m + (room.depth - 2 * m) * unit(rng)};
      const double r = (p - robot).norm();
      if (r > cfg.walker.robot_clearance && r < kMaxWalkerDistance - 0.5) return p;
    }
    throw Error(Errc::kInvalidTrajectory, "room too small for the walker");
  };
  std::vector<Vec2> pts{draw()};
  double length = 0.0;
  const double needed = speed * duration + 1.0;
  int guard = 0;
  while (length < needed) {
    if (++guard > 100000) {
      throw Error(Errc::kInvalidTrajectory, "cannot route the walker");
    }
    const Vec2 next = draw();
    if (segment_distance(robot, pts.back(), next) <= cfg.walker.robot_clearance) {
      continue;
    }
    length += (next - pts.back()).norm();
    pts.push_back(next);
  }
  return Trajectory(std::move(pts), speed);
}

}  // namespace

std::vector<PlannedRecording> plan_dataset(const DatasetConfig& cfg) {
  std::vector<PlannedRecording> plan;
  auto base_scene = [&](const std::string& room_id, const RoomLayout& room) {
    SceneConfig s;
    s.room_id = room_id;
    s.room_noise = room.noise;
    s.robot_noise = cfg.robot_noise;
    s.robot.start = room.robot;
    s.footsteps = cfg.footsteps;
    s.reverb = cfg.reverb;
    s.beds = cfg.beds;
    return s;
  };

  for (int r = 0; r < cfg.rooms; ++r) {
    const std::string room_id = "room" + std::to_string(r + 1);
    const std::uint64_t room_seed = mix_seed(cfg.seed, 100 + r);
    const RoomLayout room = sample_room(cfg, room_seed);
    for (RobotCondition cond : cfg.conditions) {
      const auto ci = static_cast<std::uint64_t>(cond);
      std::mt19937_64 crng(mix_seed(room_seed, 10 + ci));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      SceneConfig scene = base_scene(room_id, room);
      scene.robot_condition = cond;
      scene.robot.moving = cond == RobotCondition::kDynamic;
      scene.robot.motion = cfg.motion;
      scene.robot.motion.phase = kTwoPi * unit(crng);
      scene.robot_noise.hum_hz = cfg.robot_noise.hum_hz * (0.8 + 0.4 * unit(crng));
      const std::string dir = room_id + "/" + std::string(to_string(cond)) + "/";

      PlannedRecording prof;
      prof.kind = PlannedRecording::Kind::kEmptyProfile;
      prof.scene = scene;
      prof.scene.action = Action::kEmpty;
      prof.scene.duration_s = cfg.empty_profile_seconds;
      prof.scene.seed = mix_seed(room_seed, 1000 + ci);
      prof.path = dir + "empty_profile.wav";
      plan.push_back(prof);

      std::uint64_t k_seed = 0;
      for (Action a : cfg.actions) {
        const int count =
            a == Action::kEmpty ? cfg.empty_recordings : cfg.recordings_per_action;
        for (int k = 0; k < count; ++k) {
          PlannedRecording rec;
          rec.kind = PlannedRecording::Kind::kSample;
          rec.scene = scene;
          rec.scene.action = a;
          rec.scene.duration_s = cfg.action_seconds;
          rec.scene.seed = mix_seed(room_seed, 2000 + 100 * ci + (++k_seed));
          std::mt19937_64 wrng(mix_seed(rec.scene.seed, 0x77616c6b));
          if (a != Action::kEmpty) {
            for (int tries = 0;; ++tries) {
              rec.scene.walker = sample_walker(cfg, room, cfg.action_seconds, wrng);
              try {
                check_scene(rec.scene);
                break;
              } catch (const Error&) {
                if (tries > 100) throw;
              }
            }
          }
          rec.path = dir + std::string(to_string(a)) + "_" +
                     std::to_string(k + 1) + ".wav";
          plan.push_back(rec);
        }
      }
      if (std::find(cfg.actions.begin(), cfg.actions.end(), Action::kEmpty) ==
          cfg.actions.end()) {
        for (int k = 0; k < cfg.empty_recordings; ++k) {
          PlannedRecording rec;
          rec.kind = PlannedRecording::Kind::kSample;
          rec.scene = scene;
          rec.scene.action = Action::kEmpty;
          rec.scene.duration_s = cfg.action_seconds;
          rec.scene.seed = mix_seed(room_seed, 2000 + 100 * ci + (++k_seed));
          rec.path = dir + "empty_" + std::to_string(k + 1) + ".wav";
          plan.push_back(rec);
        }
      }
    }
  }

  for (int a = 0; a < cfg.augmentation_rooms; ++a) {
    const std::string room_id = "aug" + std::to_string(a + 1);
    const std::uint64_t room_seed = mix_seed(cfg.seed, 900 + a);
    const RoomLayout room = sample_room(cfg, room_seed);
    PlannedRecording rec;
    rec.kind = PlannedRecording::Kind::kAugmentation;
    rec.scene = base_scene(room_id, room);
    rec.scene.action = Action::kEmpty;
    rec.scene.duration_s = cfg.augmentation_seconds;
    rec.scene.seed = mix_seed(room_seed, 1);
    rec.path = "augment/" + room_id + ".wav";
    plan.push_back(rec);
  }
  return plan;
}

Manifest generate_dataset(std::span<const PlannedRecording> plan,
                          const ArrayGeometry& geometry,
                          const std::filesystem::path& out_dir) {
  validate(geometry);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::kIoFailure, "cannot create " + out_dir.string());
  for (const PlannedRecording& p : plan) {
    std::filesystem::create_directories((out_dir / p.path).parent_path(), ec);
    if (ec) throw Error(Errc::kIoFailure, "cannot create dirs for " + p.path);
  }
  std::vector<std::size_t> lengths(plan.size());
  parallel_for(plan.size(), [&](std::size_t k) {
    const MultiChannelClip audio = render_scene(plan[k].scene, geometry);
    lengths[k] = audio.n_samples();
    write_recording(out_dir / plan[k].path, audio);
  });

  Manifest m;
  m.base_dir = out_dir;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const PlannedRecording& p = plan[k];
    switch (p.kind) {
      case PlannedRecording::Kind::kEmptyProfile:
        m.empty_profiles.push_back(
            {p.scene.room_id, p.scene.robot_condition, p.path});
        break;
      case PlannedRecording::Kind::kAugmentation:
        m.augmentation.push_back({p.scene.room_id, p.path});
        break;
      case PlannedRecording::Kind::kSample:
        for (LabeledSample s : scene_labels(p.scene, lengths[k])) {
          s.clip_path = p.path;
          m.samples.push_back(std::move(s));
        }
        break;
    }
  }
  validate(m);
  save_manifest(out_dir / kManifestFileName, m);
  return m;
}

}  // namespace footfall
