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

#include <array>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "footfall/audio.hpp"
#include "footfall/manifest.hpp"

namespace footfall {

inline constexpr int kWindowSize = 512;
inline constexpr int kHopLength = 128;
inline constexpr int kFreqBins = kWindowSize / 2 + 1;             // 257
inline constexpr int kFrames = 1 + kSampleRate / kHopLength;      // 345
inline constexpr int kPlanes = 2;                                 // re, im

// Sign-preserving log compression sign(v) * log(1 + |v| / eps), followed by
// the fixed affine map onto the nominal [0, 1] range used by subtraction.
inline constexpr double kLogEpsilon = 1e-3;
inline constexpr double kLogFloor = -7.0;
inline constexpr double kLogCeil = 7.0;

// Complex STFT of one channel, bin-major: at(bin, frame).
class ComplexStft {
 public:
  ComplexStft() : data_(static_cast<std::size_t>(kFreqBins) * kFrames) {}
  std::complex<double>& at(int bin, int frame) {
    return data_[static_cast<std::size_t>(bin) * kFrames + frame];
  }
  const std::complex<double>& at(int bin, int frame) const {
    return data_[static_cast<std::size_t>(bin) * kFrames + frame];
  }
  std::span<const std::complex<double>> values() const { return data_; }
  std::span<std::complex<double>> values() { return data_; }

 private:
  std::vector<std::complex<double>> data_;
};

// Log-scaled two-plane spectrogram of shape [2, 257, 345]; plane 0 holds the
// real part and plane 1 the imaginary part.
class Spectrogram {
 public:
  static constexpr std::size_t kPlaneSize =
      static_cast<std::size_t>(kFreqBins) * kFrames;
  static constexpr std::size_t kSize = kPlanes * kPlaneSize;
  static constexpr std::array<int, 3> kShape = {kPlanes, kFreqBins, kFrames};

  Spectrogram() : data_(kSize, 0.0f) {}

  float& at(int plane, int bin, int frame) {
    return data_[plane * kPlaneSize + static_cast<std::size_t>(bin) * kFrames +
                 frame];
  }
  float at(int plane, int bin, int frame) const {
    return data_[plane * kPlaneSize + static_cast<std::size_t>(bin) * kFrames +
                 frame];
  }
  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }

  friend bool operator==(const Spectrogram&, const Spectrogram&) = default;

 private:
  std::vector<float> data_;
};

// Periodic Hann window of kWindowSize taps.
const std::vector<double>& hann_window();

// One-sided STFT of a 1 s channel with centered reflect padding. Throws
// kWrongLength unless the input has exactly kSampleRate samples.
ComplexStft stft(std::span<const float> waveform);

// Compression of one real value before the affine map; odd and monotone.
double compress(double v);
// compress() followed by the affine map onto [0, 1].
double log_scale_value(double v);
Spectrogram log_scale(const ComplexStft& coefficients);

// stft + log_scale for one channel.
Spectrogram spectrogram(std::span<const float> waveform);

struct EmptyRoomProfile {
  std::string room_id;
  RobotCondition robot_condition = RobotCondition::kStatic;
  std::vector<Spectrogram> channels;
};

inline constexpr double kMinEmptySeconds = 10.0;

// Average spectrogram of the non-overlapping 1 s clips of `audio`, each clip
// RMS-normalized first. Needs at least kMinEmptySeconds of audio.
EmptyRoomProfile empty_profile(const MultiChannelClip& audio,
                               std::string room_id = {},
                               RobotCondition condition =
                                   RobotCondition::kStatic);

// clamp(in - w * empty, 0, 1) element-wise.
Spectrogram subtract_background(const Spectrogram& in,
                                const Spectrogram& empty, double w_backsub);

// Flat binary dump: magic, JSON metadata, shape, then float32 values.
void save_profile(const std::filesystem::path& path,
                  const EmptyRoomProfile& profile);
EmptyRoomProfile load_profile(const std::filesystem::path& path);

}  // namespace footfall
