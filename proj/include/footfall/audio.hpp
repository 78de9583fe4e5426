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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace footfall {

inline constexpr int kSampleRate = 44100;
inline constexpr double kTargetRms = 0.02;
inline constexpr double kSilenceFloor = 1e-8;

// Aligned audio across microphones. Samples are stored planar: all of
// channel 0, then all of channel 1, and so on.
class MultiChannelClip {
 public:
  MultiChannelClip() = default;
  MultiChannelClip(int n_channels, std::size_t n_samples,
                   int sample_rate = kSampleRate);

  int n_channels() const { return n_channels_; }
  std::size_t n_samples() const { return n_samples_; }
  int sample_rate() const { return sample_rate_; }
  double duration() const {
    return static_cast<double>(n_samples_) / sample_rate_;
  }
  bool empty() const { return n_samples_ == 0 || n_channels_ == 0; }

  std::span<float> channel(int c) {
    return {data_.data() + static_cast<std::size_t>(c) * n_samples_,
            n_samples_};
  }
  std::span<const float> channel(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * n_samples_,
            n_samples_};
  }
  std::span<float> samples() { return data_; }
  std::span<const float> samples() const { return data_; }

  // Copy of [offset, offset + length) on every channel.
  MultiChannelClip slice(std::size_t offset, std::size_t length) const;

  friend bool operator==(const MultiChannelClip&,
                         const MultiChannelClip&) = default;

 private:
  int n_channels_ = 0;
  std::size_t n_samples_ = 0;
  int sample_rate_ = kSampleRate;
  std::vector<float> data_;
};

struct ReadOptions {
  // Required channel count; unset accepts whatever the file declares.
  std::optional<int> expected_channels;
  // Accept a sample rate other than 44.1 kHz.
  bool allow_any_rate = false;
};

// RIFF/WAVE reader. Accepts 16/24/32-bit PCM and 32/64-bit IEEE float,
// including WAVE_FORMAT_EXTENSIBLE headers.
MultiChannelClip read_recording(const std::filesystem::path& path,
                                const ReadOptions& options = {});

// Canonical format: IEEE float32, interleaved, rate taken from the clip.
void write_recording(const std::filesystem::path& path,
                     const MultiChannelClip& clip);

struct RmsReport {
  std::vector<double> per_channel;
  double pooled = 0.0;
};

RmsReport rms(const MultiChannelClip& clip);

// Scales every channel by one shared factor so the pooled RMS equals
// `target`. Throws kSilentClip when the pooled RMS is below kSilenceFloor.
MultiChannelClip normalize_rms(const MultiChannelClip& clip,
                               double target = kTargetRms);

struct ClipWindow {
  std::size_t offset = 0;  // samples
  double offset_s = 0.0;
};

// Offsets of overlapping clips of `clip_duration` seconds taken at `rate` Hz.
std::vector<ClipWindow> sample_clips(std::size_t n_samples,
                                     int sample_rate = kSampleRate,
                                     double clip_duration = 1.0,
                                     double rate = 4.0);

}  // namespace footfall
