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

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "footfall/audio.hpp"
#include "footfall/detector.hpp"
#include "footfall/spectro.hpp"

namespace footfall {

struct TrackerConfig {
  double presence_threshold = 0.5;
  double fov_deg = 58.0;
  double hysteresis_deg = 58.0 / 4.0;
  double settle_s = 0.1;
  double decision_hz = 4.0;
  double window_s = 1.0;
  // Wall-clock pacing of the audio accumulator; 1 is real time, 0 pushes as
  // fast as the window has room.
  double realtime_factor = 1.0;
  std::size_t chunk_frames = 441;
  double ring_seconds = 8.0;
};

enum class TrackerMode { kListening, kPanning };

struct TrackerState {
  TrackerMode mode = TrackerMode::kListening;
  double current_pan = 0.0;
  double pan_inhibit_until = 0.0;
  double fov = 58.0;
};

// Chunked multi-channel audio. read() returns an empty clip at end of stream
// and throws kSourceUnderrun when data cannot be delivered.
class AudioSource {
 public:
  virtual ~AudioSource() = default;
  virtual int channels() const = 0;
  virtual MultiChannelClip read(std::size_t frames) = 0;
};

class ClipSource : public AudioSource {
 public:
  explicit ClipSource(MultiChannelClip clip) : clip_(std::move(clip)) {}
  int channels() const override { return clip_.n_channels(); }
  MultiChannelClip read(std::size_t frames) override;

 private:
  MultiChannelClip clip_;
  std::size_t pos_ = 0;
};

// Interleaved float32 frames from a byte stream (e.g. stdin).
class RawStreamSource : public AudioSource {
 public:
  RawStreamSource(std::istream& in, int channels)
      : in_(in), channels_(channels) {}
  int channels() const override { return channels_; }
  MultiChannelClip read(std::size_t frames) override;

 private:
  std::istream& in_;
  int channels_;
};

// Absolute pan commands in robot-frame degrees; completion is polled at
// stream time.
class PanSink {
 public:
  virtual ~PanSink() = default;
  virtual void command(double target_deg, double now_s) = 0;
  // Completion time once the last command has finished by `now_s`.
  virtual std::optional<double> poll_complete(double now_s) = 0;
  virtual double current_pan(double now_s) const = 0;
};

// Constant angular speed along the shorter arc.
class SimulatedPanSink : public PanSink {
 public:
  explicit SimulatedPanSink(double speed_deg_s = 60.0, double start_deg = 0.0)
      : speed_(speed_deg_s), from_(start_deg), to_(start_deg) {}
  void command(double target_deg, double now_s) override;
  std::optional<double> poll_complete(double now_s) override;
  double current_pan(double now_s) const override;
  std::size_t commands() const { return commands_; }

 private:
  double speed_;
  double from_, to_;
  double start_ = 0.0, end_ = 0.0;
  bool busy_ = false;
  std::size_t commands_ = 0;
};

// Fixed-capacity ring of the most recent frames. push() never waits;
// snapshot() copies a consistent window under the lock.
class RollingWindow {
 public:
  RollingWindow(int channels, std::size_t capacity);
  void push(const MultiChannelClip& chunk);
  void close();
  std::size_t total() const;
  bool closed() const;
  // Blocks until `frames` have been pushed or the stream is closed; returns
  // the total available.
  std::size_t wait_for(std::size_t frames) const;
  // The `length` frames ending at absolute frame `end`; nullopt when they
  // have been overwritten or not yet pushed.
  std::optional<MultiChannelClip> snapshot(std::size_t end,
                                           std::size_t length) const;

 private:
  int channels_;
  std::size_t capacity_;
  std::vector<float> ring_;  // channel-major, capacity_ per channel
  std::size_t total_ = 0;
  bool closed_ = false;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
};

enum class TrackerAction { kNone, kPan, kPanComplete };
std::string_view to_string(TrackerAction a);

struct TrackerEvent {
  double timestamp = 0.0;  // stream seconds
  std::optional<double> presence_prob;
  std::optional<double> angle_deg;
  TrackerAction action = TrackerAction::kNone;
  double pan_deg = 0.0;  // pan target after this event
  double compute_ms = 0.0;
};

struct TrackerStats {
  std::size_t decisions = 0;
  std::size_t pans = 0;
  double max_compute_ms = 0.0;
  double mean_compute_ms = 0.0;
  std::size_t late_windows = 0;  // windows overwritten before use
};

struct TrackResult {
  std::vector<TrackerEvent> events;
  TrackerStats stats;
  TrackerState final_state;
};

// Runs the accumulator on its own thread and the 4 Hz decision loop on the
// caller's. Throws kSourceUnderrun when the stream is shorter than one
// window and kSinkFailure when the sink rejects a command.
TrackResult stream_track(AudioSource& source, const DetectorModel& model,
                         const EmptyRoomProfile& profile, PanSink& sink,
                         const TrackerConfig& config = {});

std::string event_to_json(const TrackerEvent& e);
void write_event_log(std::ostream& out, const std::vector<TrackerEvent>& events);

// Share of pan completions after which the true angle, sampled at
// completion + settle, lies within fov / 2 of the pan target.
struct TrackingScore {
  std::size_t checkpoints = 0;
  std::size_t hits = 0;
  double rate() const {
    return checkpoints == 0 ? 0.0 : static_cast<double>(hits) / checkpoints;
  }
};
TrackingScore score_tracking(const std::vector<TrackerEvent>& events,
                             const std::function<double(double)>& truth_deg,
                             const TrackerConfig& config = {});

}  // namespace footfall
