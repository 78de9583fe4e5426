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

#include "footfall/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <istream>
#include <ostream>
#include <thread>
#include <json.hpp>

#include "footfall/error.hpp"
#include "footfall/geometry.hpp"
#include "footfall/training.hpp"

namespace footfall {

MultiChannelClip ClipSource::read(std::size_t frames) {
  const std::size_t n = std::min(frames, clip_.n_samples() - pos_);
  if (n == 0) return {};
  MultiChannelClip out = clip_.slice(pos_, n);
  pos_ += n;
  return out;
}

MultiChannelClip RawStreamSource::read(std::size_t frames) {
  std::vector<float> buf(frames * channels_);
  in_.read(reinterpret_cast<char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (in_.bad()) throw Error(Errc::kSourceUnderrun, "audio stream failed");
  const auto got = static_cast<std::size_t>(in_.gcount()) /
                   (sizeof(float) * channels_);
  if (got == 0) return {};
  MultiChannelClip out(channels_, got);
  for (int c = 0; c < channels_; ++c) {
    auto ch = out.channel(c);
    for (std::size_t t = 0; t < got; ++t) ch[t] = buf[t * channels_ + c];
  }
  return out;
}

void SimulatedPanSink::command(double target_deg, double now_s) {
  if (busy_ && now_s < end_) {
    throw Error(Errc::kSinkFailure, "pan command while a pan is running");
  }
  from_ = current_pan(now_s);
  to_ = wrap_degrees(target_deg);
  double delta = to_ - from_;
  delta -= 360.0 * std::round(delta / 360.0);
  start_ = now_s;
  end_ = now_s + std::abs(delta) / speed_;
  busy_ = true;
  ++commands_;
}

std::optional<double> SimulatedPanSink::poll_complete(double now_s) {
  if (commands_ == 0 || now_s < end_) return std::nullopt;
  busy_ = false;
  return end_;
}

double SimulatedPanSink::current_pan(double now_s) const {
  if (commands_ == 0 || now_s >= end_) return to_;
  if (now_s <= start_) return from_;
  double delta = to_ - from_;
  delta -= 360.0 * std::round(delta / 360.0);
  return wrap_degrees(from_ + delta * (now_s - start_) / (end_ - start_));
}

RollingWindow::RollingWindow(int channels, std::size_t capacity)
    : channels_(channels),
      capacity_(capacity),
      ring_(static_cast<std::size_t>(channels) * capacity, 0.0f) {}

void RollingWindow::push(const MultiChannelClip& chunk) {
  if (chunk.n_channels() != channels_) {
    throw Error(Errc::kChannelCountMismatch, "chunk channel count");
  }
  {
    std::lock_guard lock(mu_);
    const std::size_t n = chunk.n_samples();
    for (int c = 0; c < channels_; ++c) {
      auto src = chunk.channel(c);
      float* dst = ring_.data() + static_cast<std::size_t>(c) * capacity_;
      for (std::size_t t = 0; t < n; ++t) {
        dst[(total_ + t) % capacity_] = src[t];
      }
    }
    total_ += n;
  }
  cv_.notify_all();
}

void RollingWindow::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

std::size_t RollingWindow::total() const {
  std::lock_guard lock(mu_);
  return total_;
}

bool RollingWindow::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::size_t RollingWindow::wait_for(std::size_t frames) const {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return total_ >= frames || closed_; });
  return total_;
}

std::optional<MultiChannelClip> RollingWindow::snapshot(
    std::size_t end, std::size_t length) const {
  std::lock_guard lock(mu_);
  if (end > total_ || length > end || length > capacity_ ||
      end - length + capacity_ < total_) {
    return std::nullopt;
  }
  MultiChannelClip out(channels_, length);
  const std::size_t begin = end - length;
  for (int c = 0; c < channels_; ++c) {
    const float* src = ring_.data() + static_cast<std::size_t>(c) * capacity_;
    auto dst = out.channel(c);
    for (std::size_t t = 0; t < length; ++t) {
      dst[t] = src[(begin + t) % capacity_];
    }
  }
  return out;
}

std::string_view to_string(TrackerAction a) {
  switch (a) {
    case TrackerAction::kNone:
      return "none";
    case TrackerAction::kPan:
      return "pan";
    case TrackerAction::kPanComplete:
      return "pan_complete";
  }
  return "none";
}

TrackResult stream_track(AudioSource& source, const DetectorModel& model,
                         const EmptyRoomProfile& profile, PanSink& sink,
                         const TrackerConfig& config) {
  const double fs = kSampleRate;
  const auto window_frames =
      static_cast<std::size_t>(std::llround(config.window_s * fs));
  const auto step_frames =
      static_cast<std::size_t>(std::llround(fs / config.decision_hz));
  const auto capacity = std::max(
      window_frames + step_frames,
      static_cast<std::size_t>(std::llround(config.ring_seconds * fs)));
  RollingWindow window(source.channels(), capacity);

  std::exception_ptr producer_failure;
  auto produce = [&] {
    try {
      const auto t0 = std::chrono::steady_clock::now();
      std::size_t pushed = 0;
      for (;;) {
        MultiChannelClip chunk = source.read(config.chunk_frames);
        if (chunk.empty()) break;
        pushed += chunk.n_samples();
        if (config.realtime_factor > 0.0) {
          std::this_thread::sleep_until(
              t0 + std::chrono::duration<double>(pushed / fs /
                                                 config.realtime_factor));
        }
        window.push(chunk);
      }
    } catch (...) {
      producer_failure = std::current_exception();
    }
    window.close();
  };

  // Offline mode fills the window on demand from the caller's thread.
  const bool offline = config.realtime_factor <= 0.0;
  std::thread producer;
  if (!offline) producer = std::thread(produce);
  auto pull_until = [&](std::size_t frames) -> std::size_t {
    if (!offline) return window.wait_for(frames);
    while (window.total() < frames && !window.closed()) {
      MultiChannelClip chunk = source.read(config.chunk_frames);
      if (chunk.empty()) {
        window.close();
      } else {
        window.push(chunk);
      }
    }
    return window.total();
  };

  TrackResult result;
  TrackerState& state = result.final_state;
  state.fov = config.fov_deg;
  state.current_pan = sink.current_pan(0.0);
  double compute_total = 0.0;

  try {
    for (std::size_t k = 0;; ++k) {
      const std::size_t end = window_frames + k * step_frames;
      if (pull_until(end) < end) {
        if (k == 0) {
          throw Error(Errc::kSourceUnderrun,
                      "stream shorter than one analysis window");
        }
        break;
      }
      const double now = static_cast<double>(end) / fs;
      if (state.mode == TrackerMode::kPanning) {
        const std::optional<double> done = sink.poll_complete(now);
        if (!done) continue;
        TrackerEvent e;
        e.timestamp = *done;
        e.action = TrackerAction::kPanComplete;
        e.pan_deg = state.current_pan;
        result.events.push_back(e);
        state.mode = TrackerMode::kListening;
        state.pan_inhibit_until = *done + config.settle_s;
      }
      if (now < state.pan_inhibit_until) continue;

      std::optional<MultiChannelClip> clip =
          window.snapshot(end, window_frames);
      if (!clip) {
        ++result.stats.late_windows;
        const std::size_t latest = window.total();
        clip = window.snapshot(latest, window_frames);
        if (!clip) continue;
      }
      TrackerEvent e;
      e.timestamp = now;
      e.pan_deg = state.current_pan;
      const auto c0 = std::chrono::steady_clock::now();
      try {
        const Prediction p = predict(model, *clip, profile);
        e.presence_prob = p.raw.presence_prob;
        e.angle_deg = p.angle_deg;
      } catch (const Error& err) {
        if (err.code() != Errc::kSilentClip) throw;
      }
      e.compute_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - c0)
                         .count();
      ++result.stats.decisions;
      compute_total += e.compute_ms;
      result.stats.max_compute_ms =
          std::max(result.stats.max_compute_ms, e.compute_ms);

      if (e.presence_prob && *e.presence_prob > config.presence_threshold &&
          circular_error(*e.angle_deg, state.current_pan) >
              config.hysteresis_deg) {
        try {
          sink.command(*e.angle_deg, now);
        } catch (const Error& err) {
          if (err.code() == Errc::kSinkFailure) throw;
          throw Error(Errc::kSinkFailure, err.what());
        } catch (const std::exception& err) {
          throw Error(Errc::kSinkFailure, err.what());
        }
        state.mode = TrackerMode::kPanning;
        state.current_pan = wrap_degrees(*e.angle_deg);
        e.action = TrackerAction::kPan;
        e.pan_deg = state.current_pan;
        ++result.stats.pans;
      }
      result.events.push_back(e);
    }
  } catch (...) {
    if (producer.joinable()) {
      window.close();
      producer.join();
    }
    throw;
  }
  if (producer.joinable()) producer.join();
  if (producer_failure) std::rethrow_exception(producer_failure);
  if (result.stats.decisions > 0) {
    result.stats.mean_compute_ms = compute_total / result.stats.decisions;
  }
  return result;
}

std::string event_to_json(const TrackerEvent& e) {
  nlohmann::json j = nlohmann::json::object();
  j["timestamp"] = e.timestamp;
  j["presence_prob"] =
      e.presence_prob ? nlohmann::json(*e.presence_prob) : nlohmann::json();
  j["angle_deg"] = e.angle_deg ? nlohmann::json(*e.angle_deg) : nlohmann::json();
  j["action_taken"] = std::string(to_string(e.action));
  j["pan_deg"] = e.pan_deg;
  j["compute_ms"] = e.compute_ms;
  return j.dump();
}

void write_event_log(std::ostream& out,
                     const std::vector<TrackerEvent>& events) {
  for (const TrackerEvent& e : events) out << event_to_json(e) << "\n";
}

TrackingScore score_tracking(const std::vector<TrackerEvent>& events,
                             const std::function<double(double)>& truth_deg,
                             const TrackerConfig& config) {
  TrackingScore s;
  for (const TrackerEvent& e : events) {
    if (e.action != TrackerAction::kPanComplete) continue;
    ++s.checkpoints;
    const double truth = truth_deg(e.timestamp + config.settle_s);
    if (circular_error(truth, e.pan_deg) <= config.fov_deg / 2.0) ++s.hits;
  }
  return s;
}

}  // namespace footfall
