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

#include "footfall/spectro.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "footfall/error.hpp"
#include "footfall/fft.hpp"
#include "footfall/kernels.hpp"

namespace footfall {

const std::vector<double>& hann_window() {
  static const std::vector<double> window = [] {
    std::vector<double> w(kWindowSize);
    for (int n = 0; n < kWindowSize; ++n) {
      w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / kWindowSize);
    }
    return w;
  }();
  return window;
}

ComplexStft stft(std::span<const float> waveform) {
  const auto n = static_cast<std::ptrdiff_t>(waveform.size());
  if (n != kSampleRate) {
    throw Error(Errc::kWrongLength, "STFT expects " +
                                        std::to_string(kSampleRate) +
                                        " samples, got " + std::to_string(n));
  }
  const RealFft fft(kWindowSize);
  const auto& window = hann_window();
  constexpr std::ptrdiff_t kPad = kWindowSize / 2;
  std::vector<double> frame(kWindowSize);
  std::vector<std::complex<double>> bins(kFreqBins);
  ComplexStft out;
  for (int f = 0; f < kFrames; ++f) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(f) * kHopLength - kPad;
    for (int k = 0; k < kWindowSize; ++k) {
      std::ptrdiff_t i = start + k;
      if (i < 0) i = -i;                     // reflect, edge not repeated
      if (i >= n) i = 2 * (n - 1) - i;
      frame[k] = waveform[static_cast<std::size_t>(i)] * window[k];
    }
    fft.forward(frame, bins);
    for (int b = 0; b < kFreqBins; ++b) out.at(b, f) = bins[b];
  }
  return out;
}

double compress(double v) {
  const double m = std::log1p(std::abs(v) / kLogEpsilon);
  return v < 0.0 ? -m : m;
}

double log_scale_value(double v) {
  return (compress(v) - kLogFloor) / (kLogCeil - kLogFloor);
}

Spectrogram log_scale(const ComplexStft& coefficients) {
  Spectrogram s;
  for (int b = 0; b < kFreqBins; ++b) {
    for (int f = 0; f < kFrames; ++f) {
      const auto& z = coefficients.at(b, f);
      s.at(0, b, f) = static_cast<float>(log_scale_value(z.real()));
      s.at(1, b, f) = static_cast<float>(log_scale_value(z.imag()));
    }
  }
  return s;
}

Spectrogram spectrogram(std::span<const float> waveform) {
  return log_scale(stft(waveform));
}

EmptyRoomProfile empty_profile(const MultiChannelClip& audio,
                               std::string room_id,
                               RobotCondition condition) {
  if (audio.duration() < kMinEmptySeconds) {
    throw Error(Errc::kInsufficientEmptyAudio,
                std::to_string(audio.duration()) + " s of empty audio, need " +
                    std::to_string(kMinEmptySeconds));
  }
  const std::size_t n_clips = audio.n_samples() / kSampleRate;
  std::vector<MultiChannelClip> clips;
  clips.reserve(n_clips);
  for (std::size_t i = 0; i < n_clips; ++i) {
    clips.push_back(
        normalize_rms(audio.slice(i * kSampleRate, kSampleRate)));
  }
  EmptyRoomProfile profile;
  profile.room_id = std::move(room_id);
  profile.robot_condition = condition;
  profile.channels = kernels::mean_spectrograms(clips, kernels::Exec::kParallel);
  return profile;
}

Spectrogram subtract_background(const Spectrogram& in,
                                const Spectrogram& empty, double w_backsub) {
  if (in.values().size() != empty.values().size()) {
    throw Error(Errc::kShapeMismatch, "spectrogram sizes differ");
  }
  if (!(w_backsub >= 0.0 && w_backsub <= 1.0)) {
    throw Error(Errc::kOutOfRange, "w_backsub must lie in [0, 1]");
  }
  Spectrogram out;
  auto a = in.values();
  auto e = empty.values();
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = static_cast<float>(std::clamp(a[i] - w_backsub * e[i], 0.0, 1.0));
  }
  return out;
}

namespace {

constexpr char kProfileMagic[8] = {'F', 'F', 'S', 'P', 'E', 'C', '0', '1'};

}  // namespace

void save_profile(const std::filesystem::path& path,
                  const EmptyRoomProfile& profile) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoFailure, "cannot write " + path.string());
  const std::string meta =
      nlohmann::json{{"room_id", profile.room_id},
                     {"robot_condition", to_string(profile.robot_condition)},
                     {"dtype", "float32"}}
          .dump();
  out.write(kProfileMagic, sizeof(kProfileMagic));
  const auto meta_len = static_cast<std::uint32_t>(meta.size());
  out.write(reinterpret_cast<const char*>(&meta_len), sizeof(meta_len));
  out.write(meta.data(), meta_len);
  const std::uint32_t shape[4] = {
      static_cast<std::uint32_t>(profile.channels.size()), kPlanes, kFreqBins,
      kFrames};
  out.write(reinterpret_cast<const char*>(shape), sizeof(shape));
  for (const auto& s : profile.channels) {
    out.write(reinterpret_cast<const char*>(s.values().data()),
              static_cast<std::streamsize>(Spectrogram::kSize * sizeof(float)));
  }
  if (!out) throw Error(Errc::kIoFailure, "short write to " + path.string());
}

EmptyRoomProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoFailure, "cannot open " + path.string());
  auto malformed = [&](const std::string& why) {
    return Error(Errc::kMalformedFile, path.string() + ": " + why);
  };
  char magic[8];
  std::uint32_t meta_len = 0;
  if (!in.read(magic, 8) || std::memcmp(magic, kProfileMagic, 8) != 0) {
    throw malformed("bad magic");
  }
  if (!in.read(reinterpret_cast<char*>(&meta_len), sizeof(meta_len)) ||
      meta_len > (1u << 20)) {
    throw malformed("bad metadata length");
  }
  std::string meta(meta_len, '\0');
  in.read(meta.data(), meta_len);
  std::uint32_t shape[4];
  if (!in.read(reinterpret_cast<char*>(shape), sizeof(shape))) {
    throw malformed("truncated header");
  }
  if (shape[1] != kPlanes || shape[2] != kFreqBins || shape[3] != kFrames ||
      shape[0] == 0 || shape[0] > 64) {
    throw malformed("unexpected shape");
  }
  EmptyRoomProfile profile;
  try {
    const auto j = nlohmann::json::parse(meta);
    profile.room_id = j.at("room_id").get<std::string>();
    profile.robot_condition =
        parse_condition(j.at("robot_condition").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw malformed(e.what());
  }
  profile.channels.resize(shape[0]);
  for (auto& s : profile.channels) {
    if (!in.read(reinterpret_cast<char*>(s.values().data()),
                 static_cast<std::streamsize>(Spectrogram::kSize *
                                              sizeof(float)))) {
      throw malformed("truncated data");
    }
  }
  return profile;
}

}  // namespace footfall
