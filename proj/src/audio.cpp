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

#include "footfall/audio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "footfall/error.hpp"

namespace footfall {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

MultiChannelClip::MultiChannelClip(int n_channels, std::size_t n_samples,
                                   int sample_rate)
    : n_channels_(n_channels),
      n_samples_(n_samples),
      sample_rate_(sample_rate),
      data_(static_cast<std::size_t>(n_channels) * n_samples, 0.0f) {}

MultiChannelClip MultiChannelClip::slice(std::size_t offset,
                                         std::size_t length) const {
  if (offset + length > n_samples_) {
    throw Error(Errc::kOutOfRange, "slice [" + std::to_string(offset) + ", " +
                                       std::to_string(offset + length) +
                                       ") exceeds " +
                                       std::to_string(n_samples_) + " samples");
  }
  MultiChannelClip out(n_channels_, length, sample_rate_);
  for (int c = 0; c < n_channels_; ++c) {
    auto src = channel(c).subspan(offset, length);
    std::copy(src.begin(), src.end(), out.channel(c).begin());
  }
  return out;
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T load(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void store(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

float decode_sample(const std::uint8_t* p, std::uint16_t format, int bits) {
  if (format == kFormatFloat) {
    if (bits == 32) return load<float>(p);
    return static_cast<float>(load<double>(p));
  }
  switch (bits) {
    case 16:
      return static_cast<float>(load<std::int16_t>(p) / 32768.0);
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;
      return static_cast<float>(v / 8388608.0);
    }
    case 32:
      return static_cast<float>(load<std::int32_t>(p) / 2147483648.0);
    default:
      return 0.0f;
  }
}

}  // namespace

MultiChannelClip read_recording(const std::filesystem::path& path,
                                const ReadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  auto malformed = [&](const std::string& why) {
    return Error(Errc::kMalformedFile, path.string() + ": " + why);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw malformed("not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = load<std::uint32_t>(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) throw malformed("short fmt");
      format = load<std::uint16_t>(chunk + 8);
      channels = load<std::uint16_t>(chunk + 10);
      rate = load<std::uint32_t>(chunk + 12);
      block_align = load<std::uint16_t>(chunk + 20);
      bits = load<std::uint16_t>(chunk + 22);
      if (format == kFormatExtensible) {
        if (size < 40) throw malformed("short extensible fmt");
        // First two bytes of the subformat GUID carry the real format tag.
        format = load<std::uint16_t>(chunk + 8 + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = std::min<std::size_t>(size, bytes.size() - body);
    }
    pos = body + size + (size & 1u);
  }
  if (channels == 0 || data == nullptr) throw malformed("missing fmt or data");
  const bool pcm_ok = format == kFormatPcm &&
                      (bits == 16 || bits == 24 || bits == 32);
  const bool float_ok = format == kFormatFloat && (bits == 32 || bits == 64);
  if (!pcm_ok && !float_ok) {
    throw malformed("unsupported encoding (format " + std::to_string(format) +
                    ", " + std::to_string(bits) + " bits)");
  }
  if (block_align != channels * (bits / 8)) throw malformed("bad block align");
  if (rate != static_cast<std::uint32_t>(kSampleRate) &&
      !options.allow_any_rate) {
    throw Error(Errc::kUnsupportedSampleRate,
                path.string() + " is " + std::to_string(rate) + " Hz");
  }
  if (options.expected_channels && *options.expected_channels != channels) {
    throw Error(Errc::kChannelCountMismatch,
                path.string() + " has " + std::to_string(channels) +
                    " channels, expected " +
                    std::to_string(*options.expected_channels));
  }

  const std::size_t frames = data_size / block_align;
  MultiChannelClip clip(channels, frames, static_cast<int>(rate));
  const int stride = bits / 8;
  for (std::size_t i = 0; i < frames; ++i) {
    const std::uint8_t* frame = data + i * block_align;
    for (int c = 0; c < channels; ++c) {
      clip.channel(c)[i] = decode_sample(frame + c * stride, format, bits);
    }
  }
  return clip;
}

void write_recording(const std::filesystem::path& path,
                     const MultiChannelClip& clip) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoFailure, "cannot write " + path.string());
  const auto channels = static_cast<std::uint16_t>(clip.n_channels());
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(
      clip.n_samples() * channels * sizeof(float));
  out.write("RIFF", 4);
  store<std::uint32_t>(out, 4 + 8 + 16 + 8 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  store<std::uint32_t>(out, 16);
  store<std::uint16_t>(out, kFormatFloat);
  store<std::uint16_t>(out, channels);
  store<std::uint32_t>(out, static_cast<std::uint32_t>(clip.sample_rate()));
  store<std::uint32_t>(out, static_cast<std::uint32_t>(clip.sample_rate()) *
                                channels * sizeof(float));
  store<std::uint16_t>(out, static_cast<std::uint16_t>(channels * sizeof(float)));
  store<std::uint16_t>(out, 32);
  out.write("data", 4);
  store<std::uint32_t>(out, data_bytes);

  std::vector<float> interleaved(clip.n_samples() * channels);
  for (int c = 0; c < channels; ++c) {
    auto src = clip.channel(c);
    for (std::size_t i = 0; i < src.size(); ++i) {
      interleaved[i * channels + c] = src[i];
    }
  }
  out.write(reinterpret_cast<const char*>(interleaved.data()),
            static_cast<std::streamsize>(interleaved.size() * sizeof(float)));
  if (!out) throw Error(Errc::kIoFailure, "short write to " + path.string());
}

RmsReport rms(const MultiChannelClip& clip) {
  RmsReport report;
  double total = 0.0;
  for (int c = 0; c < clip.n_channels(); ++c) {
    double acc = 0.0;
    for (float v : clip.channel(c)) acc += static_cast<double>(v) * v;
    total += acc;
    report.per_channel.push_back(
        clip.n_samples() ? std::sqrt(acc / clip.n_samples()) : 0.0);
  }
  const double count =
      static_cast<double>(clip.n_samples()) * clip.n_channels();
  report.pooled = count > 0 ? std::sqrt(total / count) : 0.0;
  return report;
}

MultiChannelClip normalize_rms(const MultiChannelClip& clip, double target) {
  const double current = rms(clip).pooled;
  if (!(current >= kSilenceFloor)) {
    throw Error(Errc::kSilentClip,
                "pooled RMS " + std::to_string(current) + " below floor");
  }
  const double scale = target / current;
  MultiChannelClip out = clip;
  for (float& v : out.samples()) v = static_cast<float>(v * scale);
  return out;
}

std::vector<ClipWindow> sample_clips(std::size_t n_samples, int sample_rate,
                                     double clip_duration, double rate) {
  const auto clip_len =
      static_cast<std::size_t>(std::llround(clip_duration * sample_rate));
  const auto stride =
      static_cast<std::size_t>(std::llround(sample_rate / rate));
  if (n_samples < clip_len || clip_len == 0 || stride == 0) {
    throw Error(Errc::kRecordingTooShort,
                std::to_string(n_samples) + " samples cannot hold a " +
                    std::to_string(clip_duration) + " s clip");
  }
  std::vector<ClipWindow> windows;
  for (std::size_t off = 0; off + clip_len <= n_samples; off += stride) {
    windows.push_back({off, static_cast<double>(off) / sample_rate});
  }
  return windows;
}

}  // namespace footfall
