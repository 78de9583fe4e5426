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

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "footfall/error.hpp"
#include "footfall/spectro.hpp"
#include "test_util.hpp"

using namespace footfall;

namespace {

// Direct DFT of one centered, reflect-padded, Hann-windowed frame. Written
// out longhand so it shares nothing with the FFT path.
std::vector<std::complex<double>> direct_frame(std::span<const float> x,
                                               int frame) {
  const int n = static_cast<int>(x.size());
  std::vector<double> seg(512);
  for (int k = 0; k < 512; ++k) {
    int i = frame * 128 - 256 + k;
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
    const double w = std::pow(std::sin(std::numbers::pi * k / 512.0), 2);
    seg[k] = x[i] * w;
  }
  std::vector<std::complex<double>> out(257);
  for (int b = 0; b < 257; ++b) {
    std::complex<double> acc = 0.0;
    for (int k = 0; k < 512; ++k) {
      acc += seg[k] * std::polar(1.0, -2.0 * std::numbers::pi * b * k / 512.0);
    }
    out[b] = acc;
  }
  return out;
}

std::vector<float> tone(double hz, double amp = 0.02) {
  std::vector<float> x(kSampleRate);
  for (int i = 0; i < kSampleRate; ++i) {
    x[i] = static_cast<float>(amp * std::sin(2 * std::numbers::pi * hz * i /
                                             kSampleRate));
  }
  return x;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::kIoFailure;
}

}  // namespace

TEST_SUITE("spectro") {

TEST_CASE("shape") {
  const auto x = footfall::testing::white_noise(kSampleRate, 1, 0.02);
  const auto s = spectrogram(x);
  CHECK(Spectrogram::kShape == std::array<int, 3>{2, 257, 345});
  CHECK(s.values().size() == 2u * 257 * 345);
  CHECK(std::all_of(s.values().begin(), s.values().end(),
                    [](float v) { return std::isfinite(v); }));
  CHECK(code_of([] { stft(std::vector<float>(44099)); }) == Errc::kWrongLength);
}

TEST_CASE("stft matches a direct DFT") {
  const auto x = footfall::testing::white_noise(kSampleRate, 2, 0.02);
  const auto z = stft(x);
  for (int frame : {0, 1, 2, 100, 343, 344}) {
    const auto ref = direct_frame(x, frame);
    double worst = 0.0, scale = 0.0;
    for (int b = 0; b < 257; ++b) {
      worst = std::max(worst, std::abs(z.at(b, frame) - ref[b]));
      scale = std::max(scale, std::abs(ref[b]));
    }
    CHECK(worst <= 1e-9 * scale);
  }
}

TEST_CASE("dc input concentrates in bin 0") {
  const std::vector<float> x(kSampleRate, 0.02f);
  const auto z = stft(x);
  for (int f = 0; f < kFrames; f += 17) {
    const double dc = std::abs(z.at(0, f));
    REQUIRE(dc > 0.0);
    for (int b = 2; b < kFreqBins; ++b) REQUIRE(std::abs(z.at(b, f)) < 1e-3 * dc);
  }
}

TEST_CASE("bin-centered tone peaks at its bin") {
  for (int k : {3, 20, 64, 200}) {
    const auto z = stft(tone(k * 44100.0 / 512.0));
    for (int f = 2; f < kFrames - 2; f += 31) {
      int best = 0;
      for (int b = 1; b < kFreqBins; ++b) {
        if (std::abs(z.at(b, f)) > std::abs(z.at(best, f))) best = b;
      }
      REQUIRE(best == k);
    }
  }
}

TEST_CASE("linearity") {
  const auto x = footfall::testing::white_noise(kSampleRate, 3, 0.02);
  std::vector<float> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 0.5f * x[i];
  const auto zx = stft(x), zy = stft(y);
  for (std::size_t i = 0; i < zx.values().size(); i += 97) {
    REQUIRE(std::abs(zy.values()[i] - 0.5 * zx.values()[i]) <=
            1e-12 + 1e-9 * std::abs(zx.values()[i]));
  }
}

TEST_CASE("parseval on single frames") {
  const auto x = footfall::testing::white_noise(kSampleRate, 4, 0.02);
  const auto z = stft(x);
  for (int frame : {5, 170, 300}) {
    double time_energy = 0.0;
    for (int k = 0; k < 512; ++k) {
      const double w = std::pow(std::sin(std::numbers::pi * k / 512.0), 2);
      const double v = x[frame * 128 - 256 + k] * w;
      time_energy += v * v;
    }
    double freq_energy = 0.0;
    for (int b = 0; b < 257; ++b) {
      const double weight = (b == 0 || b == 256) ? 1.0 : 2.0;
      freq_energy += weight * std::norm(z.at(b, frame));
    }
    CHECK(freq_energy / 512.0 == doctest::Approx(time_energy).epsilon(1e-9));
  }
  // Over the whole clip the frames overlap 4x; the squared Hann window sums
  // to 1.5 per sample at 75% overlap.
  double wave = 0.0, spec = 0.0;
  for (int i = 512; i < kSampleRate - 512; ++i) wave += double(x[i]) * x[i];
  for (int f = 6; f < kFrames - 6; ++f) {
    for (int b = 0; b < 257; ++b) {
      spec += ((b == 0 || b == 256) ? 1.0 : 2.0) * std::norm(z.at(b, f)) / 512.0;
    }
  }
  const double covered = 128.0 * (kFrames - 12) / (kSampleRate - 1024);
  CHECK(spec / (1.5 * wave * covered) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("log scale") {
  CHECK(compress(0.0) == 0.0);
  CHECK(log_scale_value(0.0) == doctest::Approx(0.5));
  for (double v : {1e-4, 0.01, 0.3, 5.0}) {
    CHECK(compress(-v) == -compress(v));
    CHECK(log_scale_value(v) + log_scale_value(-v) == doctest::Approx(1.0));
    CHECK(compress(v) == doctest::Approx(std::log1p(v / 1e-3)));
  }
  double prev = -1.0;
  for (double v = 0.0; v < 10.0; v = v * 1.7 + 1e-5) {
    const double c = compress(v);
    REQUIRE(c > prev);
    prev = c;
  }
}

TEST_CASE("empty profile of identical clips equals one clip") {
  const auto one = footfall::testing::noise_clip(2, kSampleRate, 5, 0.05);
  MultiChannelClip audio(2, 20 * kSampleRate);
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < 20; ++k) {
      std::copy(one.channel(c).begin(), one.channel(c).end(),
                audio.channel(c).begin() + k * kSampleRate);
    }
  }
  const auto p = empty_profile(audio, "r", RobotCondition::kDynamic);
  CHECK(p.room_id == "r");
  CHECK(p.robot_condition == RobotCondition::kDynamic);
  REQUIRE(p.channels.size() == 2);
  const auto n = normalize_rms(one);
  for (int c = 0; c < 2; ++c) {
    const auto s = spectrogram(n.channel(c));
    for (std::size_t i = 0; i < s.values().size(); ++i) {
      REQUIRE(std::abs(p.channels[c].values()[i] - s.values()[i]) <= 1e-6f);
    }
  }
}

TEST_CASE("empty profile is the cell mean and order free") {
  const auto a = normalize_rms(footfall::testing::noise_clip(1, kSampleRate, 6));
  const auto b = normalize_rms(footfall::testing::noise_clip(1, kSampleRate, 7));
  MultiChannelClip ab(1, 10 * kSampleRate), ba(1, 10 * kSampleRate);
  for (int k = 0; k < 10; ++k) {
    const auto& first = (k % 2 == 0) ? a : b;
    const auto& second = (k % 2 == 0) ? b : a;
    std::copy(first.channel(0).begin(), first.channel(0).end(),
              ab.channel(0).begin() + k * kSampleRate);
    std::copy(second.channel(0).begin(), second.channel(0).end(),
              ba.channel(0).begin() + k * kSampleRate);
  }
  const auto pab = empty_profile(ab), pba = empty_profile(ba);
  const auto sa = spectrogram(a.channel(0)), sb = spectrogram(b.channel(0));
  for (std::size_t i = 0; i < sa.values().size(); i += 7) {
    const double want = 0.5 * (sa.values()[i] + sb.values()[i]);
    REQUIRE(std::abs(pab.channels[0].values()[i] - want) <= 1e-6);
    REQUIRE(std::abs(pab.channels[0].values()[i] -
                     pba.channels[0].values()[i]) <= 1e-6);
  }
}

TEST_CASE("empty profile needs ten seconds") {
  const auto audio = footfall::testing::noise_clip(4, 5 * kSampleRate, 8);
  CHECK(code_of([&] { empty_profile(audio); }) ==
        Errc::kInsufficientEmptyAudio);
}

TEST_CASE("background subtraction examples") {
  const auto s = spectrogram(footfall::testing::white_noise(kSampleRate, 9, 0.02));
  const auto zero_w = subtract_background(s, s, 0.0);
  for (std::size_t i = 0; i < s.values().size(); ++i) {
    REQUIRE(zero_w.values()[i] == std::clamp(s.values()[i], 0.0f, 1.0f));
  }
  const auto self = subtract_background(s, s, 1.0);
  CHECK(std::all_of(self.values().begin(), self.values().end(),
                    [](float v) { return v == 0.0f; }));

  Spectrogram in, empty;
  in.at(1, 10, 20) = 0.5f;
  empty.at(1, 10, 20) = 0.7f;
  CHECK(subtract_background(in, empty, 1.0).at(1, 10, 20) == 0.0f);
  CHECK(code_of([&] { subtract_background(in, empty, 1.5); }) ==
        Errc::kOutOfRange);
}

TEST_CASE("background subtraction algebra on random spectrograms") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<float> u(-0.5f, 1.5f);
  std::uniform_real_distribution<float> e(0.0f, 1.0f);
  Spectrogram in, empty;
  for (int trial = 0; trial < 20; ++trial) {
    for (auto& v : in.values()) v = u(rng);
    for (auto& v : empty.values()) v = e(rng);
    const double w1 = e(rng), w2 = std::min(1.0, w1 + 0.25);
    const auto o1 = subtract_background(in, empty, w1);
    const auto o2 = subtract_background(in, empty, w2);
    for (std::size_t i = 0; i < in.values().size(); i += 13) {
      const double want =
          std::clamp(in.values()[i] - w1 * empty.values()[i], 0.0, 1.0);
      REQUIRE(std::abs(o1.values()[i] - want) <= 1e-6);
      REQUIRE(o1.values()[i] >= 0.0f);
      REQUIRE(o1.values()[i] <= 1.0f);
      REQUIRE(o2.values()[i] <= o1.values()[i]);
    }
  }
}

TEST_CASE("profile file round trip") {
  footfall::testing::TempDir dir("spectro");
  EmptyRoomProfile p;
  p.room_id = "room7";
  p.robot_condition = RobotCondition::kDynamic;
  p.channels.resize(4);
  for (int c = 0; c < 4; ++c) p.channels[c].at(c % 2, 3 * c, 5 * c) = 0.25f * c;
  save_profile(dir.path() / "p.bin", p);
  const auto back = load_profile(dir.path() / "p.bin");
  CHECK(back.room_id == "room7");
  CHECK(back.robot_condition == RobotCondition::kDynamic);
  CHECK(back.channels == p.channels);
  std::ofstream(dir.path() / "bad.bin") << "garbage";
  CHECK(code_of([&] { load_profile(dir.path() / "bad.bin"); }) ==
        Errc::kMalformedFile);
}

}  // TEST_SUITE
