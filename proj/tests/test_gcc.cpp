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
#include <random>

#include "doctest.h"
#include "footfall/error.hpp"
#include "footfall/gcc.hpp"
#include "test_util.hpp"

using namespace footfall;

namespace {

// b[n] = a[n - d]: b lags a by d samples.
std::pair<std::vector<float>, std::vector<float>> shifted_pair(
    std::size_t n, int d, std::uint64_t seed) {
  const std::size_t margin = 64;
  const auto s = footfall::testing::white_noise(n + 2 * margin, seed);
  std::vector<float> a(s.begin() + margin, s.begin() + margin + n);
  std::vector<float> b(s.begin() + margin - d, s.begin() + margin - d + n);
  return {a, b};
}

// Brute-force normalized cross-correlation over integer lags.
int brute_force_lag(std::span<const float> a, std::span<const float> b,
                    int max_lag) {
  const auto n = static_cast<int>(a.size());
  int best = 0;
  double best_v = -1e300;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    double acc = 0.0, ea = 0.0, eb = 0.0;
    for (int i = std::max(0, -lag); i < std::min(n, n - lag); ++i) {
      acc += double(a[i]) * b[i + lag];
      ea += double(a[i]) * a[i];
      eb += double(b[i + lag]) * b[i + lag];
    }
    const double v = acc / std::sqrt(ea * eb);
    if (v > best_v) {
      best_v = v;
      best = lag;
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("gcc") {

TEST_CASE("white noise shifted by +5") {
  auto [a, b] = shifted_pair(8192, 5, 1);
  const auto r = gcc_phat(a, b, 40);
  CHECK(brute_force_lag(a, b, 40) == 5);
  CHECK(std::abs(r.delay - 5.0) <= 0.25);
  CHECK(r.curve.size() == 81);
  CHECK(r.peak_value == *std::max_element(r.curve.begin(), r.curve.end()));
  CHECK(std::abs(r.delay) <= r.max_lag);
}

TEST_CASE("self alignment") {
  const auto a = footfall::testing::white_noise(4096, 2);
  const auto r = gcc_phat(a, a, 20);
  CHECK(r.delay == doctest::Approx(0.0));
  CHECK(r.at_lag(0) == r.peak_value);
  CHECK(r.peak_value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("agrees with the brute-force oracle") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> lag(-40, 40);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = lag(rng);
    auto [a, b] = shifted_pair(4096, d, 100 + trial);
    const auto r = gcc_phat(a, b, 40);
    const int oracle = brute_force_lag(a, b, 40);
    REQUIRE(oracle == d);
    REQUIRE(std::abs(r.delay - oracle) <= 0.25);
  }
}

TEST_CASE("antisymmetry and scale invariance") {
  auto [a, b] = shifted_pair(4096, -7, 4);
  const auto ab = gcc_phat(a, b, 30), ba = gcc_phat(b, a, 30);
  CHECK(std::abs(ab.delay + ba.delay) <= 1e-9);
  std::vector<float> loud(a);
  for (auto& v : loud) v *= 250.0f;
  const auto scaled = gcc_phat(loud, b, 30);
  const auto argmax = [](const GccResult& r) {
    return std::max_element(r.curve.begin(), r.curve.end()) - r.curve.begin();
  };
  CHECK(argmax(scaled) == argmax(ab));
  CHECK(scaled.delay == doctest::Approx(ab.delay).epsilon(1e-9));
}

TEST_CASE("integer delays recovered exactly") {
  for (int d = -12; d <= 12; ++d) {
    auto [a, b] = shifted_pair(2048, d, 50 + d + 12);
    const auto r = gcc_phat(a, b, 12);
    REQUIRE(std::lround(r.delay) == d);
  }
}

TEST_CASE("independent noise peak statistics") {
  // Peak of independent white noise relative to the curve's median absolute
  // value, over 100 seeds. The ratio follows the extreme value of
  // 2 * max_lag + 1 near-Gaussian lags, so it depends strongly on max_lag.
  auto fraction_below = [](int max_lag, double factor) {
    int below = 0;
    for (int seed = 0; seed < 100; ++seed) {
      const auto a = footfall::testing::white_noise(8192, 1000 + seed);
      const auto b = footfall::testing::white_noise(8192, 5000 + seed);
      const auto r = gcc_phat(a, b, max_lag);
      std::vector<double> mags(r.curve.size());
      for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(r.curve[i]);
      std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
      if (std::abs(r.peak_value) < factor * mags[mags.size() / 2]) ++below;
    }
    return below / 100.0;
  };
  const double at3 = fraction_below(40, 3.0);
  MESSAGE("max_lag 40: peak < 3x median |curve| in " << at3 * 100 << "% of trials");
  MESSAGE("max_lag 2: peak < 3x median |curve| in "
          << fraction_below(2, 3.0) * 100 << "% of trials");
  CHECK(fraction_below(40, 6.0) >= 0.9);
  // A genuine delay clears the noise bound by a wide margin.
  auto [a, b] = shifted_pair(8192, 7, 77);
  const auto r = gcc_phat(a, b, 40);
  std::vector<double> mags(r.curve.size());
  for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(r.curve[i]);
  std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
  CHECK(std::abs(r.peak_value) > 6.0 * mags[mags.size() / 2]);
}

TEST_CASE("errors and helpers") {
  const auto a = footfall::testing::white_noise(100, 5);
  const std::vector<float> zero(100, 0.0f), short_sig(99, 1.0f);
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kIoFailure;
  };
  CHECK(code([&] { gcc_phat(a, short_sig, 10); }) == Errc::kLengthMismatch);
  CHECK(code([&] { gcc_phat(a, zero, 10); }) == Errc::kDegenerateSignal);
  CHECK(code([&] { gcc_phat(a, a, 26); }) == Errc::kOutOfRange);
  CHECK(next_smooth_size(44133) == 44800);
  CHECK(next_smooth_size(1024) == 1024);
  const std::vector<double> par = {1.0, 3.0, 2.0};
  CHECK(parabolic_offset(par, 1) == doctest::Approx(1.0 / 6.0));
  CHECK(parabolic_offset(par, 0) == 0.0);
}

}  // TEST_SUITE
