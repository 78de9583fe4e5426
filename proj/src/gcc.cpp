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

#include "footfall/gcc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "footfall/audio.hpp"
#include "footfall/error.hpp"

namespace footfall {

std::size_t next_smooth_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 2);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

double parabolic_offset(std::span<const double> curve, std::size_t i) {
  if (i == 0 || i + 1 >= curve.size()) return 0.0;
  const double y0 = curve[i - 1], y1 = curve[i], y2 = curve[i + 1];
  const double denom = y0 - 2.0 * y1 + y2;
  if (!(std::abs(denom) > 0.0)) return 0.0;
  return std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
}

GccPhat::GccPhat(std::size_t signal_length, int max_lag)
    : length_(signal_length),
      max_lag_(max_lag),
      fft_(next_smooth_size(signal_length + static_cast<std::size_t>(
                                                std::max(max_lag, 0)) + 1)) {
  if (max_lag < 0 || signal_length < 4 * static_cast<std::size_t>(max_lag) ||
      signal_length == 0) {
    throw Error(Errc::kOutOfRange, "GCC-PHAT needs length >= 4 * max_lag");
  }
  // Short signals keep at most an eighth of their length at each end.
  const auto taper = std::min<std::size_t>(
      signal_length / 8,
      static_cast<std::size_t>(std::lround(kGccTaperSeconds * kSampleRate)));
  ramp_.resize(taper);
  for (std::size_t i = 0; i < taper; ++i) {
    ramp_[i] = 0.5 - 0.5 * std::cos(std::numbers::pi * (i + 0.5) / taper);
  }
}

std::vector<std::complex<double>> GccPhat::spectrum(
    std::span<const float> x) const {
  if (x.size() != length_) {
    throw Error(Errc::kLengthMismatch,
                "signal has " + std::to_string(x.size()) + " samples, expected " +
                    std::to_string(length_));
  }
  if (std::all_of(x.begin(), x.end(), [](float v) { return v == 0.0f; })) {
    throw Error(Errc::kDegenerateSignal, "all-zero input");
  }
  std::vector<double> padded(fft_.size(), 0.0);
  std::copy(x.begin(), x.end(), padded.begin());
  for (std::size_t i = 0; i < ramp_.size(); ++i) {
    padded[i] *= ramp_[i];
    padded[length_ - 1 - i] *= ramp_[i];
  }
  std::vector<std::complex<double>> spec(fft_.bins());
  fft_.forward(padded, spec);
  return spec;
}

GccResult GccPhat::correlate(
    std::span<const std::complex<double>> spec_a,
    std::span<const std::complex<double>> spec_b) const {
  const std::size_t bins = fft_.bins();
  std::vector<std::complex<double>> cross(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const std::complex<double> r = std::conj(spec_a[k]) * spec_b[k];
    cross[k] = r / (std::abs(r) + kPhatEpsilon);
  }
  const std::size_t n = fft_.size();
  std::vector<double> full(n);
  fft_.inverse(cross, full);

  GccResult out;
  out.max_lag = max_lag_;
  out.curve.resize(2 * static_cast<std::size_t>(max_lag_) + 1);
  const double scale = 1.0 / static_cast<double>(n);
  for (int lag = -max_lag_; lag <= max_lag_; ++lag) {
    const std::size_t idx =
        lag >= 0 ? static_cast<std::size_t>(lag) : n - static_cast<std::size_t>(-lag);
    out.curve[lag + max_lag_] = full[idx] * scale;
  }
  const auto peak = std::max_element(out.curve.begin(), out.curve.end());
  const auto i = static_cast<std::size_t>(peak - out.curve.begin());
  out.peak_value = *peak;
  out.delay = static_cast<double>(i) - max_lag_ + parabolic_offset(out.curve, i);
  return out;
}

GccResult gcc_phat(std::span<const float> sig_a, std::span<const float> sig_b,
                   int max_lag) {
  if (sig_a.size() != sig_b.size()) {
    throw Error(Errc::kLengthMismatch, "GCC-PHAT inputs differ in length");
  }
  const GccPhat engine(sig_a.size(), max_lag);
  return engine.correlate(engine.spectrum(sig_a), engine.spectrum(sig_b));
}

}  // namespace footfall
