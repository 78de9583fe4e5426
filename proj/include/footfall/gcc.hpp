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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "footfall/fft.hpp"

namespace footfall {

inline constexpr double kPhatEpsilon = 1e-12;
// Raised-cosine ramp at both clip ends. A sound cut by the clip boundary
// otherwise leaves a step that is coherent at lag 0 on every channel, and
// PHAT's flat weighting lets it outvote the true delay.
inline constexpr double kGccTaperSeconds = 0.005;

struct GccResult {
  double delay = 0.0;              // samples; positive when b lags a
  std::vector<double> curve;       // lags -max_lag .. +max_lag
  double peak_value = 0.0;         // max of curve
  int max_lag = 0;

  double at_lag(int lag) const { return curve[lag + max_lag]; }
};

// GCC-PHAT over one fixed signal length. Spectra can be computed once per
// channel and correlated against several partners.
class GccPhat {
 public:
  GccPhat(std::size_t signal_length, int max_lag);

  std::size_t signal_length() const { return length_; }
  int max_lag() const { return max_lag_; }
  std::size_t fft_size() const { return fft_.size(); }

  // Tapered, zero-padded spectrum of one signal. Throws kLengthMismatch or
  // kDegenerateSignal (all-zero input).
  std::vector<std::complex<double>> spectrum(std::span<const float> x) const;
  GccResult correlate(std::span<const std::complex<double>> spec_a,
                      std::span<const std::complex<double>> spec_b) const;

 private:
  std::size_t length_;
  int max_lag_;
  RealFft fft_;
  std::vector<double> ramp_;  // rising half of the end taper
};

// Requires equal lengths of at least 4 * max_lag.
GccResult gcc_phat(std::span<const float> sig_a, std::span<const float> sig_b,
                   int max_lag);

// Parabolic refinement around index `i` of `curve`; returns an offset in
// [-0.5, 0.5], zero at the ends.
double parabolic_offset(std::span<const double> curve, std::size_t i);

// Smallest 2^a 3^b 5^c 7^d that is >= n.
std::size_t next_smooth_size(std::size_t n);

}  // namespace footfall
