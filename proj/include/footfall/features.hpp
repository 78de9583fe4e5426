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
#include <cstddef>
#include <span>
#include <vector>

#include "footfall/audio.hpp"
#include "footfall/geometry.hpp"
#include "footfall/spectro.hpp"

namespace footfall {

inline constexpr int kNumMics = 4;
inline constexpr int kNumPairs = kNumMics * (kNumMics - 1) / 2;
inline constexpr int kGccLags = 64;  // lags -32 .. +31
inline constexpr int kGccHalfSpan = kGccLags / 2;
inline constexpr int kEnergyBands = 32;
inline constexpr int kEnergySegments = 8;
inline constexpr int kPoolsPerMic = kEnergyBands * kEnergySegments;
inline constexpr int kGccFeatures = kNumPairs * kGccLags;          // 384
inline constexpr int kEnergyFeatures = kNumMics * kPoolsPerMic;    // 1024
inline constexpr int kFeatureDim = kGccFeatures + kEnergyFeatures; // 1408

// Cell ranges of the uniform band x segment pooling grid.
struct PoolGrid {
  std::array<int, kEnergyBands + 1> band_edges;
  std::array<int, kEnergySegments + 1> segment_edges;

  static const PoolGrid& get();
  int cells(int band, int segment) const {
    return kPlanes * (band_edges[band + 1] - band_edges[band]) *
           (segment_edges[segment + 1] - segment_edges[segment]);
  }
};

// gcc block (pair-major, lag-minor) followed by the energy block
// (mic, band, segment).
struct FeatureVector {
  std::vector<double> values = std::vector<double>(kFeatureDim, 0.0);

  std::span<double> gcc() { return {values.data(), kGccFeatures}; }
  std::span<const double> gcc() const { return {values.data(), kGccFeatures}; }
  std::span<double> energy() {
    return {values.data() + kGccFeatures, kEnergyFeatures};
  }
  std::span<const double> energy() const {
    return {values.data() + kGccFeatures, kEnergyFeatures};
  }
};

// Everything about a clip that does not depend on w_backsub.
struct ClipAnalysis {
  std::vector<double> gcc = std::vector<double>(kGccFeatures, 0.0);
  std::vector<Spectrogram> spectrograms;  // one per mic, of the normalized clip
};

// Normalizes the clip to the target RMS, computes the per-mic spectrograms and
// the GCC-PHAT curves of all mic pairs. Pair order follows
// ArrayGeometry::all_pairs() for a 4-mic array.
ClipAnalysis analyze_clip(const MultiChannelClip& clip);

// Pooled energy, the mean of clamp(S_in - w * S_empty, 0, 1)^2, per
// (mic, band, segment).
// When `d_energy_dw` is non-empty it receives the derivative of each pool
// with respect to w (clamped cells contribute zero).
void pool_energy(std::span<const Spectrogram> spectrograms,
                 const EmptyRoomProfile& profile, double w_backsub,
                 std::span<double> energy, std::span<double> d_energy_dw = {});

FeatureVector assemble_features(const ClipAnalysis& analysis,
                                const EmptyRoomProfile& profile,
                                double w_backsub,
                                std::span<double> d_energy_dw = {});

FeatureVector extract_features(const MultiChannelClip& clip,
                               const EmptyRoomProfile& profile,
                               double w_backsub);

// Energy pools tabulated at evenly spaced w knots on [0, 1], so training can
// evaluate features at any w without revisiting the spectrograms. Values
// between knots are linear interpolations of the exact pooled function.
inline constexpr int kDefaultEnergyKnots = 11;

struct CachedFeatures {
  std::vector<float> gcc;           // kGccFeatures
  std::vector<float> energy_knots;  // kEnergyFeatures x n_knots, pool-major
  int n_knots = kDefaultEnergyKnots;

  // Fills `energy` (and the per-pool slope) at w.
  void energy_at(double w_backsub, std::span<double> energy,
                 std::span<double> d_energy_dw) const;
};

CachedFeatures cache_features(const ClipAnalysis& analysis,
                              const EmptyRoomProfile& profile,
                              int n_knots = kDefaultEnergyKnots);

}  // namespace footfall
