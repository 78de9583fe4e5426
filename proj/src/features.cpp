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

#include "footfall/features.hpp"

#include <algorithm>
#include <cmath>

#include "footfall/error.hpp"
#include "footfall/kernels.hpp"

namespace footfall {

const PoolGrid& PoolGrid::get() {
  static const PoolGrid grid = [] {
    PoolGrid g;
    for (int b = 0; b <= kEnergyBands; ++b) {
      g.band_edges[b] = b * kFreqBins / kEnergyBands;
    }
    for (int s = 0; s <= kEnergySegments; ++s) {
      g.segment_edges[s] = s * kFrames / kEnergySegments;
    }
    return g;
  }();
  return grid;
}

ClipAnalysis analyze_clip(const MultiChannelClip& clip) {
  if (clip.n_channels() != kNumMics) {
    throw Error(Errc::kChannelCountMismatch,
                "features need " + std::to_string(kNumMics) + " channels");
  }
  if (clip.n_samples() != static_cast<std::size_t>(kSampleRate)) {
    throw Error(Errc::kWrongLength, "features need a 1 s clip");
  }
  const MultiChannelClip normalized = normalize_rms(clip);
  ClipAnalysis a;
  a.spectrograms =
      kernels::clip_spectrograms(normalized, kernels::Exec::kParallel);
  a.gcc = kernels::gcc_block(normalized, kernels::Exec::kParallel);
  return a;
}

void pool_energy(std::span<const Spectrogram> spectrograms,
                 const EmptyRoomProfile& profile, double w_backsub,
                 std::span<double> energy, std::span<double> d_energy_dw) {
  kernels::pool_energy(spectrograms, profile.channels, w_backsub, energy,
                       d_energy_dw, kernels::Exec::kParallel);
}

FeatureVector assemble_features(const ClipAnalysis& analysis,
                                const EmptyRoomProfile& profile,
                                double w_backsub,
                                std::span<double> d_energy_dw) {
  FeatureVector fv;
  std::copy(analysis.gcc.begin(), analysis.gcc.end(), fv.gcc().begin());
  pool_energy(analysis.spectrograms, profile, w_backsub, fv.energy(),
              d_energy_dw);
  return fv;
}

FeatureVector extract_features(const MultiChannelClip& clip,
                               const EmptyRoomProfile& profile,
                               double w_backsub) {
  return assemble_features(analyze_clip(clip), profile, w_backsub);
}

CachedFeatures cache_features(const ClipAnalysis& analysis,
                              const EmptyRoomProfile& profile, int n_knots) {
  CachedFeatures c;
  c.n_knots = n_knots;
  c.gcc.assign(analysis.gcc.begin(), analysis.gcc.end());
  c.energy_knots.resize(static_cast<std::size_t>(kEnergyFeatures) * n_knots);
  kernels::pool_energy_knots(analysis.spectrograms, profile.channels, n_knots,
                             c.energy_knots, kernels::Exec::kParallel);
  return c;
}

void CachedFeatures::energy_at(double w_backsub, std::span<double> energy,
                               std::span<double> d_energy_dw) const {
  const double step = 1.0 / (n_knots - 1);
  const double pos = std::clamp(w_backsub, 0.0, 1.0) / step;
  const int k = std::min(static_cast<int>(pos), n_knots - 2);
  const double t = pos - k;
  for (int i = 0; i < kEnergyFeatures; ++i) {
    const float* row = energy_knots.data() + static_cast<std::size_t>(i) * n_knots;
    const double lo = row[k], hi = row[k + 1];
    energy[i] = lo + (hi - lo) * t;
    if (!d_energy_dw.empty()) d_energy_dw[i] = (hi - lo) / step;
  }
}

}  // namespace footfall
