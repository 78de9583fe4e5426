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

#include <span>
#include <vector>

#include "footfall/audio.hpp"
#include "footfall/spectro.hpp"

// Data-parallel kernels behind feature extraction. Each kernel has a plain
// serial reference and an OpenMP variant; tests hold the two together and
// bench/ compares their speed.
namespace footfall::kernels {

enum class Exec { kSerial, kParallel };

// Spectrogram of every channel of an already normalized 1 s clip.
std::vector<Spectrogram> clip_spectrograms(const MultiChannelClip& clip,
                                           Exec exec);

// Per-channel element-wise mean of the spectrograms of normalized clips.
std::vector<Spectrogram> mean_spectrograms(
    std::span<const MultiChannelClip> clips, Exec exec);

// See footfall::pool_energy.
void pool_energy(std::span<const Spectrogram> spectrograms,
                 std::span<const Spectrogram> empty, double w_backsub,
                 std::span<double> energy, std::span<double> d_energy_dw,
                 Exec exec);

// Pools evaluated at n_knots evenly spaced w values; out is pool-major.
void pool_energy_knots(std::span<const Spectrogram> spectrograms,
                       std::span<const Spectrogram> empty, int n_knots,
                       std::span<float> out, Exec exec);

// GCC-PHAT curves of all 6 pairs of a normalized 4-channel clip at lags
// -32 .. +31, pair-major.
std::vector<double> gcc_block(const MultiChannelClip& clip, Exec exec);

}  // namespace footfall::kernels
