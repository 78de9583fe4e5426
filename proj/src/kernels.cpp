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

#include "footfall/kernels.hpp"

#include <algorithm>
#include <complex>

#include "footfall/error.hpp"
#include "footfall/features.hpp"
#include "footfall/gcc.hpp"

namespace footfall::kernels {

namespace {

void check_shapes(std::span<const Spectrogram> a,
                  std::span<const Spectrogram> b, std::size_t pools,
                  std::size_t out) {
  if (a.size() != b.size() || a.size() != kNumMics) {
    throw Error(Errc::kShapeMismatch,
                "energy pooling needs one spectrogram and one profile per mic");
  }
  if (out != pools) throw Error(Errc::kShapeMismatch, "pool output size");
}

double knot_value(int k, int n_knots) {
  return static_cast<double>(k) / (n_knots - 1);
}

// Serial reference: one pool at a time, cell by cell.
void pool_reference(std::span<const Spectrogram> spectrograms,
                    std::span<const Spectrogram> empty, double w,
                    std::span<double> energy, std::span<double> grad) {
  const auto& grid = PoolGrid::get();
  for (int m = 0; m < kNumMics; ++m) {
    for (int band = 0; band < kEnergyBands; ++band) {
      for (int seg = 0; seg < kEnergySegments; ++seg) {
        double sum = 0.0, slope = 0.0;
        for (int p = 0; p < kPlanes; ++p) {
          for (int b = grid.band_edges[band]; b < grid.band_edges[band + 1];
               ++b) {
            for (int f = grid.segment_edges[seg];
                 f < grid.segment_edges[seg + 1]; ++f) {
              const double e = empty[m].at(p, b, f);
              const double v = spectrograms[m].at(p, b, f) - w * e;
              const double c = std::clamp(v, 0.0, 1.0);
              sum += c * c;
              if (v > 0.0 && v < 1.0) slope -= 2.0 * c * e;
            }
          }
        }
        const int idx = (m * kEnergyBands + band) * kEnergySegments + seg;
        const double n = grid.cells(band, seg);
        energy[idx] = sum / n;
        if (!grad.empty()) grad[idx] = slope / n;
      }
    }
  }
}

// Fused variant: no intermediate spectrogram, values kept in double,
// pools spread over threads.
void pool_fused(std::span<const Spectrogram> spectrograms,
                std::span<const Spectrogram> empty, double w,
                std::span<double> energy, std::span<double> grad) {
  const auto& grid = PoolGrid::get();
  const bool want_grad = !grad.empty();
#pragma omp parallel for collapse(2) schedule(static)
  for (int m = 0; m < kNumMics; ++m) {
    for (int band = 0; band < kEnergyBands; ++band) {
      const float* in = spectrograms[m].values().data();
      const float* em = empty[m].values().data();
      for (int seg = 0; seg < kEnergySegments; ++seg) {
        const int f0 = grid.segment_edges[seg], f1 = grid.segment_edges[seg + 1];
        double sum = 0.0, slope = 0.0;
        for (int p = 0; p < kPlanes; ++p) {
          for (int b = grid.band_edges[band]; b < grid.band_edges[band + 1];
               ++b) {
            const std::size_t row =
                p * Spectrogram::kPlaneSize + static_cast<std::size_t>(b) * kFrames;
#pragma omp simd reduction(+ : sum, slope)
            for (int f = f0; f < f1; ++f) {
              const double e = em[row + f];
              const double v = in[row + f] - w * e;
              const double c = std::clamp(v, 0.0, 1.0);
              sum += c * c;
              slope -= (v > 0.0 && v < 1.0) ? 2.0 * c * e : 0.0;
            }
          }
        }
        const int idx = (m * kEnergyBands + band) * kEnergySegments + seg;
        const double n = grid.cells(band, seg);
        energy[idx] = sum / n;
        if (want_grad) grad[idx] = slope / n;
      }
    }
  }
}

}  // namespace

std::vector<Spectrogram> clip_spectrograms(const MultiChannelClip& clip,
                                           Exec exec) {
  const int n = clip.n_channels();
  std::vector<Spectrogram> out(n);
  if (exec == Exec::kSerial) {
    for (int c = 0; c < n; ++c) out[c] = spectrogram(clip.channel(c));
    return out;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < n; ++c) {
    try {
      out[c] = spectrogram(clip.channel(c));
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<Spectrogram> mean_spectrograms(
    std::span<const MultiChannelClip> clips, Exec exec) {
  if (clips.empty()) throw Error(Errc::kEmptyDataset, "no clips to average");
  const int n_ch = clips.front().n_channels();
  std::vector<std::vector<double>> acc(
      n_ch, std::vector<double>(Spectrogram::kSize, 0.0));
  // Each clip's spectrograms are added in clip order so both variants sum
  // identically.
  for (const auto& clip : clips) {
    if (clip.n_channels() != n_ch) {
      throw Error(Errc::kChannelCountMismatch, "clips differ in channels");
    }
    const auto specs = clip_spectrograms(clip, exec);
    for (int c = 0; c < n_ch; ++c) {
      auto v = specs[c].values();
      auto& a = acc[c];
      if (exec == Exec::kParallel) {
#pragma omp parallel for simd schedule(static)
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += v[i];
      } else {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += v[i];
      }
    }
  }
  std::vector<Spectrogram> out(n_ch);
  const double inv = 1.0 / static_cast<double>(clips.size());
  for (int c = 0; c < n_ch; ++c) {
    auto o = out[c].values();
    for (std::size_t i = 0; i < o.size(); ++i) {
      o[i] = static_cast<float>(acc[c][i] * inv);
    }
  }
  return out;
}

void pool_energy(std::span<const Spectrogram> spectrograms,
                 std::span<const Spectrogram> empty, double w_backsub,
                 std::span<double> energy, std::span<double> d_energy_dw,
                 Exec exec) {
  check_shapes(spectrograms, empty, kEnergyFeatures, energy.size());
  if (!d_energy_dw.empty() && d_energy_dw.size() != energy.size()) {
    throw Error(Errc::kShapeMismatch, "gradient output size");
  }
  if (!(w_backsub >= 0.0 && w_backsub <= 1.0)) {
    throw Error(Errc::kOutOfRange, "w_backsub must lie in [0, 1]");
  }
  if (exec == Exec::kSerial) {
    pool_reference(spectrograms, empty, w_backsub, energy, d_energy_dw);
  } else {
    pool_fused(spectrograms, empty, w_backsub, energy, d_energy_dw);
  }
}

void pool_energy_knots(std::span<const Spectrogram> spectrograms,
                       std::span<const Spectrogram> empty, int n_knots,
                       std::span<float> out, Exec exec) {
  if (n_knots < 2) throw Error(Errc::kOutOfRange, "need at least two knots");
  check_shapes(spectrograms, empty, static_cast<std::size_t>(kEnergyFeatures) *
                                        n_knots,
               out.size());
  std::vector<double> pools(kEnergyFeatures);
  if (exec == Exec::kSerial) {
    for (int k = 0; k < n_knots; ++k) {
      pool_reference(spectrograms, empty, knot_value(k, n_knots), pools, {});
      for (int i = 0; i < kEnergyFeatures; ++i) {
        out[static_cast<std::size_t>(i) * n_knots + k] =
            static_cast<float>(pools[i]);
      }
    }
    return;
  }
  for (int k = 0; k < n_knots; ++k) {
    pool_fused(spectrograms, empty, knot_value(k, n_knots), pools, {});
    for (int i = 0; i < kEnergyFeatures; ++i) {
      out[static_cast<std::size_t>(i) * n_knots + k] =
          static_cast<float>(pools[i]);
    }
  }
}

std::vector<double> gcc_block(const MultiChannelClip& clip, Exec exec) {
  if (clip.n_channels() != kNumMics) {
    throw Error(Errc::kChannelCountMismatch, "GCC block needs 4 channels");
  }
  const GccPhat engine(clip.n_samples(), kGccHalfSpan);
  std::vector<std::vector<std::complex<double>>> spectra(kNumMics);
  std::vector<double> out(kGccFeatures, 0.0);
  // A silent channel yields a flat (all-zero) curve rather than an error.
  std::vector<char> silent(kNumMics, 0);
  auto spectrum_of = [&](int c) {
    try {
      spectra[c] = engine.spectrum(clip.channel(c));
    } catch (const Error& e) {
      if (e.code() != Errc::kDegenerateSignal) throw;
      silent[c] = 1;
    }
  };
  auto pair_curve = [&](int pair, int a, int b) {
    if (silent[a] || silent[b]) return;
    const GccResult r = engine.correlate(spectra[a], spectra[b]);
    for (int l = 0; l < kGccLags; ++l) {
      out[static_cast<std::size_t>(pair) * kGccLags + l] =
          r.at_lag(l - kGccHalfSpan);
    }
  };
  static constexpr int kPairA[kNumPairs] = {0, 0, 0, 1, 1, 2};
  static constexpr int kPairB[kNumPairs] = {1, 2, 3, 2, 3, 3};
  if (exec == Exec::kSerial) {
    for (int c = 0; c < kNumMics; ++c) spectrum_of(c);
    for (int p = 0; p < kNumPairs; ++p) pair_curve(p, kPairA[p], kPairB[p]);
    return out;
  }
  std::exception_ptr failure;
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int c = 0; c < kNumMics; ++c) {
      try {
        spectrum_of(c);
      } catch (...) {
#pragma omp critical
        failure = std::current_exception();
      }
    }
#pragma omp for schedule(static)
    for (int p = 0; p < kNumPairs; ++p) {
      if (failure) continue;
      try {
        pair_curve(p, kPairA[p], kPairB[p]);
      } catch (...) {
#pragma omp critical
        failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace footfall::kernels
