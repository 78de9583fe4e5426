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

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "footfall/config.hpp"
#include "footfall/dataset.hpp"
#include "footfall/detector.hpp"
#include "footfall/features.hpp"

namespace footfall {

struct TrainConfig {
  DetectorDims dims;
  int epochs = 30;
  int batch_size = 32;
  AdamConfig adam;
  LossWeights loss;
  double w_backsub_init = 0.5;
  bool train_w_backsub = true;
  double distance_threshold = kDefaultDistanceThreshold;
  bool augmentation = true;
  double w_aug = kDefaultAugmentationWeight;
  int energy_knots = kDefaultEnergyKnots;
  // Share of the training samples held back for per-epoch validation.
  double validation_fraction = 0.0;
  std::uint64_t seed = 1;

  // Keys: [train] epochs, batch_size, learning_rate, beta1, beta2, epsilon,
  // weight_decay, w_backsub_init, train_w_backsub, distance_threshold,
  // validation_fraction, seed, hidden1, hidden2, energy_knots,
  // lambda_angle, lambda_distance, lambda_presence; [augment] enabled, w_aug.
  static TrainConfig from_config(const KeyValueConfig& config);
  KeyValueConfig to_config() const;
};

// Training-time features of each sample: the (optionally augmented) clip is
// analyzed once and its energy pools tabulated over w_backsub. Reads go
// through the dataset, so every lookup is audited. Entries depend only on the
// sample and on (seed, augmentation settings), which makes them shareable
// between folds.
class TrainingFeatureCache {
 public:
  TrainingFeatureCache(Dataset& dataset, const TrainConfig& config);

  const CachedFeatures& get(std::size_t sample_index);
  // Fills every missing entry of `indices`; faster than get() one by one.
  void prefetch(std::span<const std::size_t> indices);
  std::size_t size() const;

 private:
  CachedFeatures build(std::size_t sample_index);

  Dataset& dataset_;
  std::uint64_t seed_;
  bool augmentation_;
  double w_aug_;
  int knots_;
  mutable std::mutex mu_;
  std::map<std::size_t, std::unique_ptr<const CachedFeatures>> entries_;
};

struct ClassificationCounts {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / total;
  }
};

struct EvalSummary {
  double angle_mae_deg = 0.0;  // over presence samples
  std::size_t angle_count = 0;
  ClassificationCounts distance;
  ClassificationCounts presence;
};

struct EpochLog {
  int epoch = 0;
  LossBreakdown train_loss;  // mean over the epoch's batches
  double w_backsub = 0.0;
  std::optional<EvalSummary> validation;
};

struct TrainResult {
  DetectorModel model;
  std::vector<EpochLog> log;
};

// Trains on the samples listed in `indices`. Throws kEmptyDataset when no
// samples are given and kNoEmptySamples when none of them is empty-labeled.
TrainResult train(Dataset& dataset, std::span<const std::size_t> indices,
                  const TrainConfig& config,
                  TrainingFeatureCache* cache = nullptr,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

std::string format_epoch(const EpochLog& e);

struct Prediction {
  double angle_deg = 0.0;
  bool near = false;
  bool presence = false;
  Predictions raw;
};

Prediction predict(const DetectorModel& model, const MultiChannelClip& clip,
                   const EmptyRoomProfile& profile);

// Exact features at the model's w_backsub, each sample against its own
// room's profile.
std::vector<Prediction> predict_samples(const DetectorModel& model,
                                        Dataset& dataset,
                                        std::span<const std::size_t> indices);

EvalSummary summarize(std::span<const Prediction> predictions,
                      std::span<const LabeledSample* const> samples,
                      double distance_threshold);

// Central finite-difference check of loss_and_gradient.
struct GradcheckEntry {
  std::string group;
  std::string loss;  // "regression" or "classification"
  std::size_t parameter = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckEntry> entries;
  double max_rel_error = 0.0;
};

inline constexpr double kGradcheckStep = 1e-5;
inline constexpr double kGradcheckTolerance = 1e-4;

// Random clips and labels around a synthetic empty room; w_backsub derivative
// comes from the exact pooling (not the knot table).
GradcheckReport gradient_check(const DetectorModel& model, std::uint64_t seed,
                               int probes_per_group = 3, int batch = 6,
                               double h = kGradcheckStep);

}  // namespace footfall
