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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "footfall/dataset.hpp"
#include "footfall/geometry.hpp"
#include "footfall/report.hpp"
#include "footfall/training.hpp"

namespace footfall {

struct FoldPlan {
  std::string held_out_room;
  std::vector<std::string> train_rooms;
};

// One fold per room; throws kInsufficientRooms for fewer than two rooms.
std::vector<FoldPlan> plan_folds(const std::vector<std::string>& rooms);

inline constexpr const char* kDetectorMethod = "detector";
inline constexpr const char* kGccMethod = "gcc_phat";
inline constexpr const char* kConstantFrontMethod = "constant_front";
inline constexpr const char* kUniformMethod = "uniform_random";
inline constexpr double kUniformExpectedError = 90.0;

// Baseline rows for the given samples: GCC-PHAT on the oracle pair, the
// oracle pair's broadside, and the analytic uniform expectation.
std::vector<MetricsTable> evaluate_baselines(
    Dataset& dataset, std::span<const std::size_t> indices,
    const ArrayGeometry& geometry);

// Baselines scored room by room and averaged over rooms.
Report baseline_report(Dataset& dataset, const ArrayGeometry& geometry);

MetricsTable detector_table(Dataset& dataset,
                            std::span<const std::size_t> indices,
                            std::span<const Prediction> predictions,
                            double distance_threshold);

struct LoocvOptions {
  TrainConfig train;
  ArrayGeometry geometry = default_geometry();
  bool baselines = true;
  std::function<void(const std::string&)> log;
};

// Trains one detector per fold on the other rooms and scores it on the
// held-out room against that room's own empty profile. Throws
// kInsufficientRooms or kMissingEmptyProfile.
Report loocv(Dataset& dataset, const LoocvOptions& options);

}  // namespace footfall
