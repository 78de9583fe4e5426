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

#include "footfall/harness.hpp"

#include <exception>

#include "footfall/baseline.hpp"
#include "footfall/error.hpp"

namespace footfall {

std::vector<FoldPlan> plan_folds(const std::vector<std::string>& rooms) {
  if (rooms.size() < 2) {
    throw Error(Errc::kInsufficientRooms,
                "cross-validation needs at least 2 rooms, got " +
                    std::to_string(rooms.size()));
  }
  std::vector<FoldPlan> plan;
  for (const std::string& held : rooms) {
    FoldPlan f;
    f.held_out_room = held;
    for (const std::string& r : rooms) {
      if (r != held) f.train_rooms.push_back(r);
    }
    plan.push_back(std::move(f));
  }
  return plan;
}

std::vector<MetricsTable> evaluate_baselines(
    Dataset& dataset, std::span<const std::size_t> indices,
    const ArrayGeometry& geometry) {
  std::vector<ClipOutcome> gcc(indices.size()), front(indices.size()),
      uniform(indices.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < indices.size(); ++k) {
    try {
      const LabeledSample& s = dataset.sample(indices[k]);
      ClipOutcome base;
      base.action = s.action;
      base.condition = s.robot_condition;
      base.presence = s.presence;
      gcc[k] = front[k] = uniform[k] = base;
      if (!s.presence) continue;
      const double truth = pixel_to_degrees(*s.azimuth_x);
      const MicPair pair = oracle_pair(geometry, truth);
      front[k].angle_error_deg =
          circular_error(constant_front(geometry, pair), truth);
      uniform[k].angle_error_deg = kUniformExpectedError;
      const BaselinePrediction p =
          baseline_predict(dataset.clip(indices[k]), geometry, truth);
      gcc[k].angle_error_deg = circular_error(p.angle_deg, truth);
    } catch (...) {
#pragma omp critical(footfall_baseline_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return {tabulate(kGccMethod, gcc), tabulate(kConstantFrontMethod, front),
          tabulate(kUniformMethod, uniform)};
}

Report baseline_report(Dataset& dataset, const ArrayGeometry& geometry) {
  Report r;
  r.kind = "baseline";
  for (const std::string& room : dataset.manifest().rooms()) {
    FoldReport f;
    f.held_out_room = room;
    const auto idx = dataset.indices_in_room(room);
    f.test_samples = idx.size();
    f.methods = evaluate_baselines(dataset, idx, geometry);
    r.folds.push_back(std::move(f));
  }
  for (std::size_t m = 0; !r.folds.empty() && m < r.folds[0].methods.size();
       ++m) {
    std::vector<const MetricsTable*> per_room;
    for (const FoldReport& f : r.folds) per_room.push_back(&f.methods[m]);
    r.aggregate.push_back(mean_tables(r.folds[0].methods[m].method, per_room));
  }
  return r;
}

MetricsTable detector_table(Dataset& dataset,
                            std::span<const std::size_t> indices,
                            std::span<const Prediction> predictions,
                            double distance_threshold) {
  std::vector<ClipOutcome> out;
  out.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const LabeledSample& s = dataset.sample(indices[k]);
    const Prediction& p = predictions[k];
    ClipOutcome c;
    c.action = s.action;
    c.condition = s.robot_condition;
    c.presence = s.presence;
    c.presence_correct = p.presence == s.presence;
    if (s.presence) {
      c.angle_error_deg =
          circular_error(p.angle_deg, pixel_to_degrees(*s.azimuth_x));
      c.distance_correct = p.near == (*s.radial_distance <= distance_threshold);
    }
    out.push_back(c);
  }
  return tabulate(kDetectorMethod, out);
}

Report loocv(Dataset& dataset, const LoocvOptions& options) {
  const std::vector<FoldPlan> folds = plan_folds(dataset.manifest().rooms());
  validate(dataset.manifest());
  validate(options.geometry);
  Report report;
  report.kind = "loocv";
  report.seed = options.train.seed;
  TrainingFeatureCache cache(dataset, options.train);

  for (const FoldPlan& fold : folds) {
    if (options.log) options.log("fold " + fold.held_out_room + ": training");
    const auto train_idx = dataset.indices_excluding(fold.held_out_room);
    const auto test_idx = dataset.indices_in_room(fold.held_out_room);

    dataset.audit().reset();
    TrainResult trained =
        train(dataset, train_idx, options.train, &cache,
              [&](const EpochLog& e) {
                if (options.log) options.log("  " + format_epoch(e));
              });
    FoldReport f;
    f.held_out_room = fold.held_out_room;
    f.train_samples = train_idx.size();
    f.test_samples = test_idx.size();
    f.held_out_reads_during_training =
        dataset.audit().reads(fold.held_out_room);
    f.w_backsub = trained.model.w_backsub();
    trained.model.geometry_hash = geometry_hash(options.geometry);

    if (options.log) options.log("fold " + fold.held_out_room + ": testing");
    const std::vector<Prediction> preds =
        predict_samples(trained.model, dataset, test_idx);
    f.methods.push_back(detector_table(dataset, test_idx, preds,
                                       options.train.distance_threshold));
    if (options.baselines) {
      for (MetricsTable& t :
           evaluate_baselines(dataset, test_idx, options.geometry)) {
        f.methods.push_back(std::move(t));
      }
    }
    report.folds.push_back(std::move(f));
  }

  for (std::size_t m = 0; m < report.folds[0].methods.size(); ++m) {
    std::vector<const MetricsTable*> per_fold;
    for (const FoldReport& f : report.folds) per_fold.push_back(&f.methods[m]);
    report.aggregate.push_back(
        mean_tables(report.folds[0].methods[m].method, per_fold));
  }
  return report;
}

}  // namespace footfall
