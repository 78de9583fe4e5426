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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "footfall/features.hpp"
#include "footfall/geometry.hpp"
#include "footfall/manifest.hpp"

namespace footfall {

inline constexpr int kNumHeads = 4;
enum Head { kHeadSin = 0, kHeadCos = 1, kHeadDistance = 2, kHeadPresence = 3 };

inline constexpr double kDefaultDistanceThreshold = 1.7;

struct DetectorDims {
  int input = kFeatureDim;
  int hidden1 = 256;
  int hidden2 = 128;

  std::size_t parameter_count() const;
  friend bool operator==(const DetectorDims&, const DetectorDims&) = default;
};

// Contiguous slice of the flat parameter vector.
struct ParameterGroup {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

// Feature encoder (two ReLU layers) and four linear heads, plus the learned
// background-subtraction weight. All parameters live in one flat vector:
//   [w_backsub | W1 | b1 | W2 | b2 | Wh | bh]
// with matrices stored column-major (Eigen default).
class DetectorModel {
 public:
  DetectorModel() : DetectorModel(DetectorDims{}) {}
  explicit DetectorModel(const DetectorDims& dims);

  // He-initialized hidden layers, small random heads, w_backsub = w_init.
  static DetectorModel initialize(const DetectorDims& dims, std::uint64_t seed,
                                  double w_backsub_init = 0.5);

  const DetectorDims& dims() const { return dims_; }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::vector<ParameterGroup> groups() const;

  double w_backsub() const { return params_[0]; }
  void set_w_backsub(double w) { params_[0] = w; }

  using MatMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
  using VecMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

  ConstMatMap w1() const;
  ConstVecMap b1() const;
  ConstMatMap w2() const;
  ConstVecMap b2() const;
  ConstMatMap wh() const;
  ConstVecMap bh() const;

  // Fixed input standardization (x - mean) * inv_scale, fitted on the
  // training features and not trained. Identity by default.
  std::vector<double> input_mean;
  std::vector<double> input_inv_scale;
  void fit_standardization(const Eigen::MatrixXd& features);

  double distance_threshold = kDefaultDistanceThreshold;
  int panorama_width = kPanoramaWidth;
  std::uint64_t geometry_hash = 0;

  friend bool operator==(const DetectorModel& a, const DetectorModel& b) {
    return a.dims_ == b.dims_ && a.params_ == b.params_ &&
           a.input_mean == b.input_mean &&
           a.input_inv_scale == b.input_inv_scale &&
           a.distance_threshold == b.distance_threshold &&
           a.panorama_width == b.panorama_width &&
           a.geometry_hash == b.geometry_hash;
  }

 private:
  DetectorDims dims_;
  std::vector<double> params_;
};

struct Predictions {
  double sin_raw = 0.0;
  double cos_raw = 0.0;
  double sin_value = 0.0;  // clamped to [-1, 1]
  double cos_value = 0.0;
  double x_hat = 0.0;      // decoded pixel in [0, W)
  bool degenerate = false; // both components vanished; x_hat is 0
  double distance_logit = 0.0;
  double presence_logit = 0.0;
  double distance_prob = 0.5;  // P(within the distance threshold)
  double presence_prob = 0.5;

  double angle_deg(int width = kPanoramaWidth) const {
    return pixel_to_degrees(x_hat, width);
  }
};

// Targets for one sample, derived from a LabeledSample.
struct TrainingLabel {
  bool presence = false;
  double azimuth_x = 0.0;
  bool near = false;
};

TrainingLabel make_label(const LabeledSample& s, double distance_threshold);

struct LossWeights {
  double angle = 1.0 / kPanoramaWidth;
  double distance = 1.0;
  double presence = 1.0;
};

struct LossBreakdown {
  double total = 0.0;
  double angle = 0.0;     // circular L1 in pixels, 0 for empty samples
  double distance = 0.0;  // BCE, 0 for empty samples
  double presence = 0.0;  // BCE
};

// Raw head outputs for a batch of feature columns (kFeatureDim x B).
struct ForwardCache {
  Eigen::MatrixXd input;    // standardized
  Eigen::MatrixXd hidden1;  // post-ReLU
  Eigen::MatrixXd hidden2;
  Eigen::MatrixXd heads;    // kNumHeads x B
};

ForwardCache forward_batch(const DetectorModel& model,
                           const Eigen::MatrixXd& features);
Predictions decode_heads(const Eigen::Ref<const Eigen::VectorXd>& heads,
                         int width = kPanoramaWidth);

// Single-sample forward; throws kDimensionMismatch on a wrong feature size.
Predictions forward(const DetectorModel& model, std::span<const double> features);

LossBreakdown multitask_loss(const Predictions& pred, const TrainingLabel& label,
                             const LossWeights& weights,
                             int width = kPanoramaWidth);

// Gradient of the mean batch loss. `d_energy_dw` holds, per sample column,
// the derivative of each energy feature with respect to w_backsub
// (kEnergyFeatures x B); pass an empty matrix to skip the w_backsub term.
struct BatchResult {
  LossBreakdown mean_loss;
  std::vector<double> gradient;  // same layout as the parameters
};

BatchResult loss_and_gradient(const DetectorModel& model,
                              const Eigen::MatrixXd& features,
                              const Eigen::MatrixXd& d_energy_dw,
                              std::span<const TrainingLabel> labels,
                              const LossWeights& weights);

// Single-sample convenience wrapper around loss_and_gradient.
std::vector<double> backward(const DetectorModel& model,
                             const FeatureVector& features,
                             std::span<const double> d_energy_dw,
                             const TrainingLabel& label,
                             const LossWeights& weights);

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;  // the "momentum" setting
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-3;  // L2 term added to the gradient
};

class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t n_params, const AdamConfig& config);
  // Applies one update and clamps w_backsub back into [0, 1].
  void step(DetectorModel& model, std::span<const double> gradient);
  long steps() const { return step_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  long step_ = 0;
};

// Versioned binary checkpoint: header (dims, threshold, W, geometry hash)
// followed by the flat float64 parameter array and the input standardization.
void save_checkpoint(const std::filesystem::path& path,
                     const DetectorModel& model);
DetectorModel load_checkpoint(const std::filesystem::path& path);

}  // namespace footfall
