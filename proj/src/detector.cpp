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

#include "footfall/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

#include "footfall/error.hpp"

namespace footfall {

namespace {

// Column-ordered sums, so the rounding never depends on how Eigen peels a
// vectorized reduction for a given buffer address.
Eigen::VectorXd row_sums(const Eigen::MatrixXd& m) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) s += m.col(j);
  return s;
}

double ordered_sum(const Eigen::VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += v(i);
  return s;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// -[y log σ(z) + (1 - y) log(1 - σ(z))], evaluated from the logit.
double bce_with_logit(double z, bool y) {
  const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  return softplus - (y ? z : 0.0);
}

struct Layout {
  std::size_t w1, b1, w2, b2, wh, bh, end;
};

Layout layout_of(const DetectorDims& d) {
  Layout l{};
  l.w1 = 1;
  l.b1 = l.w1 + static_cast<std::size_t>(d.hidden1) * d.input;
  l.w2 = l.b1 + d.hidden1;
  l.b2 = l.w2 + static_cast<std::size_t>(d.hidden2) * d.hidden1;
  l.wh = l.b2 + d.hidden2;
  l.bh = l.wh + static_cast<std::size_t>(kNumHeads) * d.hidden2;
  l.end = l.bh + kNumHeads;
  return l;
}

double signed_pixel_difference(double a, double b, int width) {
  double d = a - b;
  d -= width * std::round(d / width);
  return d;
}

}  // namespace

std::size_t DetectorDims::parameter_count() const {
  return layout_of(*this).end;
}

DetectorModel::DetectorModel(const DetectorDims& dims)
    : input_mean(dims.input, 0.0),
      input_inv_scale(dims.input, 1.0),
      dims_(dims),
      params_(dims.parameter_count(), 0.0) {}

void DetectorModel::fit_standardization(const Eigen::MatrixXd& features) {
  if (features.rows() != dims_.input || features.cols() < 2) {
    throw Error(Errc::kDimensionMismatch, "standardization needs >= 2 columns");
  }
  const double n = static_cast<double>(features.cols());
  const Eigen::VectorXd mean = row_sums(features) / n;
  const Eigen::VectorXd var =
      row_sums((features.colwise() - mean).array().square().matrix()) / n;
  for (int i = 0; i < dims_.input; ++i) {
    input_mean[i] = mean(i);
    input_inv_scale[i] = 1.0 / std::sqrt(var(i) + 1e-6);
  }
}

DetectorModel DetectorModel::initialize(const DetectorDims& dims,
                                        std::uint64_t seed,
                                        double w_backsub_init) {
  DetectorModel m(dims);
  const Layout l = layout_of(dims);
  std::mt19937_64 rng(seed);
  auto fill = [&](std::size_t from, std::size_t to, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (std::size_t i = from; i < to; ++i) m.params_[i] = dist(rng);
  };
  fill(l.w1, l.b1, std::sqrt(2.0 / dims.input));
  fill(l.w2, l.b2, std::sqrt(2.0 / dims.hidden1));
  fill(l.wh, l.bh, 0.1 * std::sqrt(1.0 / dims.hidden2));
  m.params_[0] = std::clamp(w_backsub_init, 0.0, 1.0);
  return m;
}

std::vector<ParameterGroup> DetectorModel::groups() const {
  const Layout l = layout_of(dims_);
  return {{"w_backsub", 0, 1},          {"encoder.w1", l.w1, l.b1 - l.w1},
          {"encoder.b1", l.b1, l.w2 - l.b1}, {"encoder.w2", l.w2, l.b2 - l.w2},
          {"encoder.b2", l.b2, l.wh - l.b2}, {"heads.w", l.wh, l.bh - l.wh},
          {"heads.b", l.bh, l.end - l.bh}};
}

DetectorModel::ConstMatMap DetectorModel::w1() const {
  return {params_.data() + layout_of(dims_).w1, dims_.hidden1, dims_.input};
}
DetectorModel::ConstVecMap DetectorModel::b1() const {
  return {params_.data() + layout_of(dims_).b1, dims_.hidden1};
}
DetectorModel::ConstMatMap DetectorModel::w2() const {
  return {params_.data() + layout_of(dims_).w2, dims_.hidden2, dims_.hidden1};
}
DetectorModel::ConstVecMap DetectorModel::b2() const {
  return {params_.data() + layout_of(dims_).b2, dims_.hidden2};
}
DetectorModel::ConstMatMap DetectorModel::wh() const {
  return {params_.data() + layout_of(dims_).wh, kNumHeads, dims_.hidden2};
}
DetectorModel::ConstVecMap DetectorModel::bh() const {
  return {params_.data() + layout_of(dims_).bh, kNumHeads};
}

TrainingLabel make_label(const LabeledSample& s, double distance_threshold) {
  validate(s);
  TrainingLabel t;
  t.presence = s.presence;
  if (s.presence) {
    t.azimuth_x = *s.azimuth_x;
    t.near = *s.radial_distance <= distance_threshold;
  }
  return t;
}

ForwardCache forward_batch(const DetectorModel& model,
                           const Eigen::MatrixXd& features) {
  if (features.rows() != model.dims().input) {
    throw Error(Errc::kDimensionMismatch,
                "features have " + std::to_string(features.rows()) +
                    " rows, model expects " +
                    std::to_string(model.dims().input));
  }
  ForwardCache c;
  const Eigen::Map<const Eigen::VectorXd> mean(model.input_mean.data(),
                                               model.dims().input);
  const Eigen::Map<const Eigen::VectorXd> inv(model.input_inv_scale.data(),
                                              model.dims().input);
  c.input = (features.colwise() - mean).array().colwise() * inv.array();
  c.hidden1.noalias() = model.w1() * c.input;
  c.hidden1.colwise() += model.b1();
  c.hidden1 = c.hidden1.cwiseMax(0.0);
  c.hidden2.noalias() = model.w2() * c.hidden1;
  c.hidden2.colwise() += model.b2();
  c.hidden2 = c.hidden2.cwiseMax(0.0);
  c.heads.noalias() = model.wh() * c.hidden2;
  c.heads.colwise() += model.bh();
  return c;
}

Predictions decode_heads(const Eigen::Ref<const Eigen::VectorXd>& heads,
                         int width) {
  Predictions p;
  p.sin_raw = heads(kHeadSin);
  p.cos_raw = heads(kHeadCos);
  p.sin_value = std::clamp(p.sin_raw, -1.0, 1.0);
  p.cos_value = std::clamp(p.cos_raw, -1.0, 1.0);
  try {
    p.x_hat = decode_cyclic(p.sin_value, p.cos_value, width);
  } catch (const Error&) {
    p.degenerate = true;
    p.x_hat = 0.0;
  }
  p.distance_logit = heads(kHeadDistance);
  p.presence_logit = heads(kHeadPresence);
  p.distance_prob = sigmoid(p.distance_logit);
  p.presence_prob = sigmoid(p.presence_logit);
  return p;
}

Predictions forward(const DetectorModel& model,
                    std::span<const double> features) {
  if (static_cast<int>(features.size()) != model.dims().input) {
    throw Error(Errc::kDimensionMismatch, "feature vector size");
  }
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::MatrixXd>(
      features.data(), model.dims().input, 1);
  const ForwardCache c = forward_batch(model, x);
  return decode_heads(c.heads.col(0), model.panorama_width);
}

LossBreakdown multitask_loss(const Predictions& pred,
                             const TrainingLabel& label,
                             const LossWeights& weights, int width) {
  if (label.presence && !(label.azimuth_x >= 0.0 && label.azimuth_x < width)) {
    throw Error(Errc::kMalformedLabel, "azimuth label outside the panorama");
  }
  LossBreakdown l;
  if (label.presence) {
    l.angle = circular_pixel_error(pred.x_hat, label.azimuth_x, width);
    l.distance = bce_with_logit(pred.distance_logit, label.near);
  }
  l.presence = bce_with_logit(pred.presence_logit, label.presence);
  l.total = weights.angle * l.angle + weights.distance * l.distance +
            weights.presence * l.presence;
  return l;
}

BatchResult loss_and_gradient(const DetectorModel& model,
                              const Eigen::MatrixXd& features,
                              const Eigen::MatrixXd& d_energy_dw,
                              std::span<const TrainingLabel> labels,
                              const LossWeights& weights) {
  const auto batch = static_cast<Eigen::Index>(labels.size());
  if (features.cols() != batch || batch == 0) {
    throw Error(Errc::kDimensionMismatch, "batch size mismatch");
  }
  const bool with_w = d_energy_dw.size() > 0;
  if (with_w && (d_energy_dw.rows() != kEnergyFeatures ||
                 d_energy_dw.cols() != batch ||
                 model.dims().input != kFeatureDim)) {
    throw Error(Errc::kDimensionMismatch, "w_backsub derivative shape");
  }
  const int width = model.panorama_width;
  const ForwardCache c = forward_batch(model, features);
  const double inv_b = 1.0 / static_cast<double>(batch);

  BatchResult out;
  Eigen::MatrixXd d_heads = Eigen::MatrixXd::Zero(kNumHeads, batch);
  for (Eigen::Index j = 0; j < batch; ++j) {
    const Predictions p = decode_heads(c.heads.col(j), width);
    const TrainingLabel& y = labels[j];
    const LossBreakdown l = multitask_loss(p, y, weights, width);
    out.mean_loss.total += l.total * inv_b;
    out.mean_loss.angle += l.angle * inv_b;
    out.mean_loss.distance += l.distance * inv_b;
    out.mean_loss.presence += l.presence * inv_b;

    d_heads(kHeadPresence, j) =
        weights.presence * (p.presence_prob - (y.presence ? 1.0 : 0.0));
    if (!y.presence) continue;
    d_heads(kHeadDistance, j) =
        weights.distance * (p.distance_prob - (y.near ? 1.0 : 0.0));
    if (p.degenerate) continue;
    const double diff = signed_pixel_difference(p.x_hat, y.azimuth_x, width);
    const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    const double r2 = p.sin_value * p.sin_value + p.cos_value * p.cos_value;
    const double g =
        weights.angle * sgn * width / (2.0 * std::numbers::pi) / r2;
    const bool sin_active = p.sin_raw > -1.0 && p.sin_raw < 1.0;
    const bool cos_active = p.cos_raw > -1.0 && p.cos_raw < 1.0;
    d_heads(kHeadSin, j) = sin_active ? g * p.cos_value : 0.0;
    d_heads(kHeadCos, j) = cos_active ? -g * p.sin_value : 0.0;
  }
  d_heads *= inv_b;

  const Layout lay = layout_of(model.dims());
  out.gradient.assign(lay.end, 0.0);
  auto mat = [&](std::size_t off, Eigen::Index r, Eigen::Index k) {
    return Eigen::Map<Eigen::MatrixXd>(out.gradient.data() + off, r, k);
  };
  auto vec = [&](std::size_t off, Eigen::Index r) {
    return Eigen::Map<Eigen::VectorXd>(out.gradient.data() + off, r);
  };
  const auto& dims = model.dims();

  mat(lay.wh, kNumHeads, dims.hidden2).noalias() =
      d_heads * c.hidden2.transpose();
  vec(lay.bh, kNumHeads) = row_sums(d_heads);

  Eigen::MatrixXd d_h2 = model.wh().transpose() * d_heads;
  d_h2 = d_h2.cwiseProduct((c.hidden2.array() > 0.0).cast<double>().matrix());
  mat(lay.w2, dims.hidden2, dims.hidden1).noalias() =
      d_h2 * c.hidden1.transpose();
  vec(lay.b2, dims.hidden2) = row_sums(d_h2);

  Eigen::MatrixXd d_h1 = model.w2().transpose() * d_h2;
  d_h1 = d_h1.cwiseProduct((c.hidden1.array() > 0.0).cast<double>().matrix());
  mat(lay.w1, dims.hidden1, dims.input).noalias() =
      d_h1 * c.input.transpose();
  vec(lay.b1, dims.hidden1) = row_sums(d_h1);

  if (with_w) {
    const Eigen::Map<const Eigen::VectorXd> inv(
        model.input_inv_scale.data() + kGccFeatures, kEnergyFeatures);
    const Eigen::MatrixXd d_energy =
        ((model.w1().rightCols(kEnergyFeatures).transpose() * d_h1)
             .array()
             .colwise() *
         inv.array())
            .matrix();
    out.gradient[0] = ordered_sum(row_sums(d_energy.cwiseProduct(d_energy_dw)));
  }
  return out;
}

std::vector<double> backward(const DetectorModel& model,
                             const FeatureVector& features,
                             std::span<const double> d_energy_dw,
                             const TrainingLabel& label,
                             const LossWeights& weights) {
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::MatrixXd>(
      features.values.data(), kFeatureDim, 1);
  Eigen::MatrixXd dw;
  if (!d_energy_dw.empty()) {
    dw = Eigen::Map<const Eigen::MatrixXd>(d_energy_dw.data(), kEnergyFeatures,
                                           1);
  }
  return loss_and_gradient(model, x, dw, std::span(&label, 1), weights)
      .gradient;
}

AdamOptimizer::AdamOptimizer(std::size_t n_params, const AdamConfig& config)
    : config_(config), m_(n_params, 0.0), v_(n_params, 0.0) {}

void AdamOptimizer::step(DetectorModel& model,
                         std::span<const double> gradient) {
  auto params = model.parameters();
  if (gradient.size() != params.size() || m_.size() != params.size()) {
    throw Error(Errc::kDimensionMismatch, "gradient size");
  }
  ++step_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double lr = config_.learning_rate;
  const double wd = config_.weight_decay;
  const double eps = config_.epsilon;
  const std::size_t n = params.size();
#pragma omp parallel for simd schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    const double g = gradient[i] + wd * params[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps);
  }
  model.set_w_backsub(std::clamp(model.w_backsub(), 0.0, 1.0));
}

namespace {

constexpr char kCheckpointMagic[8] = {'F', 'F', 'D', 'E', 'T', 'C', 'K', 'P'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw Error(Errc::kMalformedFile, "truncated checkpoint header");
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path,
                     const DetectorModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoFailure, "cannot write " + path.string());
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.dims().input));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.dims().hidden1));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.dims().hidden2));
  put<double>(out, model.distance_threshold);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.panorama_width));
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, model.geometry_hash);
  const auto params = model.parameters();
  put<std::uint64_t>(out, params.size());
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
  for (const auto* v : {&model.input_mean, &model.input_inv_scale}) {
    out.write(reinterpret_cast<const char*>(v->data()),
              static_cast<std::streamsize>(v->size() * sizeof(double)));
  }
  if (!out) throw Error(Errc::kIoFailure, "short write to " + path.string());
}

DetectorModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoFailure, "cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw Error(Errc::kMalformedFile, path.string() + ": not a checkpoint");
  }
  if (get<std::uint32_t>(in) != kCheckpointVersion) {
    throw Error(Errc::kMalformedFile, path.string() + ": unknown version");
  }
  DetectorDims dims;
  dims.input = static_cast<int>(get<std::uint32_t>(in));
  dims.hidden1 = static_cast<int>(get<std::uint32_t>(in));
  dims.hidden2 = static_cast<int>(get<std::uint32_t>(in));
  if (dims.input <= 0 || dims.hidden1 <= 0 || dims.hidden2 <= 0 ||
      dims.input > (1 << 20) || dims.hidden1 > (1 << 16) ||
      dims.hidden2 > (1 << 16)) {
    throw Error(Errc::kMalformedFile, path.string() + ": bad dimensions");
  }
  DetectorModel model(dims);
  model.distance_threshold = get<double>(in);
  model.panorama_width = static_cast<int>(get<std::uint32_t>(in));
  get<std::uint32_t>(in);
  model.geometry_hash = get<std::uint64_t>(in);
  const auto n = get<std::uint64_t>(in);
  if (n != dims.parameter_count()) {
    throw Error(Errc::kMalformedFile, path.string() + ": parameter count");
  }
  auto params = model.parameters();
  if (!in.read(reinterpret_cast<char*>(params.data()),
               static_cast<std::streamsize>(n * sizeof(double)))) {
    throw Error(Errc::kMalformedFile, path.string() + ": truncated parameters");
  }
  for (auto* v : {&model.input_mean, &model.input_inv_scale}) {
    if (!in.read(reinterpret_cast<char*>(v->data()),
                 static_cast<std::streamsize>(v->size() * sizeof(double)))) {
      throw Error(Errc::kMalformedFile,
                  path.string() + ": truncated standardization");
    }
  }
  return model;
}

}  // namespace footfall
