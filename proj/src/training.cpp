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

#include "footfall/training.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <random>

#include "footfall/error.hpp"
#include "footfall/geometry.hpp"
#include "footfall/kernels.hpp"

namespace footfall {

namespace {

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void fill_column(const CachedFeatures& f, double w, double* x, double* d) {
  std::copy(f.gcc.begin(), f.gcc.end(), x);
  f.energy_at(w, {x + kGccFeatures, kEnergyFeatures},
              d == nullptr ? std::span<double>{}
                           : std::span<double>(d, kEnergyFeatures));
}

// Runs body(k) for k in [0, n) with OpenMP and rethrows the first failure.
template <typename F>
void parallel_for(std::size_t n, F&& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < n; ++k) {
    try {
      body(k);
    } catch (...) {
#pragma omp critical(footfall_training_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

TrainConfig TrainConfig::from_config(const KeyValueConfig& c) {
  TrainConfig t;
  t.epochs = static_cast<int>(c.get_int("train.epochs", t.epochs));
  t.batch_size = static_cast<int>(c.get_int("train.batch_size", t.batch_size));
  t.adam.learning_rate =
      c.get_double("train.learning_rate", t.adam.learning_rate);
  t.adam.beta1 = c.get_double("train.beta1", t.adam.beta1);
  t.adam.beta2 = c.get_double("train.beta2", t.adam.beta2);
  t.adam.epsilon = c.get_double("train.epsilon", t.adam.epsilon);
  t.adam.weight_decay = c.get_double("train.weight_decay", t.adam.weight_decay);
  t.w_backsub_init = c.get_double("train.w_backsub_init", t.w_backsub_init);
  t.train_w_backsub = c.get_bool("train.train_w_backsub", t.train_w_backsub);
  t.distance_threshold =
      c.get_double("train.distance_threshold", t.distance_threshold);
  t.validation_fraction =
      c.get_double("train.validation_fraction", t.validation_fraction);
  t.seed = static_cast<std::uint64_t>(c.get_int("train.seed", 1));
  t.dims.hidden1 = static_cast<int>(c.get_int("train.hidden1", t.dims.hidden1));
  t.dims.hidden2 = static_cast<int>(c.get_int("train.hidden2", t.dims.hidden2));
  t.energy_knots =
      static_cast<int>(c.get_int("train.energy_knots", t.energy_knots));
  t.loss.angle = c.get_double("train.lambda_angle", t.loss.angle);
  t.loss.distance = c.get_double("train.lambda_distance", t.loss.distance);
  t.loss.presence = c.get_double("train.lambda_presence", t.loss.presence);
  t.augmentation = c.get_bool("augment.enabled", t.augmentation);
  t.w_aug = c.get_double("augment.w_aug", t.w_aug);

  auto bad = [](const std::string& what) {
    throw Error(Errc::kInvalidConfig, what);
  };
  if (t.epochs < 0) bad("train.epochs must be >= 0");
  if (t.batch_size < 1) bad("train.batch_size must be >= 1");
  if (t.adam.learning_rate < 0.0) bad("train.learning_rate must be >= 0");
  if (!(t.adam.beta1 >= 0.0 && t.adam.beta1 < 1.0)) bad("train.beta1");
  if (!(t.adam.beta2 >= 0.0 && t.adam.beta2 < 1.0)) bad("train.beta2");
  if (!(t.w_backsub_init >= 0.0 && t.w_backsub_init <= 1.0)) {
    bad("train.w_backsub_init must lie in [0, 1]");
  }
  if (!(t.w_aug >= 0.0 && t.w_aug <= 1.0)) bad("augment.w_aug in [0, 1]");
  if (!(t.validation_fraction >= 0.0 && t.validation_fraction < 1.0)) {
    bad("train.validation_fraction must lie in [0, 1)");
  }
  if (t.dims.hidden1 < 1 || t.dims.hidden2 < 1) bad("hidden sizes");
  if (t.energy_knots < 2) bad("train.energy_knots must be >= 2");
  if (!(t.distance_threshold > 0.0)) bad("train.distance_threshold");
  return t;
}

KeyValueConfig TrainConfig::to_config() const {
  KeyValueConfig c;
  c.set("train.epochs", std::to_string(epochs));
  c.set("train.batch_size", std::to_string(batch_size));
  c.set("train.learning_rate", num(adam.learning_rate));
  c.set("train.beta1", num(adam.beta1));
  c.set("train.beta2", num(adam.beta2));
  c.set("train.epsilon", num(adam.epsilon));
  c.set("train.weight_decay", num(adam.weight_decay));
  c.set("train.w_backsub_init", num(w_backsub_init));
  c.set("train.train_w_backsub", train_w_backsub ? "true" : "false");
  c.set("train.distance_threshold", num(distance_threshold));
  c.set("train.validation_fraction", num(validation_fraction));
  c.set("train.seed", std::to_string(seed));
  c.set("train.hidden1", std::to_string(dims.hidden1));
  c.set("train.hidden2", std::to_string(dims.hidden2));
  c.set("train.energy_knots", std::to_string(energy_knots));
  c.set("train.lambda_angle", num(loss.angle));
  c.set("train.lambda_distance", num(loss.distance));
  c.set("train.lambda_presence", num(loss.presence));
  c.set("augment.enabled", augmentation ? "true" : "false");
  c.set("augment.w_aug", num(w_aug));
  return c;
}

TrainingFeatureCache::TrainingFeatureCache(Dataset& dataset,
                                           const TrainConfig& config)
    : dataset_(dataset),
      seed_(config.seed),
      augmentation_(config.augmentation),
      w_aug_(config.w_aug),
      knots_(config.energy_knots) {}

std::size_t TrainingFeatureCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

CachedFeatures TrainingFeatureCache::build(std::size_t i) {
  MultiChannelClip clip = dataset_.clip(i);
  const EmptyRoomProfile& natural = dataset_.profile_for(i);
  if (augmentation_) {
    const AugmentationPool& pool = dataset_.augmentation_pool();
    if (!pool.empty()) {
      const AugmentationRecord rec =
          draw_augmentation(pool, seed_, 0, i, w_aug_);
      AugmentedInput mixed = apply_augmentation(rec, clip, natural, pool);
      return cache_features(analyze_clip(mixed.clip), mixed.profile, knots_);
    }
  }
  return cache_features(analyze_clip(clip), natural, knots_);
}

const CachedFeatures& TrainingFeatureCache::get(std::size_t i) {
  {
    std::lock_guard lock(mu_);
    auto it = entries_.find(i);
    if (it != entries_.end()) {
      dataset_.audit().record(dataset_.sample(i).room_id);
      return *it->second;
    }
  }
  auto entry = std::make_unique<const CachedFeatures>(build(i));
  std::lock_guard lock(mu_);
  auto [it, inserted] = entries_.emplace(i, std::move(entry));
  return *it->second;
}

void TrainingFeatureCache::prefetch(std::span<const std::size_t> indices) {
  std::vector<std::size_t> missing;
  {
    std::lock_guard lock(mu_);
    for (std::size_t i : indices) {
      if (entries_.find(i) == entries_.end()) missing.push_back(i);
    }
  }
  // Touch profiles and the pool serially so the parallel loop only reads.
  for (std::size_t i : missing) dataset_.profile_for(i);
  if (augmentation_ && !missing.empty()) dataset_.augmentation_pool();
  parallel_for(missing.size(), [&](std::size_t k) { get(missing[k]); });
}

std::string format_epoch(const EpochLog& e) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "epoch %d loss %.5f angle_px %.2f distance %.4f presence %.4f "
                "w_backsub %.4f",
                e.epoch, e.train_loss.total, e.train_loss.angle,
                e.train_loss.distance, e.train_loss.presence, e.w_backsub);
  std::string out = buf;
  if (e.validation) {
    std::snprintf(buf, sizeof(buf),
                  " val_mae_deg %.2f val_distance_acc %.3f val_presence_acc "
                  "%.3f",
                  e.validation->angle_mae_deg, e.validation->distance.accuracy(),
                  e.validation->presence.accuracy());
    out += buf;
  }
  return out;
}

EvalSummary summarize(std::span<const Prediction> predictions,
                      std::span<const LabeledSample* const> samples,
                      double distance_threshold) {
  if (predictions.size() != samples.size()) {
    throw Error(Errc::kDimensionMismatch, "predictions vs samples");
  }
  EvalSummary s;
  double err_sum = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const LabeledSample& y = *samples[k];
    const Prediction& p = predictions[k];
    ++s.presence.total;
    if (p.presence == y.presence) ++s.presence.correct;
    if (!y.presence) continue;
    err_sum += circular_error(p.angle_deg, pixel_to_degrees(*y.azimuth_x));
    ++s.angle_count;
    ++s.distance.total;
    if (p.near == (*y.radial_distance <= distance_threshold)) {
      ++s.distance.correct;
    }
  }
  s.angle_mae_deg = s.angle_count == 0 ? 0.0 : err_sum / s.angle_count;
  return s;
}

namespace {

Prediction to_prediction(const Predictions& raw, int width) {
  Prediction p;
  p.raw = raw;
  p.angle_deg = raw.angle_deg(width);
  p.near = raw.distance_prob > 0.5;
  p.presence = raw.presence_prob > 0.5;
  return p;
}

EvalSummary validate_cached(const DetectorModel& model,
                            TrainingFeatureCache& cache, Dataset& dataset,
                            std::span<const std::size_t> indices) {
  const int dim = model.dims().input;
  Eigen::MatrixXd x(dim, static_cast<Eigen::Index>(indices.size()));
  std::vector<const LabeledSample*> samples;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    fill_column(cache.get(indices[k]), model.w_backsub(), x.col(k).data(),
                nullptr);
    samples.push_back(&dataset.sample(indices[k]));
  }
  const ForwardCache fc = forward_batch(model, x);
  std::vector<Prediction> preds;
  for (Eigen::Index k = 0; k < fc.heads.cols(); ++k) {
    preds.push_back(to_prediction(decode_heads(fc.heads.col(k),
                                               model.panorama_width),
                                  model.panorama_width));
  }
  return summarize(preds, samples, model.distance_threshold);
}

}  // namespace

TrainResult train(Dataset& dataset, std::span<const std::size_t> indices,
                  const TrainConfig& config, TrainingFeatureCache* cache,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  if (indices.empty()) {
    throw Error(Errc::kEmptyDataset, "no training samples");
  }
  if (std::none_of(indices.begin(), indices.end(), [&](std::size_t i) {
        return !dataset.sample(i).presence;
      })) {
    throw Error(Errc::kNoEmptySamples,
                "training set has no empty-room samples");
  }
  if (config.dims.input != kFeatureDim) {
    throw Error(Errc::kDimensionMismatch, "detector input must be 1408");
  }

  std::vector<std::size_t> train_idx(indices.begin(), indices.end());
  std::vector<std::size_t> val_idx;
  if (config.validation_fraction > 0.0) {
    std::mt19937_64 rng(mix_seed(config.seed, 0x76616c));
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    const auto n_val = static_cast<std::size_t>(
        std::floor(config.validation_fraction * train_idx.size()));
    val_idx.assign(train_idx.begin(), train_idx.begin() + n_val);
    train_idx.erase(train_idx.begin(), train_idx.begin() + n_val);
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
    if (train_idx.empty()) {
      throw Error(Errc::kEmptyDataset, "validation split left no samples");
    }
  }

  std::unique_ptr<TrainingFeatureCache> own_cache;
  if (cache == nullptr) {
    own_cache = std::make_unique<TrainingFeatureCache>(dataset, config);
    cache = own_cache.get();
  }
  cache->prefetch(train_idx);
  std::unique_ptr<TrainingFeatureCache> val_cache;
  if (!val_idx.empty()) {
    TrainConfig plain = config;
    plain.augmentation = false;
    val_cache = std::make_unique<TrainingFeatureCache>(dataset, plain);
    val_cache->prefetch(val_idx);
  }

  std::vector<TrainingLabel> labels;
  labels.reserve(train_idx.size());
  for (std::size_t i : train_idx) {
    labels.push_back(make_label(dataset.sample(i), config.distance_threshold));
  }

  TrainResult result;
  DetectorModel& model = result.model;
  model = DetectorModel::initialize(config.dims, mix_seed(config.seed, 1),
                                    config.w_backsub_init);
  model.distance_threshold = config.distance_threshold;

  {
    Eigen::MatrixXd all(kFeatureDim, static_cast<Eigen::Index>(train_idx.size()));
    for (std::size_t k = 0; k < train_idx.size(); ++k) {
      fill_column(cache->get(train_idx[k]), model.w_backsub(),
                  all.col(k).data(), nullptr);
    }
    if (all.cols() >= 2) model.fit_standardization(all);
  }

  AdamOptimizer adam(model.parameters().size(), config.adam);
  std::vector<std::size_t> order(train_idx.size());
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::mt19937_64 rng(mix_seed(config.seed, 1000 + epoch));
    std::shuffle(order.begin(), order.end(), rng);

    EpochLog log;
    log.epoch = epoch;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t n = std::min(batch, order.size() - start);
      Eigen::MatrixXd x(kFeatureDim, static_cast<Eigen::Index>(n));
      Eigen::MatrixXd d;
      if (config.train_w_backsub) d.resize(kEnergyFeatures, n);
      std::vector<TrainingLabel> y(n);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t pos = order[start + k];
        fill_column(cache->get(train_idx[pos]), model.w_backsub(),
                    x.col(k).data(),
                    config.train_w_backsub ? d.col(k).data() : nullptr);
        y[k] = labels[pos];
      }
      BatchResult r = loss_and_gradient(model, x, d, y, config.loss);
      const double w_before = model.w_backsub();
      adam.step(model, r.gradient);
      // Weight decay would still move a frozen weight.
      if (!config.train_w_backsub) model.set_w_backsub(w_before);
      const double share = static_cast<double>(n) / order.size();
      log.train_loss.total += r.mean_loss.total * share;
      log.train_loss.angle += r.mean_loss.angle * share;
      log.train_loss.distance += r.mean_loss.distance * share;
      log.train_loss.presence += r.mean_loss.presence * share;
    }
    log.w_backsub = model.w_backsub();
    if (val_cache) {
      log.validation = validate_cached(model, *val_cache, dataset, val_idx);
    }
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return result;
}

Prediction predict(const DetectorModel& model, const MultiChannelClip& clip,
                   const EmptyRoomProfile& profile) {
  const FeatureVector f = extract_features(clip, profile, model.w_backsub());
  return to_prediction(forward(model, f.values), model.panorama_width);
}

std::vector<Prediction> predict_samples(const DetectorModel& model,
                                        Dataset& dataset,
                                        std::span<const std::size_t> indices) {
  for (std::size_t i : indices) dataset.profile_for(i);
  std::vector<Prediction> out(indices.size());
  parallel_for(indices.size(), [&](std::size_t k) {
    const std::size_t i = indices[k];
    out[k] = predict(model, dataset.clip(i), dataset.profile_for(i));
  });
  return out;
}

namespace {

struct GradcheckInputs {
  std::vector<ClipAnalysis> analyses;
  EmptyRoomProfile profile;
  std::vector<TrainingLabel> labels;
};

MultiChannelClip noise_clip(std::mt19937_64& rng, double seconds,
                            double shared, int delay_step) {
  const auto n = static_cast<std::size_t>(seconds * kSampleRate);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> common(n + 64);
  for (double& v : common) v = gauss(rng);
  MultiChannelClip clip(kNumMics, n);
  for (int c = 0; c < kNumMics; ++c) {
    auto ch = clip.channel(c);
    for (std::size_t t = 0; t < n; ++t) {
      ch[t] = static_cast<float>(
          0.05 * (shared * common[t + 8 + c * delay_step] + gauss(rng)));
    }
  }
  return clip;
}

GradcheckInputs gradcheck_inputs(std::uint64_t seed, int batch) {
  std::mt19937_64 rng(seed);
  GradcheckInputs in;
  in.profile = empty_profile(noise_clip(rng, kMinEmptySeconds, 0.3, 0));
  std::uniform_real_distribution<double> px(0.0, kPanoramaWidth);
  for (int b = 0; b < batch; ++b) {
    const bool present = b % 3 != 0;
    in.analyses.push_back(
        analyze_clip(noise_clip(rng, 1.0, present ? 2.0 : 0.3, b % 5 + 1)));
    TrainingLabel y;
    y.presence = present;
    if (present) {
      y.azimuth_x = px(rng);
      y.near = b % 2 == 0;
    }
    in.labels.push_back(y);
  }
  return in;
}

double batch_loss(const DetectorModel& model, const GradcheckInputs& in,
                  const LossWeights& weights, Eigen::MatrixXd* x_out,
                  Eigen::MatrixXd* d_out) {
  const auto b = static_cast<Eigen::Index>(in.analyses.size());
  Eigen::MatrixXd x(kFeatureDim, b);
  Eigen::MatrixXd d(kEnergyFeatures, b);
  for (Eigen::Index k = 0; k < b; ++k) {
    const FeatureVector f = assemble_features(
        in.analyses[k], in.profile, model.w_backsub(),
        {d.col(k).data(), static_cast<std::size_t>(kEnergyFeatures)});
    std::copy(f.values.begin(), f.values.end(), x.col(k).data());
  }
  const ForwardCache fc = forward_batch(model, x);
  double total = 0.0;
  for (Eigen::Index k = 0; k < b; ++k) {
    total += multitask_loss(decode_heads(fc.heads.col(k), model.panorama_width),
                            in.labels[k], weights, model.panorama_width)
                 .total;
  }
  if (x_out != nullptr) *x_out = std::move(x);
  if (d_out != nullptr) *d_out = std::move(d);
  return total / static_cast<double>(b);
}

}  // namespace

GradcheckReport gradient_check(const DetectorModel& model, std::uint64_t seed,
                               int probes_per_group, int batch, double h) {
  if (model.dims().input != kFeatureDim) {
    throw Error(Errc::kDimensionMismatch, "gradcheck needs a 1408-input model");
  }
  const GradcheckInputs in = gradcheck_inputs(seed, std::max(batch, 3));
  // Keep w away from the ends of [0, 1] so both probes stay in range.
  DetectorModel base = model;
  base.set_w_backsub(std::clamp(base.w_backsub(), 2 * h, 1.0 - 2 * h));

  const LossWeights defaults;
  const std::pair<std::string, LossWeights> losses[] = {
      {"regression", {defaults.angle, 0.0, 0.0}},
      {"classification", {0.0, defaults.distance, defaults.presence}},
  };
  std::mt19937_64 rng(mix_seed(seed, 0x6763));
  GradcheckReport report;
  for (const auto& [loss_name, weights] : losses) {
    Eigen::MatrixXd x, d;
    batch_loss(base, in, weights, &x, &d);
    const BatchResult analytic =
        loss_and_gradient(base, x, d, in.labels, weights);
    for (const ParameterGroup& g : base.groups()) {
      std::uniform_int_distribution<std::size_t> pick(0, g.size - 1);
      const int n = g.size == 1 ? 1 : probes_per_group;
      for (int p = 0; p < n; ++p) {
        // Prefer parameters that carry gradient; exact zeros are trivially
        // right and say nothing.
        std::size_t idx = g.offset + pick(rng);
        for (int tries = 0; tries < 64 && analytic.gradient[idx] == 0.0;
             ++tries) {
          idx = g.offset + pick(rng);
        }
        DetectorModel plus = base, minus = base;
        plus.parameters()[idx] += h;
        minus.parameters()[idx] -= h;
        const double numeric = (batch_loss(plus, in, weights, nullptr, nullptr) -
                                batch_loss(minus, in, weights, nullptr, nullptr)) /
                               (2.0 * h);
        GradcheckEntry e;
        e.group = g.name;
        e.loss = loss_name;
        e.parameter = idx;
        e.analytic = analytic.gradient[idx];
        e.numeric = numeric;
        const double scale =
            std::max({std::abs(e.analytic), std::abs(e.numeric), 1e-6});
        e.rel_error = std::abs(e.analytic - e.numeric) / scale;
        report.max_rel_error = std::max(report.max_rel_error, e.rel_error);
        report.entries.push_back(e);
      }
    }
  }
  return report;
}

}  // namespace footfall
