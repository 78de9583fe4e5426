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

#include "footfall/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "footfall/error.hpp"
#include "footfall/features.hpp"

namespace footfall {

void DataAccessAudit::record(const std::string& room_id) {
  std::lock_guard lock(mu_);
  ++reads_[room_id];
}

void DataAccessAudit::reset() {
  std::lock_guard lock(mu_);
  reads_.clear();
}

std::size_t DataAccessAudit::reads(const std::string& room_id) const {
  std::lock_guard lock(mu_);
  auto it = reads_.find(room_id);
  return it == reads_.end() ? 0 : it->second;
}

std::map<std::string, std::size_t> DataAccessAudit::snapshot() const {
  std::lock_guard lock(mu_);
  return reads_;
}

Dataset::Dataset(Manifest manifest, std::size_t recording_cache)
    : manifest_(std::move(manifest)),
      cache_capacity_(std::max<std::size_t>(1, recording_cache)) {
  validate(manifest_);
}

std::shared_ptr<const MultiChannelClip> Dataset::recording(
    const std::string& rel) {
  std::lock_guard lock(mu_);
  for (auto it = lru_.begin(); it != lru_.end(); ++it) {
    if (it->first == rel) {
      lru_.splice(lru_.begin(), lru_, it);
      return it->second;
    }
  }
  ReadOptions opts;
  opts.expected_channels = kNumMics;
  auto rec = std::make_shared<const MultiChannelClip>(
      read_recording(manifest_.resolve(rel), opts));
  lru_.emplace_front(rel, rec);
  if (lru_.size() > cache_capacity_) lru_.pop_back();
  return rec;
}

MultiChannelClip Dataset::clip(std::size_t i) {
  const LabeledSample& s = sample(i);
  audit_.record(s.room_id);
  const auto rec = recording(s.clip_path);
  const auto offset =
      static_cast<std::size_t>(std::llround(s.clip_offset_s * kSampleRate));
  return rec->slice(offset, kSampleRate);
}

const EmptyRoomProfile& Dataset::profile(const std::string& room_id,
                                         RobotCondition condition) {
  audit_.record(room_id);
  const auto key = std::make_pair(room_id, condition);
  {
    std::lock_guard lock(mu_);
    auto it = profiles_.find(key);
    if (it != profiles_.end()) return *it->second;
  }
  const EmptyProfileRef* ref = manifest_.find_profile(room_id, condition);
  if (ref == nullptr) {
    throw Error(Errc::kMissingEmptyProfile,
                room_id + "/" + std::string(to_string(condition)));
  }
  const auto rec = recording(ref->path);
  auto prof = std::make_unique<EmptyRoomProfile>(
      empty_profile(*rec, room_id, condition));
  std::lock_guard lock(mu_);
  auto [it, inserted] = profiles_.emplace(key, std::move(prof));
  return *it->second;
}

const AugmentationPool& Dataset::augmentation_pool() {
  if (pool_) return *pool_;
  const auto rooms = manifest_.rooms();
  const std::set<std::string> sample_rooms(rooms.begin(), rooms.end());
  auto pool = std::make_unique<AugmentationPool>();
  ReadOptions opts;
  opts.expected_channels = kNumMics;
  for (const AugmentationRef& ref : manifest_.augmentation) {
    if (sample_rooms.count(ref.room_id) != 0) continue;
    MultiChannelClip rec = read_recording(manifest_.resolve(ref.path), opts);
    pool->profiles.push_back(empty_profile(rec, ref.room_id));
    pool->room_ids.push_back(ref.room_id);
    pool->recordings.push_back(std::move(rec));
  }
  pool_ = std::move(pool);
  return *pool_;
}

std::vector<std::size_t> Dataset::indices_in_room(
    const std::string& room_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (manifest_.samples[i].room_id == room_id) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Dataset::indices_excluding(
    const std::string& room_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (manifest_.samples[i].room_id != room_id) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Dataset::all_indices() const {
  std::vector<std::size_t> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

}  // namespace footfall
