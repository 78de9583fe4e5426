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

#include <cstddef>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "footfall/audio.hpp"
#include "footfall/augment.hpp"
#include "footfall/manifest.hpp"
#include "footfall/spectro.hpp"

namespace footfall {

// Counts reads per room id. Installed on a Dataset so fold isolation can be
// checked after the fact.
class DataAccessAudit {
 public:
  void record(const std::string& room_id);
  void reset();
  std::size_t reads(const std::string& room_id) const;
  std::map<std::string, std::size_t> snapshot() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::size_t> reads_;
};

// Manifest-backed access to clips and subtraction profiles. Recordings are
// held in a small LRU cache; profiles are computed once per (room, condition).
class Dataset {
 public:
  explicit Dataset(Manifest manifest, std::size_t recording_cache = 6);

  const Manifest& manifest() const { return manifest_; }
  std::size_t size() const { return manifest_.samples.size(); }
  const LabeledSample& sample(std::size_t i) const {
    return manifest_.samples.at(i);
  }

  // The 1 s, 4-channel clip of sample i.
  MultiChannelClip clip(std::size_t i);
  const EmptyRoomProfile& profile(const std::string& room_id,
                                  RobotCondition condition);
  const EmptyRoomProfile& profile_for(std::size_t i) {
    const auto& s = sample(i);
    return profile(s.room_id, s.robot_condition);
  }

  // Foreign empty rooms from the manifest, minus every room that also
  // appears among the samples.
  const AugmentationPool& augmentation_pool();

  // Indices of samples whose room is (or is not) `room_id`.
  std::vector<std::size_t> indices_in_room(const std::string& room_id) const;
  std::vector<std::size_t> indices_excluding(const std::string& room_id) const;
  std::vector<std::size_t> all_indices() const;

  DataAccessAudit& audit() { return audit_; }

 private:
  std::shared_ptr<const MultiChannelClip> recording(const std::string& rel);

  Manifest manifest_;
  std::size_t cache_capacity_;
  std::mutex mu_;
  std::list<std::pair<std::string, std::shared_ptr<const MultiChannelClip>>>
      lru_;
  std::map<std::pair<std::string, RobotCondition>,
           std::unique_ptr<EmptyRoomProfile>>
      profiles_;
  std::unique_ptr<AugmentationPool> pool_;
  DataAccessAudit audit_;
};

}  // namespace footfall
