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

#include "footfall/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "footfall/error.hpp"

namespace footfall {

using nlohmann::json;

std::string_view to_string(Action a) {
  switch (a) {
    case Action::kQuiet: return "quiet";
    case Action::kNormal: return "normal";
    case Action::kLoud: return "loud";
    case Action::kEmpty: return "empty";
  }
  return "?";
}

std::string_view to_string(RobotCondition c) {
  return c == RobotCondition::kStatic ? "static" : "dynamic";
}

Action parse_action(std::string_view s) {
  for (Action a : kAllActions) {
    if (to_string(a) == s) return a;
  }
  throw Error(Errc::kMalformedLabel, "unknown action '" + std::string(s) + "'");
}

RobotCondition parse_condition(std::string_view s) {
  if (s == "static") return RobotCondition::kStatic;
  if (s == "dynamic") return RobotCondition::kDynamic;
  throw Error(Errc::kMalformedLabel,
              "unknown robot condition '" + std::string(s) + "'");
}

std::vector<std::string> Manifest::rooms() const {
  std::set<std::string> ids;
  for (const auto& s : samples) ids.insert(s.room_id);
  return {ids.begin(), ids.end()};
}

const EmptyProfileRef* Manifest::find_profile(const std::string& room,
                                              RobotCondition condition) const {
  for (const auto& p : empty_profiles) {
    if (p.room_id == room && p.robot_condition == condition) return &p;
  }
  return nullptr;
}

void validate(const LabeledSample& s) {
  auto bad = [&](const std::string& why) {
    return Error(Errc::kMalformedLabel, s.clip_path + "@" +
                                            std::to_string(s.clip_offset_s) +
                                            ": " + why);
  };
  if (s.presence != (s.action != Action::kEmpty)) {
    throw bad("presence must be false exactly for the empty action");
  }
  if (s.presence != s.azimuth_x.has_value() ||
      s.presence != s.radial_distance.has_value()) {
    throw bad("azimuth and distance must be present exactly when presence");
  }
  if (s.azimuth_x && !(*s.azimuth_x >= 0.0 && *s.azimuth_x < 1440.0)) {
    throw bad("azimuth_x outside [0, 1440)");
  }
  if (s.radial_distance &&
      !(*s.radial_distance > 0.0 && *s.radial_distance <= 6.0)) {
    throw bad("radial_distance outside (0, 6]");
  }
  if (s.clip_offset_s < 0.0) throw bad("negative clip offset");
}

void validate(const Manifest& manifest) {
  for (const auto& s : manifest.samples) {
    validate(s);
    if (!manifest.find_profile(s.room_id, s.robot_condition)) {
      throw Error(Errc::kMissingEmptyProfile,
                  "room " + s.room_id + " (" +
                      std::string(to_string(s.robot_condition)) +
                      ") has no empty-profile audio");
    }
  }
}

namespace {

json to_json(const LabeledSample& s) {
  json j;
  j["kind"] = "sample";
  j["clip_path"] = s.clip_path;
  j["clip_offset_s"] = s.clip_offset_s;
  j["room_id"] = s.room_id;
  j["action"] = to_string(s.action);
  j["robot_condition"] = to_string(s.robot_condition);
  j["azimuth_x"] = s.azimuth_x ? json(*s.azimuth_x) : json(nullptr);
  j["radial_distance"] =
      s.radial_distance ? json(*s.radial_distance) : json(nullptr);
  j["presence"] = s.presence;
  return j;
}

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string serialize_manifest(const Manifest& manifest) {
  std::ostringstream os;
  for (const auto& p : manifest.empty_profiles) {
    json j{{"kind", "empty_profile"},
           {"room_id", p.room_id},
           {"robot_condition", to_string(p.robot_condition)},
           {"path", p.path}};
    os << j.dump() << '\n';
  }
  for (const auto& a : manifest.augmentation) {
    json j{{"kind", "augmentation"}, {"room_id", a.room_id}, {"path", a.path}};
    os << j.dump() << '\n';
  }
  for (const auto& s : manifest.samples) os << to_json(s).dump() << '\n';
  return os.str();
}

Manifest parse_manifest(std::string_view text,
                        const std::filesystem::path& base_dir) {
  Manifest m;
  m.base_dir = base_dir;
  std::istringstream is{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      const json j = json::parse(line);
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "sample") {
        LabeledSample s;
        s.clip_path = j.at("clip_path").get<std::string>();
        s.clip_offset_s = j.at("clip_offset_s").get<double>();
        s.room_id = j.at("room_id").get<std::string>();
        s.action = parse_action(j.at("action").get<std::string>());
        s.robot_condition =
            parse_condition(j.at("robot_condition").get<std::string>());
        s.azimuth_x = optional_number(j, "azimuth_x");
        s.radial_distance = optional_number(j, "radial_distance");
        s.presence = j.at("presence").get<bool>();
        m.samples.push_back(std::move(s));
      } else if (kind == "empty_profile") {
        m.empty_profiles.push_back(
            {j.at("room_id").get<std::string>(),
             parse_condition(j.at("robot_condition").get<std::string>()),
             j.at("path").get<std::string>()});
      } else if (kind == "augmentation") {
        m.augmentation.push_back({j.at("room_id").get<std::string>(),
                                  j.at("path").get<std::string>()});
      } else {
        throw Error(Errc::kMalformedFile, "unknown record kind " + kind);
      }
    } catch (const json::exception& e) {
      throw Error(Errc::kMalformedFile,
                  "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return m;
}

void save_manifest(const std::filesystem::path& path,
                   const Manifest& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoFailure, "cannot write " + path.string());
  out << serialize_manifest(manifest);
  if (!out) throw Error(Errc::kIoFailure, "short write to " + path.string());
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoFailure, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.parent_path());
}

}  // namespace footfall
