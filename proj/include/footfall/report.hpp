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

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "footfall/manifest.hpp"

namespace footfall {

inline constexpr int kActionCount = 4;     // quiet, normal, loud, empty
inline constexpr int kConditionCount = 2;  // static, dynamic

// One value per action x robot condition; absent cells have no test clips.
struct CellGrid {
  std::array<std::array<std::optional<double>, kConditionCount>, kActionCount>
      cells{};
  std::optional<double> overall;

  std::optional<double>& at(Action a, RobotCondition c) {
    return cells[static_cast<int>(a)][static_cast<int>(c)];
  }
  const std::optional<double>& at(Action a, RobotCondition c) const {
    return cells[static_cast<int>(a)][static_cast<int>(c)];
  }
  friend bool operator==(const CellGrid&, const CellGrid&) = default;
};

// Metrics of one method on one test set. Angle MAE and distance accuracy use
// presence clips only; overall presence accuracy is the mean of the
// empty-class and presence-class accuracies.
struct MetricsTable {
  std::string method;
  CellGrid mae_deg;
  CellGrid distance_acc;
  CellGrid presence_acc;
  friend bool operator==(const MetricsTable&, const MetricsTable&) = default;
};

// Per-clip outcome fed to the accumulator. Unset fields mean the method does
// not predict that quantity.
struct ClipOutcome {
  Action action = Action::kEmpty;
  RobotCondition condition = RobotCondition::kStatic;
  bool presence = false;
  std::optional<double> angle_error_deg;
  std::optional<bool> distance_correct;
  std::optional<bool> presence_correct;
};

MetricsTable tabulate(std::string method, const std::vector<ClipOutcome>& clips);

// Cell-wise unweighted mean over tables; a cell is absent only when it is
// absent in every input.
MetricsTable mean_tables(std::string method,
                         const std::vector<const MetricsTable*>& tables);

struct FoldReport {
  std::string held_out_room;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  std::size_t held_out_reads_during_training = 0;
  std::optional<double> w_backsub;
  std::vector<MetricsTable> methods;
  friend bool operator==(const FoldReport&, const FoldReport&) = default;
};

struct Report {
  std::string kind;  // "loocv" or "baseline"
  std::uint64_t seed = 0;
  std::vector<FoldReport> folds;
  std::vector<MetricsTable> aggregate;

  const MetricsTable* find(std::string_view method) const;
  friend bool operator==(const Report&, const Report&) = default;
};

enum class ReportFormat { kCsv, kJson };
ReportFormat parse_report_format(std::string_view s);

// Rows: scope (aggregate or fold:<room>) x method x metric. Columns:
// static_{quiet,normal,loud,empty}, dynamic_{...}, overall.
std::string render_csv(const Report& report);
std::string render_json(const Report& report);
Report parse_json_report(std::string_view text);
std::string render(const Report& report, ReportFormat format);
void write_report(const std::filesystem::path& path, const Report& report,
                  ReportFormat format);

inline constexpr std::string_view kMissingCell = "\xE2\x80\x93";  // en dash

}  // namespace footfall
