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

#include "footfall/report.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "footfall/error.hpp"

namespace footfall {

namespace {

using nlohmann::json;

struct Acc {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  std::optional<double> mean() const {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

constexpr Action kColumnActions[] = {Action::kQuiet, Action::kNormal,
                                     Action::kLoud, Action::kEmpty};

struct Metric {
  const char* name;
  CellGrid MetricsTable::*grid;
};
constexpr Metric kMetrics[] = {{"mae_deg", &MetricsTable::mae_deg},
                               {"distance_acc", &MetricsTable::distance_acc},
                               {"presence_acc", &MetricsTable::presence_acc}};

std::string cell_text(const std::optional<double>& v) {
  if (!v) return std::string(kMissingCell);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

json grid_to_json(const CellGrid& g) {
  json j = json::object();
  for (RobotCondition c : kConditions) {
    json row = json::object();
    for (Action a : kColumnActions) {
      const auto& v = g.at(a, c);
      row[std::string(to_string(a))] = v ? json(*v) : json(nullptr);
    }
    j[std::string(to_string(c))] = row;
  }
  j["overall"] = g.overall ? json(*g.overall) : json(nullptr);
  return j;
}

std::optional<double> opt(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

CellGrid grid_from_json(const json& j) {
  CellGrid g;
  for (RobotCondition c : kConditions) {
    const json& row = j.at(std::string(to_string(c)));
    for (Action a : kColumnActions) {
      g.at(a, c) = opt(row.at(std::string(to_string(a))));
    }
  }
  g.overall = opt(j.at("overall"));
  return g;
}

json table_to_json(const MetricsTable& t) {
  json j = json::object();
  j["method"] = t.method;
  for (const Metric& m : kMetrics) j[m.name] = grid_to_json(t.*(m.grid));
  return j;
}

MetricsTable table_from_json(const json& j) {
  MetricsTable t;
  t.method = j.at("method").get<std::string>();
  for (const Metric& m : kMetrics) t.*(m.grid) = grid_from_json(j.at(m.name));
  return t;
}

}  // namespace

MetricsTable tabulate(std::string method,
                      const std::vector<ClipOutcome>& clips) {
  Acc mae[kActionCount][kConditionCount], dist[kActionCount][kConditionCount],
      pres[kActionCount][kConditionCount];
  Acc mae_all, dist_all, pres_empty, pres_person;
  for (const ClipOutcome& c : clips) {
    const int a = static_cast<int>(c.action);
    const int k = static_cast<int>(c.condition);
    if (c.presence && c.angle_error_deg) {
      mae[a][k].add(*c.angle_error_deg);
      mae_all.add(*c.angle_error_deg);
    }
    if (c.presence && c.distance_correct) {
      const double v = *c.distance_correct ? 1.0 : 0.0;
      dist[a][k].add(v);
      dist_all.add(v);
    }
    if (c.presence_correct) {
      const double v = *c.presence_correct ? 1.0 : 0.0;
      pres[a][k].add(v);
      (c.presence ? pres_person : pres_empty).add(v);
    }
  }
  MetricsTable t;
  t.method = std::move(method);
  for (int a = 0; a < kActionCount; ++a) {
    for (int k = 0; k < kConditionCount; ++k) {
      t.mae_deg.cells[a][k] = mae[a][k].mean();
      t.distance_acc.cells[a][k] = dist[a][k].mean();
      t.presence_acc.cells[a][k] = pres[a][k].mean();
    }
  }
  t.mae_deg.overall = mae_all.mean();
  t.distance_acc.overall = dist_all.mean();
  const auto pe = pres_empty.mean(), pp = pres_person.mean();
  if (pe && pp) {
    t.presence_acc.overall = 0.5 * (*pe + *pp);
  } else {
    t.presence_acc.overall = pe ? pe : pp;
  }
  return t;
}

MetricsTable mean_tables(std::string method,
                         const std::vector<const MetricsTable*>& tables) {
  MetricsTable out;
  out.method = std::move(method);
  for (const Metric& m : kMetrics) {
    CellGrid& g = out.*(m.grid);
    for (int a = 0; a < kActionCount; ++a) {
      for (int k = 0; k < kConditionCount; ++k) {
        Acc acc;
        for (const MetricsTable* t : tables) {
          if (const auto& v = (t->*(m.grid)).cells[a][k]) acc.add(*v);
        }
        g.cells[a][k] = acc.mean();
      }
    }
    Acc acc;
    for (const MetricsTable* t : tables) {
      if (const auto& v = (t->*(m.grid)).overall) acc.add(*v);
    }
    g.overall = acc.mean();
  }
  return out;
}

const MetricsTable* Report::find(std::string_view method) const {
  for (const MetricsTable& t : aggregate) {
    if (t.method == method) return &t;
  }
  return nullptr;
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "json") return ReportFormat::kJson;
  throw Error(Errc::kInvalidConfig, "unknown format '" + std::string(s) + "'");
}

std::string render_csv(const Report& report) {
  std::string out = "scope,method,metric";
  for (RobotCondition c : kConditions) {
    for (Action a : kColumnActions) {
      out += ",";
      out += to_string(c);
      out += "_";
      out += to_string(a);
    }
  }
  out += ",overall\n";
  auto rows = [&](const std::string& scope, const MetricsTable& t) {
    for (const Metric& m : kMetrics) {
      const CellGrid& g = t.*(m.grid);
      out += scope + "," + t.method + "," + m.name;
      for (RobotCondition c : kConditions) {
        for (Action a : kColumnActions) out += "," + cell_text(g.at(a, c));
      }
      out += "," + cell_text(g.overall) + "\n";
    }
  };
  for (const MetricsTable& t : report.aggregate) rows("aggregate", t);
  for (const FoldReport& f : report.folds) {
    for (const MetricsTable& t : f.methods) rows("fold:" + f.held_out_room, t);
  }
  return out;
}

std::string render_json(const Report& report) {
  json j = json::object();
  j["kind"] = report.kind;
  j["seed"] = report.seed;
  j["aggregate"] = json::array();
  for (const MetricsTable& t : report.aggregate) {
    j["aggregate"].push_back(table_to_json(t));
  }
  j["folds"] = json::array();
  for (const FoldReport& f : report.folds) {
    json fj = json::object();
    fj["held_out_room"] = f.held_out_room;
    fj["train_samples"] = f.train_samples;
    fj["test_samples"] = f.test_samples;
    fj["held_out_reads_during_training"] = f.held_out_reads_during_training;
    fj["w_backsub"] = f.w_backsub ? json(*f.w_backsub) : json(nullptr);
    fj["methods"] = json::array();
    for (const MetricsTable& t : f.methods) {
      fj["methods"].push_back(table_to_json(t));
    }
    j["folds"].push_back(fj);
  }
  return j.dump(2) + "\n";
}

Report parse_json_report(std::string_view text) {
  Report r;
  try {
    const json j = json::parse(text);
    r.kind = j.at("kind").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const json& t : j.at("aggregate")) {
      r.aggregate.push_back(table_from_json(t));
    }
    for (const json& fj : j.at("folds")) {
      FoldReport f;
      f.held_out_room = fj.at("held_out_room").get<std::string>();
      f.train_samples = fj.at("train_samples").get<std::size_t>();
      f.test_samples = fj.at("test_samples").get<std::size_t>();
      f.held_out_reads_during_training =
          fj.at("held_out_reads_during_training").get<std::size_t>();
      f.w_backsub = opt(fj.at("w_backsub"));
      for (const json& t : fj.at("methods")) {
        f.methods.push_back(table_from_json(t));
      }
      r.folds.push_back(std::move(f));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kMalformedFile, std::string("report: ") + e.what());
  }
  return r;
}

std::string render(const Report& report, ReportFormat format) {
  return format == ReportFormat::kCsv ? render_csv(report)
                                      : render_json(report);
}

void write_report(const std::filesystem::path& path, const Report& report,
                  ReportFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoFailure, "cannot write " + path.string());
  out << render(report, format);
  if (!out) throw Error(Errc::kIoFailure, "short write to " + path.string());
}

}  // namespace footfall
