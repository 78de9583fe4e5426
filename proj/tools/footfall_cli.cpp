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

// Command-line front end: simulate, profile, train, eval, baseline, track,
// gradcheck.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "footfall/audio.hpp"
#include "footfall/dataset.hpp"
#include "footfall/error.hpp"
#include "footfall/geometry.hpp"
#include "footfall/harness.hpp"
#include "footfall/report.hpp"
#include "footfall/simulator.hpp"
#include "footfall/spectro.hpp"
#include "footfall/tracker.hpp"
#include "footfall/training.hpp"

namespace fs = std::filesystem;
using namespace footfall;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string geometry_path;
  std::string format = "csv";
  bool quiet = false;
};

ArrayGeometry geometry_of(const Globals& g) {
  return g.geometry_path.empty() ? default_geometry()
                                 : load_geometry(g.geometry_path);
}

TrainConfig train_config(const std::string& path, const Globals& g) {
  TrainConfig cfg = TrainConfig::from_config(KeyValueConfig::load(path));
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

void log_line(const Globals& g, const std::string& line) {
  if (!g.quiet) std::cerr << line << "\n";
}

int cmd_simulate(const Globals& g, const std::string& config,
                 const std::string& out) {
  DatasetConfig cfg = DatasetConfig::from_config(KeyValueConfig::load(config));
  if (g.seed) cfg.seed = *g.seed;
  const auto plan = plan_dataset(cfg);
  log_line(g, "rendering " + std::to_string(plan.size()) + " recordings");
  const Manifest m = generate_dataset(plan, geometry_of(g), out);
  log_line(g, "wrote " + std::to_string(m.samples.size()) + " samples to " +
                  (fs::path(out) / kManifestFileName).string());
  return kExitOk;
}

int cmd_profile(const std::string& wav, const std::string& out,
                const std::string& room, const std::string& condition) {
  const MultiChannelClip audio = read_recording(wav);
  save_profile(out, empty_profile(audio, room, parse_condition(condition)));
  return kExitOk;
}

int cmd_train(const Globals& g, const std::string& manifest,
              const std::string& config, const std::string& out) {
  Dataset data(load_manifest(manifest));
  const TrainConfig cfg = train_config(config, g);
  TrainResult r = train(data, data.all_indices(), cfg, nullptr,
                        [&](const EpochLog& e) { log_line(g, format_epoch(e)); });
  r.model.geometry_hash = geometry_hash(geometry_of(g));
  save_checkpoint(out, r.model);
  return kExitOk;
}

int cmd_eval(const Globals& g, const std::string& manifest,
             const std::string& config, const std::string& out) {
  Dataset data(load_manifest(manifest));
  LoocvOptions opts;
  opts.train = train_config(config, g);
  opts.geometry = geometry_of(g);
  opts.log = [&](const std::string& s) { log_line(g, s); };
  const Report report = loocv(data, opts);
  write_report(out, report, parse_report_format(g.format));
  return kExitOk;
}

int cmd_baseline(const Globals& g, const std::string& manifest,
                 const std::string& out) {
  Dataset data(load_manifest(manifest));
  Report report = baseline_report(data, geometry_of(g));
  if (g.seed) report.seed = *g.seed;
  write_report(out, report, parse_report_format(g.format));
  return kExitOk;
}

int cmd_track(const Globals& g, const std::string& input,
              const std::string& ckpt, const std::string& profile_path,
              const std::string& out, double realtime, double pan_speed) {
  const DetectorModel model = load_checkpoint(ckpt);
  const EmptyRoomProfile profile = load_profile(profile_path);
  SimulatedPanSink sink(pan_speed);
  TrackerConfig cfg;
  cfg.realtime_factor = realtime;
  TrackResult r;
  if (input == "-") {
    RawStreamSource src(std::cin, 4);
    r = stream_track(src, model, profile, sink, cfg);
  } else {
    ClipSource src(read_recording(input, {.expected_channels = 4}));
    r = stream_track(src, model, profile, sink, cfg);
  }
  std::ofstream os(out, std::ios::trunc);
  if (!os) throw Error(Errc::kIoFailure, "cannot write " + out);
  write_event_log(os, r.events);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "decisions %zu pans %zu max_compute_ms %.1f mean_compute_ms "
                "%.1f late_windows %zu",
                r.stats.decisions, r.stats.pans, r.stats.max_compute_ms,
                r.stats.mean_compute_ms, r.stats.late_windows);
  log_line(g, buf);
  return kExitOk;
}

int cmd_gradcheck(const Globals& g, const std::string& ckpt, int probes) {
  const std::uint64_t seed = g.seed.value_or(1);
  const DetectorModel model =
      ckpt.empty() ? DetectorModel::initialize(DetectorDims{}, seed)
                   : load_checkpoint(ckpt);
  const GradcheckReport r = gradient_check(model, seed, probes);
  for (const GradcheckEntry& e : r.entries) {
    std::printf("%-14s %-10s %-8zu analytic %+.6e numeric %+.6e rel %.2e\n",
                e.loss.c_str(), e.group.c_str(), e.parameter, e.analytic,
                e.numeric, e.rel_error);
  }
  std::printf("max relative error %.3e (tolerance %.0e)\n", r.max_rel_error,
              kGradcheckTolerance);
  return r.max_rel_error < kGradcheckTolerance ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"footfall: person localization from incidental sounds"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed override");
  app.add_option("--geometry", g.geometry_path, "Microphone geometry file");
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("-q,--quiet", g.quiet, "No progress output");

  std::string a1, a2, a3, out;
  auto* simulate = app.add_subcommand("simulate", "Render a synthetic dataset");
  simulate->add_option("config", a1, "Dataset config")->required();
  simulate->add_option("-o,--output", out, "Output directory")->required();

  std::string room = "room", condition = "static";
  auto* profile = app.add_subcommand("profile", "Build an empty-room profile");
  profile->add_option("wav", a1, "Empty-room recording")->required();
  profile->add_option("-o,--output", out, "Profile file")->required();
  profile->add_option("--room", room, "Room id stored in the profile");
  profile->add_option("--condition", condition, "static or dynamic");

  auto* train_cmd = app.add_subcommand("train", "Train a detector");
  train_cmd->add_option("manifest", a1)->required();
  train_cmd->add_option("config", a2)->required();
  train_cmd->add_option("-o,--output", out, "Checkpoint")->required();

  bool loocv_flag = false;
  auto* eval = app.add_subcommand("eval", "Cross-validated evaluation");
  eval->add_flag("--loocv", loocv_flag, "Leave one room out")->required();
  eval->add_option("manifest", a1)->required();
  eval->add_option("config", a2)->required();
  eval->add_option("-o,--output", out, "Report")->required();

  auto* baseline = app.add_subcommand("baseline", "Score the baselines");
  baseline->add_option("manifest", a1)->required();
  baseline->add_option("-o,--output", out, "Report")->required();

  double realtime = 1.0, pan_speed = 60.0;
  auto* track = app.add_subcommand("track", "Stream tracking with panning");
  track->add_option("input", a1, "WAV file or - for raw float32 on stdin")
      ->required();
  track->add_option("checkpoint", a2)->required();
  track->add_option("profile", a3)->required();
  track->add_option("-o,--output", out, "Event log")->required();
  track->add_option("--realtime-factor", realtime,
                    "Playback speed; 0 runs offline");
  track->add_option("--pan-speed", pan_speed, "Degrees per second");

  int probes = 3;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check");
  gradcheck->add_option("checkpoint", a1, "Checkpoint (fresh model if absent)");
  gradcheck->add_option("--probes", probes, "Probes per parameter group");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(g, a1, out);
    if (*profile) return cmd_profile(a1, out, room, condition);
    if (*train_cmd) return cmd_train(g, a1, a2, out);
    if (*eval) return cmd_eval(g, a1, a2, out);
    if (*baseline) return cmd_baseline(g, a1, out);
    if (*track) return cmd_track(g, a1, a2, a3, out, realtime, pan_speed);
    if (*gradcheck) return cmd_gradcheck(g, a1, probes);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
