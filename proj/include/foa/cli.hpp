#pragma once

// Subcommands of the `foa` tool, callable in-process.
//
//   synth   render scripted scenes to a sequence directory
//   run     detection, tracking and attention over a sequence directory
//   refhist regenerate the reference histogram table
//
// Sequence directory layout (written by synth, read by run):
//   manifest.txt  frames/frame_NNNNN.pgm  background.pgm
//   ground_truth.csv  oracle_report.json  config.ini  script.ini

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "foa/attention.hpp"
#include "foa/depth_io.hpp"
#include "foa/error.hpp"
#include "foa/pipeline.hpp"
#include "foa/room_model.hpp"
#include "foa/scenarios.hpp"
#include "foa/synthetic_scene.hpp"
#include "foa/trajectory.hpp"

namespace foa::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kInvariantFailure = 3 };

struct RunSummary {
  std::size_t frames = 0;
  std::size_t detections = 0;
  std::size_t confirmed_tracks = 0;
  bool tracked = true;
  std::optional<std::size_t> false_negatives;
  std::optional<std::size_t> false_positives;  // after confirmation
  std::optional<double> angle_mae_deg;
  double wall_clock_s = 0.0;
  double effective_fps = 0.0;
  std::optional<std::uint64_t> seed;
};

inline nlohmann::ordered_json to_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["frames"] = s.frames;
  j["detections"] = s.detections;
  j["tracked"] = s.tracked;
  j["confirmed_tracks"] = s.confirmed_tracks;
  j["false_negatives"] = s.false_negatives ? nlohmann::ordered_json(*s.false_negatives) : nlohmann::ordered_json(nullptr);
  j["false_positives"] = s.false_positives ? nlohmann::ordered_json(*s.false_positives) : nlohmann::ordered_json(nullptr);
  j["angle_mae_deg"] = s.angle_mae_deg ? nlohmann::ordered_json(*s.angle_mae_deg) : nlohmann::ordered_json(nullptr);
  j["seed"] = s.seed ? nlohmann::ordered_json(*s.seed) : nlohmann::ordered_json(nullptr);
  j["wall_clock_s"] = s.wall_clock_s;
  j["effective_fps"] = s.effective_fps;
  return j;
}

namespace detail {

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), "cannot open for writing");
  out << text;
  if (!out) throw DataError(path.string(), "write failed");
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ostringstream ss;
  fn(ss);
  write_text(path, ss.str());
}

inline std::string frame_name(int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05d.pgm", k);
  return buf;
}

inline ReferenceSet load_or_make_refs(const Setup& setup, const std::optional<fs::path>& override_path) {
  if (override_path) return read_reference_histograms(*override_path);
  if (!setup.pipeline.reference_histograms.empty()) {
    return read_reference_histograms(setup.pipeline.reference_histograms);
  }
  return make_reference_histograms(setup.room, setup.pipeline);
}

// Per-pixel farthest valid depth over the sequence; people only ever bring
// surfaces closer to the camera.
inline BackgroundModel max_depth_background(const std::vector<ManifestEntry>& entries) {
  BackgroundModel bg;
  for (const auto& e : entries) {
    const auto f = read_depth_pgm(e.path);
    if (bg.depth_mm.empty()) {
      bg = BackgroundModel::from_frame(f);
      continue;
    }
    if (f.width != bg.width || f.height != bg.height) throw DataError(e.path.string(), "frame size differs");
    for (std::size_t i = 0; i < f.depth_mm.size(); ++i) bg.depth_mm[i] = std::max(bg.depth_mm[i], f.depth_mm[i]);
  }
  return bg;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// synth

// Renders one script into `dir` with its oracle files.
inline void synth_sequence(const ScenarioScript& script, const Setup& setup, const fs::path& dir) {
  validate(script, setup.room);
  fs::create_directories(dir / "frames");
  const double fps = setup.pipeline.fps;
  std::vector<std::pair<std::string, double>> manifest;
  for (int k = 0; k < script.duration_frames; ++k) {
    auto frame = render_frame(script, k, setup.room);
    const std::string rel = "frames/" + detail::frame_name(k);
    write_depth_pgm(dir / rel, frame);
    manifest.push_back({rel, k / fps});
  }
  write_manifest(dir / "manifest.txt", manifest);

  DepthFrame bg(setup.room.image_width, setup.room.image_height);
  bg.depth_mm = render_background(setup.room).depth_mm;
  write_depth_pgm(dir / "background.pgm", bg);

  const auto gt = ground_truth(script, setup.room, setup.signs, setup.pipeline);
  detail::write_with(dir / "ground_truth.csv", [&](std::ostream& o) { write_ground_truth_csv(o, gt.records); });
  detail::write_text(dir / "oracle_report.json", foa::to_json(gt.report).dump(2) + "\n");
  Setup stored = setup;
  stored.pipeline.reference_histograms.clear();
  detail::write_with(dir / "config.ini", [&](std::ostream& o) { write_config(o, stored); });
  detail::write_with(dir / "script.ini", [&](std::ostream& o) { write_script(o, script); });
}

struct SynthOptions {
  std::optional<fs::path> script;
  bool default_set = false;
  std::optional<fs::path> config;
  fs::path out;
  std::optional<std::uint64_t> seed;
};

// Returns the sequence directories written.
inline std::vector<fs::path> cmd_synth(const SynthOptions& opt) {
  if (opt.script.has_value() == opt.default_set) {
    throw PreconditionError("synth: give exactly one of --script or --default-set");
  }
  const Setup setup = opt.config ? load_config(*opt.config) : default_setup();
  std::vector<fs::path> dirs;
  if (opt.script) {
    auto script = load_script(*opt.script, setup.room);
    if (opt.seed) script.seed = *opt.seed;
    synth_sequence(script, setup, opt.out);
    dirs.push_back(opt.out);
    return dirs;
  }
  auto scripts = default_scenarios(setup);
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    if (opt.seed) scripts[i].seed = *opt.seed + i;
    char name[32];
    std::snprintf(name, sizeof name, "seq_%02zu_%s", i + 1, scripts[i].persons.front().name.c_str());
    synth_sequence(scripts[i], setup, opt.out / name);
    dirs.push_back(opt.out / name);
  }
  return dirs;
}

// ---------------------------------------------------------------------------
// run

struct RunOptions {
  std::optional<fs::path> config;  // default: <frames>/config.ini, then built-in defaults
  fs::path frames;                 // sequence directory or manifest file
  fs::path out;
  std::optional<std::uint64_t> seed;
  bool no_track = false;
  int heatmap_px_per_sample = 1;
  std::optional<fs::path> refs;
};

inline void write_detections_csv(std::ostream& out, const std::vector<FrameDetections>& frames) {
  out << "frame,u,v,x,y,axis_deg,major_px,minor_px,head_depth_mm,partial\n";
  char buf[256];
  for (const auto& f : frames) {
    for (const auto& d : f.detections) {
      std::snprintf(buf, sizeof buf, "%lld,%.3f,%.3f,%.4f,%.4f,%.3f,%.3f,%.3f,%.1f,%d\n",
                    static_cast<long long>(f.frame_index), d.center_px.x, d.center_px.y, d.center_room.x,
                    d.center_room.y, rad2deg(d.axis_angle_rad), d.ellipse_major_px, d.ellipse_minor_px,
                    d.head_top_depth_mm, d.partial ? 1 : 0);
      out << buf;
    }
  }
}

inline RunSummary cmd_run(const RunOptions& opt) {
  const fs::path manifest = fs::is_directory(opt.frames) ? opt.frames / "manifest.txt" : opt.frames;
  const fs::path seq_dir = manifest.parent_path();
  if (!fs::exists(manifest)) throw DataError(manifest.string(), "manifest not found");

  Setup setup;
  if (opt.config) {
    setup = load_config(*opt.config);
  } else if (fs::exists(seq_dir / "config.ini")) {
    setup = load_config(seq_dir / "config.ini");
  } else {
    setup = default_setup();
  }
  if (opt.heatmap_px_per_sample < 1) throw PreconditionError("--heatmap-px-per-sample must be at least 1");

  const auto entries = read_manifest(manifest);
  if (entries.empty()) throw DataError(manifest.string(), "manifest lists no frames");
  const auto refs = detail::load_or_make_refs(setup, opt.refs);
  BackgroundModel bg = fs::exists(seq_dir / "background.pgm")
                           ? BackgroundModel::from_frame(read_depth_pgm(seq_dir / "background.pgm"))
                           : detail::max_depth_background(entries);

  SequenceProcessor proc(setup, bg, refs.histograms, !opt.no_track);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    auto frame = read_depth_pgm(entries[k].path);
    if (frame.width != bg.width || frame.height != bg.height) {
      throw DataError(entries[k].path.string(), "frame size differs from the background");
    }
    frame.frame_index = static_cast<std::int64_t>(k);
    frame.timestamp_s = entries[k].timestamp_s;
    try {
      proc.process(frame);
    } catch (const DimensionMismatch& e) {
      throw DataError(entries[k].path.string(), e.what());
    }
  }
  const auto result = proc.finish();

  fs::create_directories(opt.out);
  detail::write_with(opt.out / "detections.csv", [&](std::ostream& o) { write_detections_csv(o, result.frames); });

  RunSummary summary;
  summary.frames = entries.size();
  summary.detections = result.detection_count();
  summary.tracked = !opt.no_track;
  summary.confirmed_tracks = result.confirmed_tracks.size();
  summary.seed = opt.seed;

  if (!opt.no_track) {
    detail::write_with(opt.out / "trajectories.csv",
                       [&](std::ostream& o) { write_trajectories_csv(o, result.trajectories); });
    write_gray_pgm(opt.out / "heatmap.pgm", attention_heatmap(result.map, opt.heatmap_px_per_sample));
    detail::write_text(opt.out / "sign_report.json", foa::to_json(result.report).dump(2) + "\n");

    const fs::path gt_path = seq_dir / "ground_truth.csv";
    if (fs::exists(gt_path)) {
      const auto truth = read_ground_truth_csv(gt_path);
      const auto ev = evaluate(result, truth, setup.pipeline);
      summary.false_negatives = ev.false_negatives;
      summary.false_positives = ev.confirmed_false_positives;
      summary.angle_mae_deg = ev.angle_mae_deg();

      nlohmann::ordered_json cmp;
      cmp["fully_visible_heads"] = ev.fully_visible_heads;
      cmp["false_negatives"] = ev.false_negatives;
      cmp["false_negative_rate"] = ev.fn_rate();
      cmp["raw_false_positives"] = ev.raw_false_positives;
      cmp["confirmed_false_positives"] = ev.confirmed_false_positives;
      cmp["confirmed_tracks"] = ev.confirmed_tracks;
      cmp["id_switches"] = ev.id_switches;
      cmp["angle_samples"] = ev.angle_samples;
      cmp["angle_mae_deg"] = ev.angle_mae_deg();
      cmp["max_phi_step_deg"] = ev.max_phi_step_deg;
      cmp["flip_steps"] = ev.flip_steps;
      const fs::path oracle_path = seq_dir / "oracle_report.json";
      if (fs::exists(oracle_path)) {
        std::ifstream in(oracle_path);
        nlohmann::json oj;
        try {
          in >> oj;
        } catch (const nlohmann::json::exception& e) {
          throw DataError(oracle_path.string(), e.what());
        }
        const auto oracle = sign_report_from_json(oj);
        cmp["oracle_ranking"] = oracle.ranking();
        cmp["pipeline_ranking"] = result.report.ranking();
        cmp["ranking_match"] = oracle.ranking() == result.report.ranking();
        cmp["oracle_ranking_by_attention_time"] = oracle.ranking_by_time();
        cmp["pipeline_ranking_by_attention_time"] = result.report.ranking_by_time();
        cmp["attention_time_ranking_match"] = oracle.ranking_by_time() == result.report.ranking_by_time();
      }
      detail::write_text(opt.out / "comparison.json", cmp.dump(2) + "\n");
    }
  }

  summary.wall_clock_s = result.wall_clock_s;
  summary.effective_fps = result.wall_clock_s > 0.0 ? summary.frames / result.wall_clock_s : 0.0;
  detail::write_text(opt.out / "run_summary.json", to_json(summary).dump(2) + "\n");
  return summary;
}

// ---------------------------------------------------------------------------
// refhist

inline ReferenceSet cmd_refhist(const fs::path& out, const std::optional<fs::path>& config = std::nullopt) {
  const Setup setup = config ? load_config(*config) : default_setup();
  const auto refs = make_reference_histograms(setup.room, setup.pipeline);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  detail::write_with(out, [&](std::ostream& o) { write_reference_histograms(o, refs); });
  return refs;
}

// Maps library errors onto process exit codes.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const ParseError*>(&e)) return kDataError;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kDataError;
  return kInvariantFailure;
}

}  // namespace foa::cli
