#pragma once

// End-to-end processing of one depth sequence and its comparison against
// synthetic ground truth.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "foa/attention.hpp"
#include "foa/head_detection.hpp"
#include "foa/room_model.hpp"
#include "foa/synthetic_scene.hpp"
#include "foa/tracking.hpp"
#include "foa/trajectory.hpp"

namespace foa {

struct FrameDetections {
  std::int64_t frame_index = 0;
  std::vector<HeadDetection> detections;
};

struct SequenceResult {
  std::vector<FrameDetections> frames;
  std::vector<Track> confirmed_tracks;
  std::vector<OrientedTrajectory> trajectories;
  AttentionMap map;
  SignReport report;
  bool tracked = false;
  double wall_clock_s = 0.0;

  std::size_t detection_count() const {
    std::size_t n = 0;
    for (const auto& f : frames) n += f.detections.size();
    return n;
  }
};

// Feeds frames one at a time; finish() closes the sequence.
class SequenceProcessor {
 public:
  SequenceProcessor(Setup setup, BackgroundModel background, std::vector<DepthHistogram> refs, bool track = true)
      : setup_(std::move(setup)),
        background_(std::move(background)),
        refs_(std::move(refs)),
        track_(track),
        tracker_(setup_.room, setup_.pipeline),
        start_(std::chrono::steady_clock::now()) {}

  const std::vector<HeadDetection>& process(const DepthFrame& frame) {
    auto dets = detect_heads(frame, background_, setup_.pipeline, refs_, setup_.room);
    if (track_) tracker_.update(dets, frame.frame_index);
    result_.frames.push_back({frame.frame_index, std::move(dets)});
    return result_.frames.back().detections;
  }

  SequenceResult finish() {
    result_.tracked = track_;
    if (track_) {
      const auto params = AttentionParams::from(setup_.pipeline);
      const auto samples = wall_samples(setup_.room, setup_.pipeline.wall_step_m);
      result_.confirmed_tracks = tracker_.confirmed_tracks();
      std::vector<AttentionMap> maps;
      for (const auto& t : result_.confirmed_tracks) {
        if (t.history.size() < 2) continue;
        result_.trajectories.push_back(build_trajectory(t, setup_.room, setup_.pipeline));
        maps.push_back(accumulate_trajectory(result_.trajectories.back(), setup_.room, samples, params));
      }
      result_.map = maps.empty() ? normalize_attention(samples, std::vector<double>(samples.size(), 0.0))
                                 : aggregate(maps);
      result_.report = sign_report(result_.map, setup_.signs, setup_.room, result_.trajectories, params);
    }
    result_.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(result_);
  }

 private:
  Setup setup_;
  BackgroundModel background_;
  std::vector<DepthHistogram> refs_;
  bool track_;
  Tracker tracker_;
  SequenceResult result_;
  std::chrono::steady_clock::time_point start_;
};

inline SequenceResult run_scenario(const ScenarioScript& script, const Setup& setup,
                                   const std::vector<DepthHistogram>& refs, bool track = true) {
  SequenceProcessor proc(setup, render_background(setup.room), refs, track);
  for (int k = 0; k < script.duration_frames; ++k) {
    auto frame = render_frame(script, k, setup.room);
    frame.timestamp_s = k / setup.pipeline.fps;
    proc.process(frame);
  }
  return proc.finish();
}

struct Evaluation {
  std::size_t fully_visible_heads = 0;
  std::size_t false_negatives = 0;      // fully visible heads without a detection
  std::size_t raw_false_positives = 0;  // detections away from every scripted person
  std::size_t confirmed_false_positives = 0;
  std::size_t edge_entries = 0;  // confirmed entries on a person whose head center is out of view
  std::size_t confirmed_tracks = 0;
  std::size_t id_switches = 0;
  std::size_t angle_samples = 0;
  double angle_abs_error_sum_deg = 0.0;
  double max_phi_step_deg = 0.0;
  std::size_t flip_steps = 0;  // phi steps within max_turn of a half turn
  std::map<int, std::set<int>> tracks_per_person;

  double fn_rate() const {
    return fully_visible_heads ? static_cast<double>(false_negatives) / fully_visible_heads : 0.0;
  }
  double angle_mae_deg() const { return angle_samples ? angle_abs_error_sum_deg / angle_samples : 0.0; }

  Evaluation& operator+=(const Evaluation& o) {
    fully_visible_heads += o.fully_visible_heads;
    false_negatives += o.false_negatives;
    raw_false_positives += o.raw_false_positives;
    confirmed_false_positives += o.confirmed_false_positives;
    edge_entries += o.edge_entries;
    confirmed_tracks += o.confirmed_tracks;
    id_switches += o.id_switches;
    angle_samples += o.angle_samples;
    angle_abs_error_sum_deg += o.angle_abs_error_sum_deg;
    max_phi_step_deg = std::max(max_phi_step_deg, o.max_phi_step_deg);
    flip_steps += o.flip_steps;
    return *this;
  }
};

// Matches detections and track states to scripted persons within
// match_radius_m on the floor plane. A match counts as a false positive only
// when no person present in the scene is that close; angle errors are taken
// over frames where the matched head center is in view.
inline Evaluation evaluate(const SequenceResult& result, const std::vector<GroundTruthRecord>& truth,
                           const PipelineConfig& cfg, double match_radius_m = 0.3) {
  Evaluation ev;
  std::map<std::int64_t, std::vector<const GroundTruthRecord*>> by_frame;
  for (const auto& r : truth) {
    by_frame[r.frame_index].push_back(&r);
  }
  auto nearest = [&](std::int64_t frame, Vec2 p) -> const GroundTruthRecord* {
    const GroundTruthRecord* best = nullptr;
    double best_d = match_radius_m;
    auto it = by_frame.find(frame);
    if (it == by_frame.end()) return nullptr;
    for (const auto* r : it->second) {
      const double d = distance(r->position, p);
      if (d <= best_d) {
        best_d = d;
        best = r;
      }
    }
    return best;
  };

  for (const auto& f : result.frames) {
    for (const auto& d : f.detections) {
      if (!nearest(f.frame_index, d.center_room)) ++ev.raw_false_positives;
    }
    auto it = by_frame.find(f.frame_index);
    if (it == by_frame.end()) continue;
    for (const auto* r : it->second) {
      if (!r->fully_visible) continue;
      ++ev.fully_visible_heads;
      const bool found = std::any_of(f.detections.begin(), f.detections.end(), [&](const HeadDetection& d) {
        return distance(d.center_room, r->position) <= match_radius_m;
      });
      if (!found) ++ev.false_negatives;
    }
  }

  // person -> (frame -> track id) to count identity changes in frame order.
  std::map<int, std::map<std::int64_t, int>> identity;
  ev.confirmed_tracks = result.confirmed_tracks.size();
  for (const auto& t : result.confirmed_tracks) {
    for (std::size_t i = 0; i < t.history.size(); ++i) {
      const auto& e = t.history[i];
      if (i > 0) {
        const double step = std::abs(rad2deg(signed_angle_diff(e.phi_rad, t.history[i - 1].phi_rad)));
        ev.max_phi_step_deg = std::max(ev.max_phi_step_deg, step);
        if (std::abs(step - 180.0) <= rad2deg(cfg.max_turn_rate_rad)) ++ev.flip_steps;
      }
      const auto* r = nearest(e.frame_index, e.position);
      if (!r) {
        ++ev.confirmed_false_positives;
        continue;
      }
      identity[r->person_id][e.frame_index] = t.id;
      ev.tracks_per_person[r->person_id].insert(t.id);
      if (!r->head_in_view) {
        ++ev.edge_entries;
        continue;
      }
      ev.angle_abs_error_sum_deg += rad2deg(angular_distance(e.phi_rad, r->phi));
      ++ev.angle_samples;
    }
  }
  for (const auto& [person, frames] : identity) {
    int last = -1;
    for (const auto& [frame, id] : frames) {
      if (last != -1 && id != last) ++ev.id_switches;
      last = id;
    }
  }
  return ev;
}

}  // namespace foa
