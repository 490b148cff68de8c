#pragma once

// Tracking by detection on the floor plane. Each track predicts its next
// position with a constant-acceleration model fitted to its last three
// positions, candidate detections are gated by a circle around the
// prediction, and the nearest neighbour wins unless two tracks compete for
// a detection, in which case a global minimum-distance assignment decides.
//
// The ellipse fit only gives the head axis modulo pi. A track turns that
// into a direction: the first estimate points along the entry motion, every
// later one picks the candidate closest to the previous direction and is
// rate-limited, so a 180 degree flip can never happen between frames.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "foa/error.hpp"
#include "foa/geometry.hpp"
#include "foa/head_detection.hpp"
#include "foa/hungarian.hpp"
#include "foa/room_model.hpp"

namespace foa {

enum class TrackStatus { tentative, confirmed, exited };

struct TrackEntry {
  std::int64_t frame_index = 0;
  Vec2 position;
  double axis_angle_rad = 0.0;
  double phi_rad = 0.0;
  Vec2 center_px;
};

struct Track {
  int id = 0;
  std::vector<TrackEntry> history;
  std::optional<double> phi_rad;  // set once confirmed
  TrackStatus status = TrackStatus::tentative;
  int misses = 0;
  int hits = 0;  // consecutive matches
  bool first_partial = false;
  double first_border_px = 0.0;

  std::vector<Vec2> positions() const {
    std::vector<Vec2> p;
    p.reserve(history.size());
    for (const auto& e : history) p.push_back(e.position);
    return p;
  }
  bool was_confirmed() const { return status != TrackStatus::tentative; }
};

// Quadratic extrapolation 3*p3 - 3*p2 + p1 of the last three positions;
// linear with two, hold with one.
inline Vec2 predict_position(std::span<const Vec2> history) {
  const std::size_t n = history.size();
  if (n == 0) throw PreconditionError("predict_position: empty history");
  const Vec2 p3 = history[n - 1];
  if (n == 1) return p3;
  const Vec2 p2 = history[n - 2];
  if (n == 2) return 2.0 * p3 - p2;
  const Vec2 p1 = history[n - 3];
  return 3.0 * p3 - 3.0 * p2 + p1;
}

inline Vec2 predict_position(const Track& track) {
  const auto p = track.positions();
  return predict_position(std::span<const Vec2>(p));
}

struct GateCandidate {
  std::size_t detection = 0;
  double distance = 0.0;
};

// Detections within radius of the prediction, nearest first (ties: lower
// detection index).
inline std::vector<GateCandidate> gate(Vec2 prediction, const std::vector<HeadDetection>& detections,
                                       double radius) {
  if (!(radius > 0.0)) throw PreconditionError("gate: radius must be positive");
  std::vector<GateCandidate> out;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const double d = distance(prediction, detections[i].center_room);
    if (d <= radius) out.push_back({i, d});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GateCandidate& a, const GateCandidate& b) { return a.distance < b.distance; });
  return out;
}

struct Association {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (track, detection)
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_detections;
  bool used_global_assignment = false;
};

// Association from predicted positions. Tracks whose gated candidate sets
// are disjoint take their nearest neighbour; if any detection is gated by
// two tracks the whole problem goes to the assignment solver with gated-out
// pairs priced out of reach.
inline Association associate(const std::vector<Vec2>& predictions, const std::vector<HeadDetection>& detections,
                             double gate_radius) {
  Association out;
  std::vector<std::vector<GateCandidate>> gated(predictions.size());
  std::vector<int> claims(detections.size(), 0);
  bool overlap = false;
  for (std::size_t t = 0; t < predictions.size(); ++t) {
    gated[t] = gate(predictions[t], detections, gate_radius);
    for (const auto& c : gated[t]) overlap |= (++claims[c.detection] > 1);
  }

  std::vector<char> det_used(detections.size(), 0);
  if (!overlap) {
    for (std::size_t t = 0; t < predictions.size(); ++t) {
      if (gated[t].empty()) {
        out.unmatched_tracks.push_back(t);
      } else {
        out.matches.emplace_back(t, gated[t].front().detection);
        det_used[gated[t].front().detection] = 1;
      }
    }
  } else {
    out.used_global_assignment = true;
    // Any gated pair is cheaper than any out-of-gate pair, so the solver
    // maximises the number of gated matches before minimising distance.
    const double out_of_gate = 1e6 * (1.0 + gate_radius) * static_cast<double>(predictions.size() + 1);
    std::vector<std::vector<double>> cost(predictions.size(),
                                          std::vector<double>(detections.size(), out_of_gate));
    for (std::size_t t = 0; t < predictions.size(); ++t) {
      for (const auto& c : gated[t]) cost[t][c.detection] = c.distance;
    }
    const auto assignment = solve_assignment(cost);
    for (std::size_t t = 0; t < predictions.size(); ++t) {
      const int d = assignment[t];
      if (d >= 0 && cost[t][static_cast<std::size_t>(d)] < out_of_gate) {
        out.matches.emplace_back(t, static_cast<std::size_t>(d));
        det_used[static_cast<std::size_t>(d)] = 1;
      } else {
        out.unmatched_tracks.push_back(t);
      }
    }
  }
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (!det_used[d]) out.unmatched_detections.push_back(d);
  }
  return out;
}

inline Association associate(const std::vector<Track>& tracks, const std::vector<HeadDetection>& detections,
                             const PipelineConfig& cfg) {
  std::vector<Vec2> predictions;
  predictions.reserve(tracks.size());
  for (const auto& t : tracks) predictions.push_back(predict_position(t));
  return associate(predictions, detections, cfg.gate_radius_m);
}

// Turns an axial angle in [0, pi) into a head direction in [0, 2pi).
// Without a previous direction the candidate within pi/2 of trajectory_dir
// is taken. Otherwise the candidate nearest the previous direction wins
// (exact ties go toward trajectory_dir) and the step is clamped to
// max_turn_rad.
inline double resolve_direction(std::optional<double> previous_phi, double axis_angle_rad, double trajectory_dir,
                                double max_turn_rad) {
  const double a = wrap_two_pi(axis_angle_rad);
  const double b = wrap_two_pi(axis_angle_rad + kPi);
  auto toward_trajectory = [&] {
    return angular_distance(a, trajectory_dir) <= angular_distance(b, trajectory_dir) ? a : b;
  };
  if (!previous_phi) return toward_trajectory();

  const double prev = *previous_phi;
  const double da = angular_distance(a, prev);
  const double db = angular_distance(b, prev);
  double chosen;
  if (std::abs(da - db) < 1e-9) {
    chosen = toward_trajectory();
  } else {
    chosen = da < db ? a : b;
  }
  const double step = signed_angle_diff(chosen, prev);
  if (std::abs(step) <= max_turn_rad) return chosen;
  return wrap_two_pi(prev + (step > 0.0 ? max_turn_rad : -max_turn_rad));
}

// Stateful tracker for one sequence. Frames must arrive in increasing order.
class Tracker {
 public:
  Tracker(RoomModel room, PipelineConfig cfg) : room_(std::move(room)), cfg_(std::move(cfg)) {}

  const std::vector<Track>& update(const std::vector<HeadDetection>& detections, std::int64_t frame_index) {
    if (last_frame_ && frame_index <= *last_frame_) {
      throw PreconditionError("Tracker::update: frame indices must increase");
    }
    last_frame_ = frame_index;

    std::vector<std::size_t> active;
    std::vector<Vec2> predictions;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      if (tracks_[i].status == TrackStatus::exited) continue;
      active.push_back(i);
      predictions.push_back(predict_position(tracks_[i]));
    }
    const auto assoc = associate(predictions, detections, cfg_.gate_radius_m);

    for (const auto& [a, d] : assoc.matches) extend(tracks_[active[a]], detections[d], frame_index);

    std::vector<char> drop(tracks_.size(), 0);
    for (std::size_t a : assoc.unmatched_tracks) {
      Track& t = tracks_[active[a]];
      ++t.misses;
      t.hits = 0;
      if (t.status == TrackStatus::tentative) {
        drop[active[a]] = 1;
      } else if (t.misses > cfg_.max_misses) {
        t.status = TrackStatus::exited;
      }
    }
    std::vector<Track> kept;
    kept.reserve(tracks_.size() + assoc.unmatched_detections.size());
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      if (!drop[i]) kept.push_back(std::move(tracks_[i]));
    }
    tracks_ = std::move(kept);

    for (std::size_t d : assoc.unmatched_detections) spawn(detections[d], frame_index);
    return tracks_;
  }

  const std::vector<Track>& tracks() const { return tracks_; }

  // Tracks that reached confirmation, in creation order.
  std::vector<Track> confirmed_tracks() const {
    std::vector<Track> out;
    for (const auto& t : tracks_) {
      if (t.was_confirmed()) out.push_back(t);
    }
    return out;
  }

 private:
  void spawn(const HeadDetection& det, std::int64_t frame_index) {
    Track t;
    t.id = next_id_++;
    t.hits = 1;
    t.first_partial = det.partial;
    t.first_border_px = det.border_distance_px;
    TrackEntry e{frame_index, det.center_room, det.axis_angle_rad, 0.0, det.center_px};
    e.phi_rad = resolve_direction(std::nullopt, det.axis_angle_rad, heading(room_.camera_position - det.center_room),
                                  cfg_.max_turn_rate_rad);
    t.history.push_back(e);
    try_confirm(t, det);
    tracks_.push_back(std::move(t));
  }

  void extend(Track& t, const HeadDetection& det, std::int64_t frame_index) {
    t.misses = 0;
    ++t.hits;
    TrackEntry e{frame_index, det.center_room, det.axis_angle_rad, 0.0, det.center_px};
    const Vec2 step = det.center_room - t.history.back().position;
    if (t.status == TrackStatus::tentative) {
      e.phi_rad = resolve_direction(std::nullopt, det.axis_angle_rad, entry_direction(t, det.center_room),
                                    cfg_.max_turn_rate_rad);
      t.history.push_back(e);
      try_confirm(t, det);
    } else {
      const double dir = norm(step) >= cfg_.standstill_m ? heading(step) : *t.phi_rad;
      e.phi_rad = resolve_direction(t.phi_rad, det.axis_angle_rad, dir, cfg_.max_turn_rate_rad);
      t.phi_rad = e.phi_rad;
      t.history.push_back(e);
    }
  }

  // Net motion since the first sighting, or the direction from the entry
  // point toward the middle of the view when the head has barely moved.
  Vec2 entry_vector(const Track& t, Vec2 current) const {
    const Vec2 net = current - t.history.front().position;
    if (norm(net) >= 0.05) return net;
    return room_.camera_position - t.history.front().position;
  }
  double entry_direction(const Track& t, Vec2 current) const { return heading(entry_vector(t, current)); }

  void try_confirm(Track& t, const HeadDetection& latest) {
    if (t.hits < cfg_.confirm_hits) return;
    const bool moved_in = !t.first_partial || latest.border_distance_px - t.first_border_px >= cfg_.inward_margin_px;
    if (!moved_in) return;
    t.status = TrackStatus::confirmed;
    // Re-resolve the whole history now that the entry motion is known. The
    // entry farthest from the image border (least clipped head) is resolved
    // against the entry motion; the others follow by continuity from it.
    auto& h = t.history;
    std::size_t anchor = 0;
    for (std::size_t i = 1; i < h.size(); ++i) {
      if (border_distance(h[i].center_px) > border_distance(h[anchor].center_px)) anchor = i;
    }
    h[anchor].phi_rad = resolve_direction(std::nullopt, h[anchor].axis_angle_rad,
                                          entry_direction(t, h.back().position), cfg_.max_turn_rate_rad);
    auto follow = [&](std::size_t from, std::size_t to) {
      const Vec2 step = h[to].position - h[from].position;
      const double dir = norm(step) >= cfg_.standstill_m ? heading(step) : h[from].phi_rad;
      h[to].phi_rad = resolve_direction(h[from].phi_rad, h[to].axis_angle_rad, dir, cfg_.max_turn_rate_rad);
    };
    for (std::size_t i = anchor + 1; i < h.size(); ++i) follow(i - 1, i);
    for (std::size_t i = anchor; i-- > 0;) follow(i + 1, i);
    t.phi_rad = h.back().phi_rad;
  }

  double border_distance(Vec2 px) const {
    return std::min({px.x, px.y, room_.image_width - 1 - px.x, room_.image_height - 1 - px.y});
  }

  RoomModel room_;
  PipelineConfig cfg_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
  std::optional<std::int64_t> last_frame_;
};

}  // namespace foa
