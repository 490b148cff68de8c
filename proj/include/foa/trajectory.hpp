#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foa/error.hpp"
#include "foa/geometry.hpp"
#include "foa/room_model.hpp"
#include "foa/tracking.hpp"

namespace foa {

// One sample of an oriented trajectory: position, speed, walking direction,
// head direction and (unused) pitch, all in room coordinates.
struct OrientedState {
  std::int64_t frame_index = 0;
  Vec2 p_prime;
  double v = 0.0;    // m/s
  double psi = 0.0;  // [0, 2pi)
  double phi = 0.0;  // [0, 2pi)
  std::optional<double> theta;
};

struct OrientedTrajectory {
  int person_id = 0;
  std::vector<OrientedState> states;

  double duration_s(double fps) const { return static_cast<double>(states.size()) / fps; }
};

struct SignObservation {
  std::int64_t frame_index = 0;
  std::string sign_id;
  double rho = 0.0;  // direction from the head to the sign center, [0, 2pi)
  bool in_cone = false;
};

// Differencing rules shared by tracked and ground-truth trajectories:
// v_k = |p_k - p_{k-1}| / (frame gap) * fps with v_0 = v_1; psi_k is the
// heading of the same displacement, held at its previous value while the
// per-frame displacement stays under cfg.standstill_m. Before the first
// qualifying displacement psi takes the first later one, or phi_0 if the
// person never moves.
inline OrientedTrajectory oriented_trajectory(int person_id, std::span<const std::int64_t> frames,
                                              std::span<const Vec2> positions, std::span<const double> phis,
                                              const PipelineConfig& cfg) {
  const std::size_t n = frames.size();
  if (positions.size() != n || phis.size() != n) {
    throw PreconditionError("oriented_trajectory: inconsistent input lengths");
  }
  if (n < 2) throw TrackTooShort("oriented_trajectory: need at least 2 states");
  for (std::size_t k = 1; k < n; ++k) {
    if (frames[k] <= frames[k - 1]) throw PreconditionError("oriented_trajectory: frames must increase");
  }

  std::vector<Vec2> p(positions.begin(), positions.end());
  if (cfg.smooth_trajectory && n >= 3) {
    for (std::size_t k = 1; k + 1 < n; ++k) {
      p[k] = (1.0 / 3.0) * (positions[k - 1] + positions[k] + positions[k + 1]);
    }
  }

  OrientedTrajectory traj{person_id, std::vector<OrientedState>(n)};
  std::optional<double> psi;
  std::vector<std::size_t> pending;  // states waiting for a first heading
  for (std::size_t k = 0; k < n; ++k) {
    auto& s = traj.states[k];
    s.frame_index = frames[k];
    s.p_prime = p[k];
    s.phi = wrap_two_pi(phis[k]);
    if (k == 0) {
      pending.push_back(k);
      continue;
    }
    const double gap = static_cast<double>(frames[k] - frames[k - 1]);
    const Vec2 d = p[k] - p[k - 1];
    s.v = norm(d) / gap * cfg.fps;
    if (norm(d) / gap >= cfg.standstill_m) psi = wrap_two_pi(heading(d));
    if (psi) {
      s.psi = *psi;
      for (std::size_t j : pending) traj.states[j].psi = *psi;
      pending.clear();
    } else {
      pending.push_back(k);
    }
  }
  for (std::size_t j : pending) traj.states[j].psi = traj.states.front().phi;
  traj.states[0].v = traj.states[1].v;
  return traj;
}

inline OrientedTrajectory build_trajectory(const Track& track, const RoomModel& room, const PipelineConfig& cfg) {
  (void)room;
  if (!track.was_confirmed()) throw PreconditionError("build_trajectory: track not confirmed");
  if (track.history.size() < 2) throw TrackTooShort("build_trajectory: track has fewer than 2 entries");
  std::vector<std::int64_t> frames;
  std::vector<Vec2> positions;
  std::vector<double> phis;
  for (const auto& e : track.history) {
    frames.push_back(e.frame_index);
    positions.push_back(e.position);
    phis.push_back(e.phi_rad);
  }
  return oriented_trajectory(track.id, frames, positions, phis, cfg);
}

inline bool in_cone(double direction, double phi, double half_angle) {
  return angular_distance(direction, phi) <= half_angle;
}

inline std::vector<SignObservation> sign_angles(const OrientedState& state, const std::vector<SignSpec>& signs,
                                                const RoomModel& room, double cone_half_angle) {
  std::vector<SignObservation> out;
  out.reserve(signs.size());
  for (const auto& sign : signs) {
    const double rho = wrap_two_pi(heading(sign_center(room, sign) - state.p_prime));
    out.push_back({state.frame_index, sign.id, rho, in_cone(rho, state.phi, cone_half_angle)});
  }
  return out;
}

inline void write_trajectories_csv(std::ostream& out, const std::vector<OrientedTrajectory>& trajs) {
  out << "frame,person_id,x,y,v,psi_deg,phi_deg\n";
  char buf[256];
  for (const auto& t : trajs) {
    for (const auto& s : t.states) {
      std::snprintf(buf, sizeof buf, "%lld,%d,%.4f,%.4f,%.4f,%.4f,%.4f\n", static_cast<long long>(s.frame_index),
                    t.person_id, s.p_prime.x, s.p_prime.y, s.v, rad2deg(s.psi), rad2deg(s.phi));
      out << buf;
    }
  }
}

}  // namespace foa
