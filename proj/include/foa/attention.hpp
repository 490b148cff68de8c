#pragma once

// Focus-of-attention density over the room walls.
//
// A wall point p inside the viewer's attention cone receives
//
//   A = 1/r * (1 + c2 * d(psi, phi)) * 1/(kappa + v)
//
// where r is the head-to-point distance (clamped below at r_clamp_m), d the
// circular distance between walking and head direction and v the speed.
// Points outside the cone receive nothing. The overall scale C1 is never
// stored: every map is normalised to unit mass, which makes any positive
// scale equivalent.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "foa/depth_io.hpp"
#include "foa/error.hpp"
#include "foa/geometry.hpp"
#include "foa/room_model.hpp"
#include "foa/trajectory.hpp"

namespace foa {

struct AttentionParams {
  double cone_half_angle_rad = deg2rad(30.0);
  double c2 = 0.5;
  double kappa = 0.1;
  double fps = 4.0;
  double r_clamp_m = 0.3;

  static AttentionParams from(const PipelineConfig& c) {
    return {c.cone_half_angle_rad, c.c2, c.kappa, c.fps, c.r_clamp_m};
  }
};

struct AttentionMap {
  std::vector<WallSample> samples;
  std::vector<double> values;
  bool normalized = false;

  double total() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
};

inline double attention_distance(double r) {
  if (!(r > 0.0)) throw DomainError("attention_distance: r must be positive");
  return 1.0 / r;
}

inline double attention_speed(double v, double kappa) {
  if (!(v >= 0.0)) throw DomainError("attention_speed: negative speed");
  if (!(kappa > 0.0)) throw DomainError("attention_speed: kappa must be positive");
  return 1.0 / (kappa + v);
}

inline double attention_angle(double psi, double phi, double c2) { return 1.0 + c2 * angular_distance(psi, phi); }

inline double instantaneous_attention(const OrientedState& state, Vec2 point, const AttentionParams& params) {
  const Vec2 d = point - state.p_prime;
  const double r = norm(d);
  if (r == 0.0) throw DomainError("instantaneous_attention: point coincides with the head");
  if (!in_cone(heading(d), state.phi, params.cone_half_angle_rad)) return 0.0;
  return attention_distance(std::max(r, params.r_clamp_m)) * attention_angle(state.psi, state.phi, params.c2) *
         attention_speed(state.v, params.kappa);
}

namespace detail {

struct WallRun {
  Wall wall;
  std::size_t first = 0;  // index of the run's first sample
  std::size_t count = 0;
  double spacing = 0.0;
  bool ascending = true;
};

inline std::vector<WallRun> wall_runs(const std::vector<WallSample>& samples) {
  std::vector<WallRun> runs;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (runs.empty() || runs.back().wall != samples[i].wall) {
      runs.push_back({samples[i].wall, i, 0, 0.0, true});
    }
    ++runs.back().count;
  }
  for (auto& run : runs) {
    if (run.count >= 2) {
      const double o0 = samples[run.first].offset_m;
      const double o1 = samples[run.first + 1].offset_m;
      run.ascending = o1 > o0;
      run.spacing = std::abs(o1 - o0);
    } else {
      run.spacing = 2.0 * samples[run.first].offset_m;
    }
  }
  return runs;
}

inline Vec2 outward_normal(Wall w) {
  switch (w) {
    case Wall::S: return {0.0, -1.0};
    case Wall::E: return {1.0, 0.0};
    case Wall::N: return {0.0, 1.0};
    case Wall::W: return {-1.0, 0.0};
  }
  return {};
}

inline Vec2 wall_axis(Wall w) { return (w == Wall::S || w == Wall::N) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0}; }

// Range of wall offsets the cone can reach from p on the wall's line, or
// nullopt when the cone misses the wall. Seen from p, the direction to a
// wall point at signed distance s from the foot of the perpendicular makes
// the angle atan(s/d) with the outward normal, monotone in s, so the cone
// maps to one interval.
inline std::optional<std::pair<double, double>> cone_offsets_on_wall(const RoomModel& room, Wall w, Vec2 p,
                                                                     double phi, double half_angle) {
  const Vec2 m = outward_normal(w);
  const Vec2 t = wall_axis(w);
  const Vec2 foot_wall = room.wall(w).start;
  const double d = (foot_wall - p).x * m.x + (foot_wall - p).y * m.y;
  if (!(d > 0.0)) return std::nullopt;
  const double sigma = m.x * t.y - m.y * t.x;  // +-1
  const double beta = wrap_pi(phi - heading(m));
  constexpr double kEdge = kPi / 2.0 - 1e-9;
  const double lo = std::max(beta - half_angle, -kEdge);
  const double hi = std::min(beta + half_angle, kEdge);
  if (lo > hi) return std::nullopt;
  // Offset of the perpendicular foot along the wall axis.
  const double foot = (p.x - foot_wall.x) * t.x + (p.y - foot_wall.y) * t.y;
  double s1 = foot + sigma * d * std::tan(lo);
  double s2 = foot + sigma * d * std::tan(hi);
  if (s1 > s2) std::swap(s1, s2);
  return std::make_pair(s1, s2);
}

}  // namespace detail

// Per-sample sum over states of the instantaneous attention, before any
// normalisation. Only samples inside each cone are visited.
inline std::vector<double> raw_attention(const OrientedTrajectory& traj, const RoomModel& room,
                                         const std::vector<WallSample>& samples, const AttentionParams& params) {
  std::vector<double> acc(samples.size(), 0.0);
  const auto runs = detail::wall_runs(samples);
  for (const auto& state : traj.states) {
    const bool inside = room.contains(state.p_prime);
    for (const auto& run : runs) {
      std::size_t begin = run.first, end = run.first + run.count;
      if (inside) {
        const auto range = detail::cone_offsets_on_wall(room, run.wall, state.p_prime, state.phi,
                                                        params.cone_half_angle_rad);
        if (!range) continue;
        // Sample j (in ascending offset order) sits at (j + 0.5) * spacing.
        const double n = static_cast<double>(run.count);
        const double j_lo = std::clamp(std::ceil(range->first / run.spacing - 0.5) - 1.0, 0.0, n);
        const double j_hi = std::clamp(std::floor(range->second / run.spacing - 0.5) + 2.0, 0.0, n);
        if (j_lo >= j_hi) continue;
        const auto jl = static_cast<std::size_t>(j_lo), jh = static_cast<std::size_t>(j_hi);
        if (run.ascending) {
          begin = run.first + jl;
          end = run.first + jh;
        } else {
          begin = run.first + (run.count - jh);
          end = run.first + (run.count - jl);
        }
      }
      for (std::size_t i = begin; i < end; ++i) {
        acc[i] += instantaneous_attention(state, samples[i].position, params);
      }
    }
  }
  return acc;
}

// Divides by the total mass. An all-zero input yields an all-zero map with
// normalized = false.
inline AttentionMap normalize_attention(std::vector<WallSample> samples, std::vector<double> raw) {
  if (samples.size() != raw.size()) throw GridMismatch("normalize_attention: size mismatch");
  AttentionMap map{std::move(samples), std::move(raw), false};
  double total = 0.0;
  for (double v : map.values) {
    if (!(v >= 0.0)) throw DomainError("normalize_attention: negative or NaN attention");
    total += v;
  }
  if (total > 0.0) {
    for (double& v : map.values) v /= total;
    map.normalized = true;
  } else {
    std::fill(map.values.begin(), map.values.end(), 0.0);
  }
  return map;
}

inline AttentionMap accumulate_trajectory(const OrientedTrajectory& traj, const RoomModel& room,
                                          const std::vector<WallSample>& samples, const AttentionParams& params) {
  if (traj.states.empty()) throw PreconditionError("accumulate_trajectory: empty trajectory");
  return normalize_attention(samples, raw_attention(traj, room, samples, params));
}

inline bool same_grid(const std::vector<WallSample>& a, const std::vector<WallSample>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].wall != b[i].wall || a[i].position != b[i].position) return false;
  }
  return true;
}

// Sum of the individual normalised maps, renormalised. Unnormalisable maps
// contribute nothing. Summation order follows the input order.
inline AttentionMap aggregate(const std::vector<AttentionMap>& maps) {
  if (maps.empty()) return {};
  std::vector<double> sum(maps.front().samples.size(), 0.0);
  for (const auto& m : maps) {
    if (!same_grid(m.samples, maps.front().samples)) throw GridMismatch("aggregate: sample grids differ");
    if (!m.normalized) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += m.values[i];
  }
  return normalize_attention(maps.front().samples, std::move(sum));
}

inline double attention_time(const std::vector<OrientedTrajectory>& trajs, const SignSpec& sign,
                             const RoomModel& room, const AttentionParams& params) {
  const Vec2 c = sign_center(room, sign);
  std::size_t frames = 0;
  for (const auto& t : trajs) {
    for (const auto& s : t.states) {
      if (in_cone(heading(c - s.p_prime), s.phi, params.cone_half_angle_rad)) ++frames;
    }
  }
  return static_cast<double>(frames) / params.fps;
}

struct SignScore {
  std::string id;
  double accumulated = 0.0;
  double relative_percent = 0.0;
  double attention_time_s = 0.0;
};

struct SignReport {
  std::vector<SignScore> signs;

  // Sign ids by decreasing accumulated attention (ties keep input order).
  std::vector<std::string> ranking() const { return rank_by(&SignScore::accumulated); }
  std::vector<std::string> ranking_by_time() const { return rank_by(&SignScore::attention_time_s); }

 private:
  std::vector<std::string> rank_by(double SignScore::*field) const {
    std::vector<SignScore> s = signs;
    std::stable_sort(s.begin(), s.end(), [&](const SignScore& a, const SignScore& b) { return a.*field > b.*field; });
    std::vector<std::string> ids;
    for (const auto& x : s) ids.push_back(x.id);
    return ids;
  }
};

inline SignReport sign_report(const AttentionMap& map, const std::vector<SignSpec>& signs, const RoomModel& room,
                              const std::vector<OrientedTrajectory>& trajs, const AttentionParams& params) {
  SignReport report;
  for (const auto& sign : signs) report.signs.push_back({sign.id, 0.0, 0.0, attention_time(trajs, sign, room, params)});
  for (std::size_t i = 0; i < map.samples.size(); ++i) {
    if (auto k = sign_for_sample(map.samples[i], signs)) report.signs[*k].accumulated += map.values[i];
  }
  double best = 0.0;
  for (const auto& s : report.signs) best = std::max(best, s.accumulated);
  for (auto& s : report.signs) s.relative_percent = best > 0.0 ? 100.0 * s.accumulated / best : 0.0;
  return report;
}

inline nlohmann::ordered_json to_json(const SignReport& r) {
  nlohmann::ordered_json j;
  j["signs"] = nlohmann::ordered_json::array();
  for (const auto& s : r.signs) {
    j["signs"].push_back({{"id", s.id},
                          {"accumulated_attention", s.accumulated},
                          {"relative_percent", s.relative_percent},
                          {"attention_time_s", s.attention_time_s}});
  }
  j["ranking"] = r.ranking();
  j["ranking_by_attention_time"] = r.ranking_by_time();
  return j;
}

inline SignReport sign_report_from_json(const nlohmann::json& j) {
  SignReport r;
  for (const auto& s : j.at("signs")) {
    r.signs.push_back({s.at("id").get<std::string>(), s.at("accumulated_attention").get<double>(),
                       s.at("relative_percent").get<double>(), s.at("attention_time_s").get<double>()});
  }
  return r;
}

// Unrolled perimeter as an 8-bit strip: px_per_sample columns per sample,
// value 255 * v / max.
inline GrayImage attention_heatmap(const AttentionMap& map, int px_per_sample, int height_px = 32) {
  if (px_per_sample < 1 || height_px < 1) throw PreconditionError("attention_heatmap: bad image size");
  GrayImage img;
  img.width = static_cast<int>(map.values.size()) * px_per_sample;
  img.height = height_px;
  img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, 0);
  double peak = 0.0;
  for (double v : map.values) peak = std::max(peak, v);
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const auto level = peak > 0.0 ? static_cast<std::uint8_t>(std::lround(255.0 * map.values[i] / peak)) : 0;
    for (int y = 0; y < img.height; ++y) {
      for (int k = 0; k < px_per_sample; ++k) {
        img.pixels[static_cast<std::size_t>(y) * img.width + i * px_per_sample + k] = level;
      }
    }
  }
  return img;
}

}  // namespace foa
