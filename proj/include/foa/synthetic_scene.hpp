#pragma once

// Scripted top-view depth scenes with exact ground truth.
//
// A person is an ellipsoidal head (long axis along the facing direction)
// sitting above a dome of shoulders that continues down to the floor as an
// elliptic cylinder. Every pixel ray of the pinhole camera is intersected
// with all surfaces and the nearest hit wins. Waypoint and head-angle
// schedules are keyframed and interpolated linearly (angles along the
// shorter arc); a person is present from its first to its last waypoint.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "foa/attention.hpp"
#include "foa/depth_io.hpp"
#include "foa/error.hpp"
#include "foa/geometry.hpp"
#include "foa/head_detection.hpp"
#include "foa/room_model.hpp"
#include "foa/trajectory.hpp"

namespace foa {

struct PersonGeometry {
  double height_m = 1.75;
  double head_radius_major_m = 0.10;  // along the facing direction
  double head_radius_minor_m = 0.075;
  double head_half_height_m = 0.12;
  double shoulder_width_m = 0.44;
  double torso_depth_m = 0.24;
  double shoulder_depth_drop_m = 0.27;  // head top to shoulder top
  double shoulder_half_height_m = 0.12;

  double footprint_radius() const { return 0.5 * std::max(shoulder_width_m, torso_depth_m); }
};

template <typename T>
struct Keyframe {
  int frame = 0;
  T value{};
};

struct ScriptedPerson {
  std::string name;
  PersonGeometry geometry;
  std::vector<Keyframe<Vec2>> waypoints;
  std::vector<Keyframe<double>> head_angles;  // radians

  int first_frame() const { return waypoints.front().frame; }
  int last_frame() const { return waypoints.back().frame; }
  bool present(int k) const { return !waypoints.empty() && k >= first_frame() && k <= last_frame(); }

  Vec2 position_at(int k) const {
    if (k <= waypoints.front().frame) return waypoints.front().value;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
      if (k <= waypoints[i].frame) {
        const auto& a = waypoints[i - 1];
        const auto& b = waypoints[i];
        const double t = static_cast<double>(k - a.frame) / (b.frame - a.frame);
        return a.value + t * (b.value - a.value);
      }
    }
    return waypoints.back().value;
  }

  double phi_at(int k) const {
    if (k <= head_angles.front().frame) return wrap_two_pi(head_angles.front().value);
    for (std::size_t i = 1; i < head_angles.size(); ++i) {
      if (k <= head_angles[i].frame) {
        const auto& a = head_angles[i - 1];
        const auto& b = head_angles[i];
        const double t = static_cast<double>(k - a.frame) / (b.frame - a.frame);
        return wrap_two_pi(a.value + t * signed_angle_diff(b.value, a.value));
      }
    }
    return wrap_two_pi(head_angles.back().value);
  }
};

struct BoxProp {
  std::string name;
  Vec2 min;
  Vec2 max;
  double height_m = 0.5;
};

struct ScenarioScript {
  std::vector<ScriptedPerson> persons;
  std::vector<BoxProp> props;
  int duration_frames = 0;
  double noise_sigma_mm = 10.0;
  std::uint64_t seed = 1;
};

inline void validate(const ScenarioScript& s, const RoomModel& room) {
  using detail::require;
  require(s.duration_frames > 0, "duration_frames", "must be positive");
  require(s.noise_sigma_mm >= 0.0, "noise_sigma_mm", "must be non-negative");
  for (const auto& p : s.persons) {
    const std::string f = "person " + p.name;
    const auto& g = p.geometry;
    require(g.height_m > 0 && g.head_radius_major_m > 0 && g.head_radius_minor_m > 0 && g.head_half_height_m > 0 &&
                g.shoulder_width_m > 0 && g.torso_depth_m > 0 && g.shoulder_depth_drop_m > 0 &&
                g.shoulder_half_height_m > 0,
            f, "geometry values must be positive");
    require(g.head_radius_major_m >= g.head_radius_minor_m, f + ".head_radius_major_m",
            "must be at least head_radius_minor_m");
    require(g.height_m < room.camera_height_m, f + ".height_m", "person taller than the camera height");
    require(g.shoulder_depth_drop_m + g.shoulder_half_height_m < g.height_m, f + ".shoulder_depth_drop_m",
            "shoulders below the floor");
    require(!p.waypoints.empty(), f + ".waypoints", "at least one waypoint required");
    require(!p.head_angles.empty(), f + ".head_angles_deg", "at least one head angle required");
    for (std::size_t i = 1; i < p.waypoints.size(); ++i) {
      require(p.waypoints[i].frame > p.waypoints[i - 1].frame, f + ".waypoints", "frames must increase");
    }
    for (std::size_t i = 1; i < p.head_angles.size(); ++i) {
      require(p.head_angles[i].frame > p.head_angles[i - 1].frame, f + ".head_angles_deg", "frames must increase");
    }
    require(p.first_frame() >= 0 && p.last_frame() < s.duration_frames, f + ".waypoints",
            "schedule must lie within [0, duration_frames)");
    for (const auto& w : p.waypoints) {
      require(room.contains(w.value), f + ".waypoints", "position outside the room");
    }
  }
  for (const auto& b : s.props) {
    require(b.max.x > b.min.x && b.max.y > b.min.y && b.height_m > 0.0, "prop " + b.name, "empty box");
  }
}

// ---------------------------------------------------------------------------
// Ray casting
//
// Nadir approximation: a person or prop is seen from straight above along
// the vertical through the point where the pixel's pinhole ray crosses the
// object's top height. Depth is the vertical distance to the nearest surface.

namespace detail {

// Pixel ray parameterised by z, the vertical distance below the camera.
struct Ray {
  double ox, oy, top;  // camera position and height
  double dx, dy;       // horizontal displacement per metre of z
};

inline Ray pixel_ray(const RoomModel& room, int u, int v) {
  return {room.camera_position.x, room.camera_position.y, room.camera_height_m,
          (u - room.principal_point.x) / room.focal_px, (v - room.principal_point.y) / room.focal_px};
}

// Vertical ray through the point where r crosses height_m above the floor.
inline Ray nadir_at(const Ray& r, double height_m) {
  const double z = r.top - height_m;
  return {r.ox + r.dx * z, r.oy + r.dy * z, r.top, 0.0, 0.0};
}

// Smallest z > 0 where the ray meets the ellipsoid centred at (c, cz) with
// semi-axes a (along yaw), b (across) and h (vertical).
inline std::optional<double> hit_ellipsoid(const Ray& r, Vec2 c, double cz, double yaw, double a, double b,
                                           double h) {
  const double cs = std::cos(yaw), sn = std::sin(yaw);
  const double qx0 = r.ox - c.x, qy0 = r.oy - c.y;
  const double lx0 = (qx0 * cs + qy0 * sn) / a, lx1 = (r.dx * cs + r.dy * sn) / a;
  const double ly0 = (-qx0 * sn + qy0 * cs) / b, ly1 = (-r.dx * sn + r.dy * cs) / b;
  const double lz0 = (r.top - cz) / h, lz1 = -1.0 / h;
  const double A = lx1 * lx1 + ly1 * ly1 + lz1 * lz1;
  const double B = 2.0 * (lx0 * lx1 + ly0 * ly1 + lz0 * lz1);
  const double C = lx0 * lx0 + ly0 * ly0 + lz0 * lz0 - 1.0;
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return std::nullopt;
  const double z = (-B - std::sqrt(disc)) / (2.0 * A);
  if (z <= 0.0) return std::nullopt;
  return z;
}

// Vertical elliptic cylinder between heights lo and hi, capped at hi.
inline std::optional<double> hit_cylinder(const Ray& r, Vec2 c, double yaw, double a, double b, double lo,
                                          double hi) {
  const double cs = std::cos(yaw), sn = std::sin(yaw);
  const double qx0 = r.ox - c.x, qy0 = r.oy - c.y;
  const double lx0 = (qx0 * cs + qy0 * sn) / a, lx1 = (r.dx * cs + r.dy * sn) / a;
  const double ly0 = (-qx0 * sn + qy0 * cs) / b, ly1 = (-r.dx * sn + r.dy * cs) / b;
  const double A = lx1 * lx1 + ly1 * ly1;
  const double B = 2.0 * (lx0 * lx1 + ly0 * ly1);
  const double C = lx0 * lx0 + ly0 * ly0 - 1.0;
  if (A <= 0.0) {
    if (C > 0.0 || r.top - hi <= 0.0) return std::nullopt;
    return r.top - hi;
  }
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return std::nullopt;
  const double z = (-B - std::sqrt(disc)) / (2.0 * A);
  const double height = r.top - z;
  if (z <= 0.0 || height < lo || height > hi) return std::nullopt;
  return z;
}

inline std::optional<double> hit_box(const Ray& r, const BoxProp& b) {
  double t0 = r.top - b.height_m, t1 = r.top;
  auto slab = [&](double o, double d, double lo, double hi) {
    if (d == 0.0) return o >= lo && o <= hi;
    double a = (lo - o) / d, c = (hi - o) / d;
    if (a > c) std::swap(a, c);
    t0 = std::max(t0, a);
    t1 = std::min(t1, c);
    return t0 <= t1;
  };
  if (!slab(r.ox, r.dx, b.min.x, b.max.x) || !slab(r.oy, r.dy, b.min.y, b.max.y)) return std::nullopt;
  if (t0 > t1 || t0 <= 0.0) return std::nullopt;
  return t0;
}

}  // namespace detail

// Per-pixel labels of a render: 0 floor, kPropLabel props, and for person i
// head 1 + 2i, shoulders/torso 2 + 2i.
inline constexpr std::uint8_t kPropLabel = 255;
inline constexpr std::uint8_t head_label(std::size_t person) { return static_cast<std::uint8_t>(1 + 2 * person); }
inline constexpr std::uint8_t body_label(std::size_t person) { return static_cast<std::uint8_t>(2 + 2 * person); }

struct PersonPose {
  Vec2 position;
  double phi = 0.0;
};

// Renders persons in the given poses plus props. noise_sigma_mm = 0 gives
// exact depths; otherwise noise is drawn from a generator seeded with
// `seed`. labels, when given, receives one label per pixel.
inline DepthFrame render_poses(const RoomModel& room, const std::vector<PersonGeometry>& geometry,
                               const std::vector<PersonPose>& poses, const std::vector<BoxProp>& props,
                               double noise_sigma_mm, std::uint64_t seed,
                               std::vector<std::uint8_t>* labels = nullptr) {
  const int w = room.image_width, h = room.image_height;
  DepthFrame frame(w, h);
  if (labels) labels->assign(static_cast<std::size_t>(w) * h, 0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const auto ray = detail::pixel_ray(room, u, v);
      double best = room.camera_height_m;
      std::uint8_t label = 0;
      auto consider = [&](std::optional<double> z, std::uint8_t l) {
        if (z && *z < best) {
          best = *z;
          label = l;
        }
      };
      for (const auto& b : props) consider(detail::hit_box(detail::nadir_at(ray, b.height_m), b), kPropLabel);
      for (std::size_t i = 0; i < poses.size(); ++i) {
        const auto& g = geometry[i];
        const auto& pose = poses[i];
        const double shoulder_top = g.height_m - g.shoulder_depth_drop_m;
        const double shoulder_center = shoulder_top - g.shoulder_half_height_m;
        const auto body_ray = detail::nadir_at(ray, g.height_m);
        if (distance({body_ray.ox, body_ray.oy}, pose.position) > g.footprint_radius() + 0.01) continue;
        consider(detail::hit_ellipsoid(body_ray, pose.position, g.height_m - g.head_half_height_m, pose.phi,
                                       g.head_radius_major_m, g.head_radius_minor_m, g.head_half_height_m),
                 head_label(i));
        consider(detail::hit_ellipsoid(body_ray, pose.position, shoulder_center, pose.phi, 0.5 * g.torso_depth_m,
                                       0.5 * g.shoulder_width_m, g.shoulder_half_height_m),
                 body_label(i));
        consider(detail::hit_cylinder(body_ray, pose.position, pose.phi, 0.5 * g.torso_depth_m,
                                      0.5 * g.shoulder_width_m, 0.0, shoulder_center),
                 body_label(i));
      }
      double mm = best * 1000.0;
      if (noise_sigma_mm > 0.0) mm += noise_sigma_mm * noise(rng);
      frame.at(u, v) = static_cast<std::uint16_t>(std::clamp(std::lround(mm), 1L, 65535L));
      if (labels) (*labels)[static_cast<std::size_t>(v) * w + u] = label;
    }
  }
  return frame;
}

inline BackgroundModel render_background(const RoomModel& room) {
  return BackgroundModel::from_frame(render_poses(room, {}, {}, {}, 0.0, 0));
}

inline std::uint64_t frame_seed(std::uint64_t seed, int k) {
  // splitmix64 of (seed, k) so neighbouring frames get unrelated streams.
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(k) + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline DepthFrame render_frame(const ScenarioScript& script, int k, const RoomModel& room,
                               std::vector<std::uint8_t>* labels = nullptr) {
  if (k < 0 || k >= script.duration_frames) throw PreconditionError("render_frame: frame outside the script");
  std::vector<PersonGeometry> geometry;
  std::vector<PersonPose> poses;
  for (const auto& p : script.persons) {
    if (!p.present(k)) continue;
    geometry.push_back(p.geometry);
    poses.push_back({p.position_at(k), p.phi_at(k)});
  }
  auto frame = render_poses(room, geometry, poses, script.props, script.noise_sigma_mm,
                            frame_seed(script.seed, k), labels);
  frame.frame_index = k;
  frame.timestamp_s = 0.0;
  return frame;
}

// ---------------------------------------------------------------------------
// Ground truth

struct GroundTruthRecord {
  std::int64_t frame_index = 0;
  int person_id = 0;  // 1-based script order
  Vec2 position;
  double phi = 0.0;
  bool head_in_view = false;
  bool fully_visible = false;
};

struct GroundTruth {
  std::vector<GroundTruthRecord> records;
  std::vector<OrientedTrajectory> trajectories;
  AttentionMap map;
  SignReport report;
};

inline bool projects_inside(const RoomModel& room, Vec2 p, double depth_m, double margin_px) {
  const Vec2 px = room_to_pixel(p, depth_m * 1000.0, room);
  return px.x >= margin_px && px.y >= margin_px && px.x <= room.image_width - 1 - margin_px &&
         px.y <= room.image_height - 1 - margin_px;
}

inline bool head_in_view(const RoomModel& room, const PersonGeometry& g, Vec2 position) {
  return projects_inside(room, position, room.camera_height_m - g.height_m, 0.0);
}

// The whole silhouette, shoulders included, is inside the image. The
// renderer images a person at the scale of the head top.
inline bool fully_visible(const RoomModel& room, const PersonGeometry& g, Vec2 position) {
  const double depth = room.camera_height_m - g.height_m;
  const double r = g.footprint_radius();
  for (Vec2 off : {Vec2{r, 0}, Vec2{-r, 0}, Vec2{0, r}, Vec2{0, -r}}) {
    if (!projects_inside(room, position + off, depth, 1.0)) return false;
  }
  return true;
}

// Exact states from the schedules over the frames where the head is in
// view, run through the same trajectory and attention code as the
// pipeline.
inline GroundTruth ground_truth(const ScenarioScript& script, const RoomModel& room,
                                const std::vector<SignSpec>& signs, const PipelineConfig& cfg) {
  GroundTruth gt;
  for (std::size_t i = 0; i < script.persons.size(); ++i) {
    const auto& p = script.persons[i];
    std::vector<std::int64_t> frames;
    std::vector<Vec2> positions;
    std::vector<double> phis;
    for (int k = 0; k < script.duration_frames; ++k) {
      if (!p.present(k)) continue;
      GroundTruthRecord rec;
      rec.frame_index = k;
      rec.person_id = static_cast<int>(i) + 1;
      rec.position = p.position_at(k);
      rec.phi = p.phi_at(k);
      rec.head_in_view = head_in_view(room, p.geometry, rec.position);
      rec.fully_visible = fully_visible(room, p.geometry, rec.position);
      gt.records.push_back(rec);
      if (rec.head_in_view) {
        frames.push_back(k);
        positions.push_back(rec.position);
        phis.push_back(rec.phi);
      }
    }
    if (frames.size() >= 2) {
      gt.trajectories.push_back(oriented_trajectory(static_cast<int>(i) + 1, frames, positions, phis, cfg));
    }
  }
  const auto params = AttentionParams::from(cfg);
  const auto samples = wall_samples(room, cfg.wall_step_m);
  std::vector<AttentionMap> maps;
  for (const auto& t : gt.trajectories) maps.push_back(accumulate_trajectory(t, room, samples, params));
  gt.map = maps.empty() ? normalize_attention(samples, std::vector<double>(samples.size(), 0.0)) : aggregate(maps);
  gt.report = sign_report(gt.map, signs, room, gt.trajectories, params);
  return gt;
}

inline void write_ground_truth_csv(std::ostream& out, const std::vector<GroundTruthRecord>& records) {
  out << "frame,person_id,x,y,phi_deg,head_in_view,fully_visible\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%lld,%d,%.6f,%.6f,%.6f,%d,%d\n", static_cast<long long>(r.frame_index),
                  r.person_id, r.position.x, r.position.y, rad2deg(r.phi), r.head_in_view ? 1 : 0,
                  r.fully_visible ? 1 : 0);
    out << buf;
  }
}

inline std::vector<GroundTruthRecord> read_ground_truth_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), "cannot open");
  std::vector<GroundTruthRecord> out;
  std::string line;
  std::getline(in, line);  // header
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    GroundTruthRecord r;
    double phi_deg = 0.0;
    int in_view = 0, full = 0;
    if (!(ls >> r.frame_index >> r.person_id >> r.position.x >> r.position.y >> phi_deg >> in_view >> full)) {
      throw DataError(path.string(), "malformed line " + std::to_string(line_no));
    }
    r.phi = deg2rad(phi_deg);
    r.head_in_view = in_view != 0;
    r.fully_visible = full != 0;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reference head histograms

struct NamedGeometry {
  std::string name;
  PersonGeometry geometry;
};

inline std::vector<NamedGeometry> canonical_geometries() {
  PersonGeometry average;
  PersonGeometry tall = average;
  tall.height_m = 1.90;
  tall.shoulder_width_m = 0.46;
  PersonGeometry short_ = average;
  short_.height_m = 1.60;
  short_.shoulder_width_m = 0.41;
  short_.head_radius_major_m = 0.095;
  short_.head_radius_minor_m = 0.072;
  PersonGeometry broad = average;
  broad.shoulder_width_m = 0.52;
  broad.torso_depth_m = 0.28;
  PersonGeometry narrow = average;
  narrow.shoulder_width_m = 0.38;
  narrow.torso_depth_m = 0.21;
  return {{"tall", tall}, {"short", short_}, {"broad", broad}, {"narrow", narrow}, {"average", average}};
}

// Histogram of the person blob, one per canonical geometry, rendered
// noise-free under the camera.
inline ReferenceSet make_reference_histograms(const RoomModel& room, const PipelineConfig& cfg) {
  ReferenceSet refs;
  const auto bg = render_background(room);
  for (const auto& [name, g] : canonical_geometries()) {
    const auto frame = render_poses(room, {g}, {{room.camera_position, 0.0}}, {}, 0.0, 0);
    const auto blobs = extract_blobs(subtract_background(frame, bg, cfg.bg_delta_mm), 1);
    if (blobs.empty()) throw Error("make_reference_histograms: reference person not visible");
    refs.names.push_back(name);
    refs.histograms.push_back(
        blob_histogram(frame, blobs.front(), cfg.hist_bins, cfg.hist_lo_mm, cfg.hist_hi_mm));
  }
  return refs;
}

// ---------------------------------------------------------------------------
// Script files (same INI dialect as the configuration)
//
//   [scenario]        duration_frames, noise_sigma_mm, seed
//   [person <name>]   geometry keys of PersonGeometry,
//                     waypoints = <frame> <x> <y>, <frame> <x> <y>, ...
//                     head_angles_deg = <frame> <deg>, ...
//   [prop <name>]     x_min_m, y_min_m, x_max_m, y_max_m, height_m

namespace detail {

inline std::vector<std::vector<double>> parse_tuples(const std::string& text, std::size_t arity,
                                                     const std::string& field) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    std::istringstream is(item);
    std::vector<double> t;
    double x;
    while (is >> x) t.push_back(x);
    if (!is.eof() || t.size() != arity) {
      throw ParseError(field + ": expected " + std::to_string(arity) + " numbers per entry, got '" + trim(item) + "'");
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace detail

inline ScenarioScript parse_script(std::istream& in, const std::string& origin = "<script>") {
  detail::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ScenarioScript s;
  for (const auto& [name, node] : tree) {
    if (name == "scenario") {
      detail::SectionReader r(node, name);
      r.get("duration_frames", s.duration_frames);
      r.get("noise_sigma_mm", s.noise_sigma_mm);
      r.get("seed", s.seed);
      r.finish();
    } else if (name.rfind("person ", 0) == 0) {
      ScriptedPerson p;
      p.name = detail::trim(name.substr(7));
      auto& g = p.geometry;
      detail::SectionReader r(node, name);
      r.get("height_m", g.height_m);
      r.get("head_radius_major_m", g.head_radius_major_m);
      r.get("head_radius_minor_m", g.head_radius_minor_m);
      r.get("head_half_height_m", g.head_half_height_m);
      r.get("shoulder_width_m", g.shoulder_width_m);
      r.get("torso_depth_m", g.torso_depth_m);
      r.get("shoulder_depth_drop_m", g.shoulder_depth_drop_m);
      r.get("shoulder_half_height_m", g.shoulder_half_height_m);
      std::string waypoints, angles;
      r.get("waypoints", waypoints);
      r.get("head_angles_deg", angles);
      r.finish();
      for (const auto& t : detail::parse_tuples(waypoints, 3, name + ".waypoints")) {
        p.waypoints.push_back({static_cast<int>(t[0]), {t[1], t[2]}});
      }
      for (const auto& t : detail::parse_tuples(angles, 2, name + ".head_angles_deg")) {
        p.head_angles.push_back({static_cast<int>(t[0]), deg2rad(t[1])});
      }
      s.persons.push_back(std::move(p));
    } else if (name.rfind("prop ", 0) == 0) {
      BoxProp b;
      b.name = detail::trim(name.substr(5));
      detail::SectionReader r(node, name);
      r.get("x_min_m", b.min.x);
      r.get("y_min_m", b.min.y);
      r.get("x_max_m", b.max.x);
      r.get("y_max_m", b.max.y);
      r.get("height_m", b.height_m);
      r.finish();
      s.props.push_back(b);
    } else {
      throw ParseError(origin + ": unknown section [" + name + "]");
    }
  }
  return s;
}

inline ScenarioScript load_script(const std::filesystem::path& path, const RoomModel& room) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  auto s = parse_script(in, path.string());
  validate(s, room);
  return s;
}

inline void write_script(std::ostream& out, const ScenarioScript& s) {
  out.precision(10);
  out << "[scenario]\nduration_frames = " << s.duration_frames << "\nnoise_sigma_mm = " << s.noise_sigma_mm
      << "\nseed = " << s.seed << "\n";
  for (const auto& p : s.persons) {
    const auto& g = p.geometry;
    out << "\n[person " << p.name << "]\n"
        << "height_m = " << g.height_m << "\n"
        << "head_radius_major_m = " << g.head_radius_major_m << "\n"
        << "head_radius_minor_m = " << g.head_radius_minor_m << "\n"
        << "head_half_height_m = " << g.head_half_height_m << "\n"
        << "shoulder_width_m = " << g.shoulder_width_m << "\n"
        << "torso_depth_m = " << g.torso_depth_m << "\n"
        << "shoulder_depth_drop_m = " << g.shoulder_depth_drop_m << "\n"
        << "shoulder_half_height_m = " << g.shoulder_half_height_m << "\n"
        << "waypoints = ";
    for (std::size_t i = 0; i < p.waypoints.size(); ++i) {
      out << (i ? ", " : "") << p.waypoints[i].frame << " " << p.waypoints[i].value.x << " "
          << p.waypoints[i].value.y;
    }
    out << "\nhead_angles_deg = ";
    for (std::size_t i = 0; i < p.head_angles.size(); ++i) {
      out << (i ? ", " : "") << p.head_angles[i].frame << " " << rad2deg(p.head_angles[i].value);
    }
    out << "\n";
  }
  for (const auto& b : s.props) {
    out << "\n[prop " << b.name << "]\n"
        << "x_min_m = " << b.min.x << "\ny_min_m = " << b.min.y << "\nx_max_m = " << b.max.x
        << "\ny_max_m = " << b.max.y << "\nheight_m = " << b.height_m << "\n";
  }
}

}  // namespace foa
