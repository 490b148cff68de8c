#pragma once

// Room geometry, camera placement, sign layout and pipeline parameters.
//
// Room coordinates: x in [0, width_m], y in [0, depth_m], meters on the floor
// plane. The camera looks straight down and its image axes are aligned with
// the room axes (u grows with x, v grows with y). Depth values are vertical
// distances from the camera plane, not ray lengths.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "foa/error.hpp"
#include "foa/geometry.hpp"

namespace foa {

enum class Wall { S, E, N, W };

inline constexpr std::array<Wall, 4> kWallOrder = {Wall::S, Wall::E, Wall::N, Wall::W};

inline const char* wall_name(Wall w) {
  switch (w) {
    case Wall::S: return "S";
    case Wall::E: return "E";
    case Wall::N: return "N";
    case Wall::W: return "W";
  }
  return "?";
}

inline Wall parse_wall(const std::string& s) {
  if (s == "S") return Wall::S;
  if (s == "E") return Wall::E;
  if (s == "N") return Wall::N;
  if (s == "W") return Wall::W;
  throw ParseError("unknown wall '" + s + "' (expected N, S, E or W)");
}

struct WallSegment {
  Wall wall;
  Vec2 start;  // offset 0
  Vec2 end;    // offset = length()
  double length() const { return distance(start, end); }
};

struct RoomModel {
  double width_m = 5.0;
  double depth_m = 5.0;
  double max_person_height_m = 2.1;
  Vec2 camera_position{2.5, 2.5};
  double camera_height_m = 2.8;
  double focal_px = 160.0;
  Vec2 principal_point{160.0, 120.0};
  int image_width = 320;
  int image_height = 240;

  // S: y = 0, E: x = width, N: y = depth, W: x = 0. Offsets along S/N run
  // with x, along E/W with y.
  WallSegment wall(Wall w) const {
    switch (w) {
      case Wall::S: return {w, {0.0, 0.0}, {width_m, 0.0}};
      case Wall::E: return {w, {width_m, 0.0}, {width_m, depth_m}};
      case Wall::N: return {w, {0.0, depth_m}, {width_m, depth_m}};
      case Wall::W: return {w, {0.0, 0.0}, {0.0, depth_m}};
    }
    return {w, {}, {}};
  }
  std::array<WallSegment, 4> walls() const {
    return {wall(Wall::S), wall(Wall::E), wall(Wall::N), wall(Wall::W)};
  }
  double wall_length(Wall w) const {
    return (w == Wall::S || w == Wall::N) ? width_m : depth_m;
  }
  double perimeter() const { return 2.0 * (width_m + depth_m); }
  bool contains(Vec2 p) const {
    return p.x > 0.0 && p.x < width_m && p.y > 0.0 && p.y < depth_m;
  }
  Vec2 point_on_wall(Wall w, double offset) const {
    switch (w) {
      case Wall::S: return {offset, 0.0};
      case Wall::E: return {width_m, offset};
      case Wall::N: return {offset, depth_m};
      case Wall::W: return {0.0, offset};
    }
    return {};
  }
};

struct SignSpec {
  std::string id;
  Wall wall = Wall::N;
  double center_offset_m = 0.0;
  double width_m = 0.21;
  double mount_height_m = 1.5;  // informational, the analysis is planar

  double lo() const { return center_offset_m - 0.5 * width_m; }
  double hi() const { return center_offset_m + 0.5 * width_m; }
};

inline Vec2 sign_center(const RoomModel& room, const SignSpec& sign) {
  return room.point_on_wall(sign.wall, sign.center_offset_m);
}

struct PipelineConfig {
  double bg_delta_mm = 300.0;
  // 0 selects the footprint-scaled default, see effective_min_blob_px().
  int min_blob_px = 0;
  int hist_bins = 36;
  double hist_lo_mm = 800.0;
  double hist_hi_mm = 2600.0;
  double corr_threshold = 0.2;
  double gate_radius_m = 0.5;
  double cone_half_angle_rad = deg2rad(30.0);
  double c2 = 0.5;
  double kappa = 0.1;
  double wall_step_m = 0.05;
  double fps = 4.0;
  double max_turn_rate_rad = deg2rad(45.0);
  int confirm_hits = 3;
  int max_misses = 3;
  double inward_margin_px = 3.0;
  double standstill_m = 0.01;
  double r_clamp_m = 0.3;
  bool smooth_trajectory = false;
  std::string reference_histograms;  // optional path, relative to the config file

  int effective_min_blob_px(const RoomModel& room) const {
    if (min_blob_px > 0) return min_blob_px;
    const double side = 0.25 * room.focal_px / room.camera_height_m;
    return std::max(1, static_cast<int>(std::lround(side * side)));
  }
};

struct Setup {
  RoomModel room;
  std::vector<SignSpec> signs;
  PipelineConfig pipeline;
};

namespace detail {

inline void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw InvariantError(field, what);
}

}  // namespace detail

inline void validate(const RoomModel& r) {
  using detail::require;
  require(r.width_m > 0.0, "width_m", "must be positive");
  require(r.depth_m > 0.0, "depth_m", "must be positive");
  require(r.max_person_height_m > 0.0, "max_person_height_m", "must be positive");
  require(r.contains(r.camera_position), "camera_position", "must lie inside the room");
  require(r.camera_height_m > r.max_person_height_m, "camera_height_m",
          "must exceed max_person_height_m");
  require(r.focal_px > 0.0, "focal_px", "must be positive");
  require(r.image_width > 0, "width_px", "must be positive");
  require(r.image_height > 0, "height_px", "must be positive");
}

inline void validate(const PipelineConfig& c) {
  using detail::require;
  require(c.bg_delta_mm > 0.0, "bg_delta_mm", "must be positive");
  require(c.min_blob_px >= 0, "min_blob_px", "must be non-negative (0 = auto)");
  require(c.hist_bins >= 2, "hist_bins", "must be at least 2");
  require(c.hist_lo_mm >= 0.0 && c.hist_hi_mm > c.hist_lo_mm, "hist_range_mm",
          "requires 0 <= lo < hi");
  require(c.corr_threshold > -1.0 && c.corr_threshold < 1.0, "corr_threshold",
          "must lie in (-1, 1)");
  require(c.gate_radius_m > 0.0, "gate_radius_m", "must be positive");
  require(c.cone_half_angle_rad > 0.0 && c.cone_half_angle_rad <= kPi / 2.0 + 1e-12,
          "cone_half_angle", "must lie in (0, 90] degrees");
  // Negative c2 is allowed for experimentation as long as the angle factor
  // stays positive over [0, pi].
  require(std::isfinite(c.c2) && 1.0 + c.c2 * kPi > 0.0, "c2",
          "angle factor 1 + c2*pi must be positive");
  require(c.kappa > 0.0, "kappa", "must be positive");
  require(c.wall_step_m > 0.0, "wall_step_m", "must be positive");
  require(c.fps > 0.0, "fps", "must be positive");
  require(c.max_turn_rate_rad > 0.0 && c.max_turn_rate_rad < kPi / 2.0, "max_turn_rate",
          "must lie in (0, 90) degrees");
  require(c.confirm_hits >= 1, "confirm_hits", "must be positive");
  require(c.max_misses >= 0, "max_misses", "must be non-negative");
  require(c.inward_margin_px >= 0.0, "inward_margin_px", "must be non-negative");
  require(c.standstill_m >= 0.0, "standstill_m", "must be non-negative");
  require(c.r_clamp_m > 0.0, "r_clamp_m", "must be positive");
}

inline void validate(const RoomModel& room, const std::vector<SignSpec>& signs) {
  std::set<std::string> ids;
  for (const auto& s : signs) {
    const std::string field = "sign " + s.id;
    detail::require(!s.id.empty(), "sign", "id must be non-empty");
    detail::require(ids.insert(s.id).second, field, "duplicate sign id");
    detail::require(s.width_m > 0.0, field + ".width_m", "must be positive");
    detail::require(s.lo() >= 0.0 && s.hi() <= room.wall_length(s.wall),
                    field + ".center_offset_m", "sign interval must lie within its wall");
  }
  for (std::size_t i = 0; i < signs.size(); ++i) {
    for (std::size_t j = i + 1; j < signs.size(); ++j) {
      const auto& a = signs[i];
      const auto& b = signs[j];
      if (a.wall == b.wall && a.lo() < b.hi() && b.lo() < a.hi()) {
        throw InvariantError("sign " + b.id, "overlaps sign " + a.id);
      }
    }
  }
}

inline void validate(const Setup& s) {
  validate(s.room);
  validate(s.room, s.signs);
  validate(s.pipeline);
}

namespace detail {

using boost::property_tree::ptree;

// Reads typed values out of one INI section and remembers which keys were
// consumed so leftovers can be reported as typos.
class SectionReader {
 public:
  SectionReader(const ptree& node, std::string section) : node_(node), section_(std::move(section)) {}

  template <typename T>
  void get(const std::string& key, T& out) {
    auto child = node_.get_child_optional(ptree::path_type(key, '\0'));
    if (!child) return;
    used_.insert(key);
    auto value = child->get_value_optional<T>();
    if (!value) {
      throw ParseError("[" + section_ + "] " + key + ": cannot parse '" + child->data() + "'");
    }
    out = *value;
  }

  void get_angle_deg(const std::string& key, double& out_rad) {
    double deg = rad2deg(out_rad);
    get(key, deg);
    out_rad = deg2rad(deg);
  }

  void finish() const {
    for (const auto& [key, _] : node_) {
      if (!used_.count(key)) throw ParseError("[" + section_ + "] unknown key '" + key + "'");
    }
  }

 private:
  const ptree& node_;
  std::string section_;
  std::set<std::string> used_;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// Parses the INI-style configuration:
//
//   [room]      width_m, depth_m, max_person_height_m
//   [camera]    x_m, y_m, height_m, focal_px, cx_px, cy_px, width_px, height_px
//   [pipeline]  see PipelineConfig; angles as *_deg
//   [sign <id>] wall, center_offset_m, width_m, mount_height_m
//
// Missing keys keep their defaults. Unknown sections or keys are errors.
inline Setup parse_config(std::istream& in, const std::string& origin = "<config>") {
  const std::string text{std::istreambuf_iterator<char>(in), {}};
  // read_ini drops sections with no keys, so headers are checked here too.
  {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      line = detail::trim(line);
      if (line.size() < 2 || line.front() != '[' || line.back() != ']') continue;
      const std::string name = detail::trim(line.substr(1, line.size() - 2));
      if (name != "room" && name != "camera" && name != "pipeline" && name.rfind("sign ", 0) != 0) {
        throw ParseError(origin + ": unknown section [" + name + "]");
      }
    }
  }
  detail::ptree tree;
  try {
    std::istringstream body(text);
    boost::property_tree::read_ini(body, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  Setup setup;
  auto& room = setup.room;
  auto& cfg = setup.pipeline;
  for (const auto& [name, node] : tree) {
    if (name == "room") {
      detail::SectionReader r(node, name);
      r.get("width_m", room.width_m);
      r.get("depth_m", room.depth_m);
      r.get("max_person_height_m", room.max_person_height_m);
      r.finish();
    } else if (name == "camera") {
      detail::SectionReader r(node, name);
      r.get("x_m", room.camera_position.x);
      r.get("y_m", room.camera_position.y);
      r.get("height_m", room.camera_height_m);
      r.get("focal_px", room.focal_px);
      r.get("cx_px", room.principal_point.x);
      r.get("cy_px", room.principal_point.y);
      r.get("width_px", room.image_width);
      r.get("height_px", room.image_height);
      r.finish();
    } else if (name == "pipeline") {
      detail::SectionReader r(node, name);
      r.get("bg_delta_mm", cfg.bg_delta_mm);
      r.get("min_blob_px", cfg.min_blob_px);
      r.get("hist_bins", cfg.hist_bins);
      r.get("hist_lo_mm", cfg.hist_lo_mm);
      r.get("hist_hi_mm", cfg.hist_hi_mm);
      r.get("corr_threshold", cfg.corr_threshold);
      r.get("gate_radius_m", cfg.gate_radius_m);
      r.get_angle_deg("cone_half_angle_deg", cfg.cone_half_angle_rad);
      r.get("c2", cfg.c2);
      r.get("kappa", cfg.kappa);
      r.get("wall_step_m", cfg.wall_step_m);
      r.get("fps", cfg.fps);
      r.get_angle_deg("max_turn_rate_deg", cfg.max_turn_rate_rad);
      r.get("confirm_hits", cfg.confirm_hits);
      r.get("max_misses", cfg.max_misses);
      r.get("inward_margin_px", cfg.inward_margin_px);
      r.get("standstill_m", cfg.standstill_m);
      r.get("r_clamp_m", cfg.r_clamp_m);
      r.get("smooth_trajectory", cfg.smooth_trajectory);
      r.get("reference_histograms", cfg.reference_histograms);
      r.finish();
    } else if (name.rfind("sign ", 0) == 0) {
      SignSpec sign;
      sign.id = detail::trim(name.substr(5));
      detail::SectionReader r(node, name);
      std::string wall;
      r.get("wall", wall);
      if (wall.empty()) throw ParseError("[" + name + "] missing key 'wall'");
      sign.wall = parse_wall(wall);
      r.get("center_offset_m", sign.center_offset_m);
      r.get("width_m", sign.width_m);
      r.get("mount_height_m", sign.mount_height_m);
      r.finish();
      setup.signs.push_back(sign);
    } else {
      throw ParseError(origin + ": unknown section [" + name + "]");
    }
  }
  validate(setup);
  return setup;
}

inline Setup load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  Setup setup = parse_config(in, path.string());
  auto& ref = setup.pipeline.reference_histograms;
  if (!ref.empty() && std::filesystem::path(ref).is_relative()) {
    ref = (path.parent_path() / ref).lexically_normal().string();
  }
  return setup;
}

inline void write_config(std::ostream& out, const Setup& s) {
  const auto& r = s.room;
  const auto& c = s.pipeline;
  out.precision(10);
  out << "[room]\n"
      << "width_m = " << r.width_m << "\n"
      << "depth_m = " << r.depth_m << "\n"
      << "max_person_height_m = " << r.max_person_height_m << "\n\n"
      << "[camera]\n"
      << "x_m = " << r.camera_position.x << "\n"
      << "y_m = " << r.camera_position.y << "\n"
      << "height_m = " << r.camera_height_m << "\n"
      << "focal_px = " << r.focal_px << "\n"
      << "cx_px = " << r.principal_point.x << "\n"
      << "cy_px = " << r.principal_point.y << "\n"
      << "width_px = " << r.image_width << "\n"
      << "height_px = " << r.image_height << "\n\n"
      << "[pipeline]\n"
      << "bg_delta_mm = " << c.bg_delta_mm << "\n"
      << "min_blob_px = " << c.min_blob_px << "\n"
      << "hist_bins = " << c.hist_bins << "\n"
      << "hist_lo_mm = " << c.hist_lo_mm << "\n"
      << "hist_hi_mm = " << c.hist_hi_mm << "\n"
      << "corr_threshold = " << c.corr_threshold << "\n"
      << "gate_radius_m = " << c.gate_radius_m << "\n"
      << "cone_half_angle_deg = " << rad2deg(c.cone_half_angle_rad) << "\n"
      << "c2 = " << c.c2 << "\n"
      << "kappa = " << c.kappa << "\n"
      << "wall_step_m = " << c.wall_step_m << "\n"
      << "fps = " << c.fps << "\n"
      << "max_turn_rate_deg = " << rad2deg(c.max_turn_rate_rad) << "\n"
      << "confirm_hits = " << c.confirm_hits << "\n"
      << "max_misses = " << c.max_misses << "\n"
      << "inward_margin_px = " << c.inward_margin_px << "\n"
      << "standstill_m = " << c.standstill_m << "\n"
      << "r_clamp_m = " << c.r_clamp_m << "\n"
      << "smooth_trajectory = " << (c.smooth_trajectory ? "true" : "false") << "\n";
  if (!c.reference_histograms.empty()) {
    out << "reference_histograms = " << c.reference_histograms << "\n";
  }
  for (const auto& sign : s.signs) {
    out << "\n[sign " << sign.id << "]\n"
        << "wall = " << wall_name(sign.wall) << "\n"
        << "center_offset_m = " << sign.center_offset_m << "\n"
        << "width_m = " << sign.width_m << "\n"
        << "mount_height_m = " << sign.mount_height_m << "\n";
  }
}

// 5 x 5 m room, camera 2.8 m high at the center, one A4 poster per wall.
inline Setup default_setup() {
  Setup s;
  s.signs = {
      {"orange", Wall::N, 2.5, 0.21, 1.5},
      {"green", Wall::E, 2.5, 0.21, 1.5},
      {"red", Wall::S, 2.5, 0.21, 1.5},
      {"dark_green", Wall::W, 2.5, 0.21, 1.5},
  };
  return s;
}

// Pinhole back-projection of pixel (u, v) at vertical distance depth_mm.
inline Vec2 pixel_to_room(double u, double v, double depth_mm, const RoomModel& room) {
  if (!(depth_mm > 0.0)) throw PreconditionError("pixel_to_room: depth must be positive");
  if (depth_mm > room.camera_height_m * 1000.0) {
    throw PreconditionError("pixel_to_room: depth beyond the floor");
  }
  const double z = depth_mm / 1000.0;
  return {room.camera_position.x + (u - room.principal_point.x) * z / room.focal_px,
          room.camera_position.y + (v - room.principal_point.y) * z / room.focal_px};
}

// Inverse of pixel_to_room for a known depth.
inline Vec2 room_to_pixel(Vec2 p, double depth_mm, const RoomModel& room) {
  if (!(depth_mm > 0.0)) throw PreconditionError("room_to_pixel: depth must be positive");
  const double z = depth_mm / 1000.0;
  return {room.principal_point.x + (p.x - room.camera_position.x) * room.focal_px / z,
          room.principal_point.y + (p.y - room.camera_position.y) * room.focal_px / z};
}

struct WallSample {
  Wall wall;
  double offset_m;  // along the wall, see RoomModel::wall
  Vec2 position;
};

// Samples the perimeter counterclockwise (S, E, N, W as seen with y up).
// Each wall is cut into ceil(length/step) equal cells sampled at their
// midpoints; S and E run with increasing offset, N and W with decreasing
// offset so the unrolled strip is continuous around the corners.
inline std::vector<WallSample> wall_samples(const RoomModel& room, double step) {
  if (!(step > 0.0)) throw PreconditionError("wall_samples: step must be positive");
  std::vector<WallSample> out;
  for (Wall w : kWallOrder) {
    const double len = room.wall_length(w);
    const int n = static_cast<int>(std::ceil(len / step - 1e-9));
    const double spacing = len / n;
    const bool ascending = (w == Wall::S || w == Wall::E);
    for (int i = 0; i < n; ++i) {
      const int j = ascending ? i : n - 1 - i;
      const double offset = (j + 0.5) * spacing;
      out.push_back({w, offset, room.point_on_wall(w, offset)});
    }
  }
  return out;
}

// Index of the sign whose interval contains the sample, if any. Signs never
// overlap (validated), so the answer is unique.
inline std::optional<std::size_t> sign_for_sample(const WallSample& s,
                                                  const std::vector<SignSpec>& signs) {
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i].wall == s.wall && s.offset_m >= signs[i].lo() && s.offset_m <= signs[i].hi()) {
      return i;
    }
  }
  return std::nullopt;
}

}  // namespace foa
