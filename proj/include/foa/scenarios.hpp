#pragma once

// Built-in scenario scripts used by the CLI and the test suites.

#include <cmath>
#include <string>
#include <vector>

#include "foa/geometry.hpp"
#include "foa/room_model.hpp"
#include "foa/synthetic_scene.hpp"

namespace foa {

// Keyframes a walk: head turns happen on the spot, walking keeps the head
// along the walking direction unless told otherwise.
class ScriptBuilder {
 public:
  ScriptBuilder(std::string name, PersonGeometry geometry, Vec2 start, double phi, int start_frame = 0,
                double turn_rate_rad = deg2rad(20.0))
      : pos_(start), phi_(wrap_two_pi(phi)), frame_(start_frame), turn_rate_(turn_rate_rad) {
    person_.name = std::move(name);
    person_.geometry = geometry;
    person_.waypoints.push_back({frame_, pos_});
    person_.head_angles.push_back({frame_, phi_});
  }

  ScriptBuilder& turn_to(double angle) {
    const double delta = signed_angle_diff(angle, phi_);
    const int n = static_cast<int>(std::ceil(std::abs(delta) / turn_rate_ - 1e-9));
    if (n == 0) return *this;
    // Intermediate keyframes keep every interpolation step below half a turn.
    for (int i = 1; i <= n; ++i) {
      ++frame_;
      person_.head_angles.push_back({frame_, wrap_two_pi(phi_ + delta * i / n)});
    }
    phi_ = wrap_two_pi(angle);
    person_.waypoints.push_back({frame_, pos_});
    return *this;
  }

  ScriptBuilder& look_at(Vec2 target, int hold_frames) {
    turn_to(heading(target - pos_));
    return hold(hold_frames);
  }

  ScriptBuilder& hold(int frames) {
    if (frames <= 0) return *this;
    frame_ += frames;
    person_.waypoints.push_back({frame_, pos_});
    person_.head_angles.push_back({frame_, phi_});
    return *this;
  }

  ScriptBuilder& walk_to(Vec2 target, double step_m, double head_offset_rad = 0.0) {
    const Vec2 d = target - pos_;
    turn_to(heading(d) + head_offset_rad);
    const int n = std::max(1, static_cast<int>(std::ceil(norm(d) / step_m - 1e-9)));
    frame_ += n;
    pos_ = target;
    person_.waypoints.push_back({frame_, pos_});
    person_.head_angles.push_back({frame_, phi_});
    return *this;
  }

  int frame() const { return frame_; }
  Vec2 position() const { return pos_; }
  ScriptedPerson build() const { return person_; }

 private:
  ScriptedPerson person_;
  Vec2 pos_;
  double phi_;
  int frame_;
  double turn_rate_;
};

inline ScenarioScript single_person_script(ScriptedPerson p, std::uint64_t seed, double noise_sigma_mm = 10.0,
                                           std::vector<BoxProp> props = {}) {
  ScenarioScript s;
  s.duration_frames = p.last_frame() + 1;
  s.persons.push_back(std::move(p));
  s.props = std::move(props);
  s.noise_sigma_mm = noise_sigma_mm;
  s.seed = seed;
  return s;
}

inline const SignSpec& sign_by_id(const std::vector<SignSpec>& signs, const std::string& id) {
  for (const auto& s : signs) {
    if (s.id == id) return s;
  }
  throw PreconditionError("no sign with id '" + id + "'");
}

// Nine single-person walks through the camera view: varied body geometry,
// entry side and the signs looked at on the way. Every walker enters facing
// its walking direction. Total length is about two minutes at 4 fps.
inline std::vector<ScenarioScript> default_scenarios(const Setup& setup, double noise_sigma_mm = 10.0) {
  const auto& room = setup.room;
  auto at = [&](const char* id) { return sign_center(room, sign_by_id(setup.signs, id)); };
  auto geo = [](double h, double major, double minor, double shoulders, double drop) {
    PersonGeometry g;
    g.height_m = h;
    g.head_radius_major_m = major;
    g.head_radius_minor_m = minor;
    g.shoulder_width_m = shoulders;
    g.torso_depth_m = 0.55 * shoulders;
    g.shoulder_depth_drop_m = drop;
    return g;
  };
  const double step = 0.12;  // m per frame, 0.48 m/s at 4 fps
  std::vector<ScenarioScript> out;

  {
    ScriptBuilder b("p1", geo(1.75, 0.100, 0.075, 0.44, 0.27), {0.8, 2.4}, 0.0);
    b.walk_to({2.3, 2.4}, step).look_at(at("orange"), 6).look_at(at("green"), 5).walk_to({4.2, 2.6}, step);
    out.push_back(single_person_script(b.build(), 101, noise_sigma_mm));
  }
  {
    ScriptBuilder b("p2", geo(1.90, 0.102, 0.078, 0.47, 0.28), {2.3, 0.9}, kPi / 2);
    b.walk_to({2.4, 2.4}, step).look_at(at("dark_green"), 5).look_at(at("orange"), 5).walk_to({2.6, 4.1}, step);
    out.push_back(single_person_script(b.build(), 102, noise_sigma_mm));
  }
  {
    ScriptBuilder b("p3", geo(1.62, 0.095, 0.072, 0.41, 0.25), {4.2, 2.7}, kPi);
    b.walk_to({2.8, 2.6}, step).look_at(at("red"), 6).look_at(at("dark_green"), 4).walk_to({0.8, 2.3}, step);
    out.push_back(single_person_script(b.build(), 103, noise_sigma_mm, {{"crate", {3.2, 1.6}, {3.6, 2.0}, 0.5}}));
  }
  {
    ScriptBuilder b("p4", geo(1.80, 0.100, 0.076, 0.50, 0.28), {2.6, 4.1}, -kPi / 2);
    b.walk_to({2.6, 2.6}, step).look_at(at("green"), 6).look_at(at("red"), 6).walk_to({2.4, 0.9}, step);
    out.push_back(single_person_script(b.build(), 104, noise_sigma_mm));
  }
  {
    ScriptBuilder b("p5", geo(1.68, 0.098, 0.074, 0.40, 0.26), {0.9, 1.9}, 0.0);
    b.walk_to({2.4, 2.7}, step).look_at(at("orange"), 8).walk_to({4.1, 2.0}, step);
    out.push_back(single_person_script(b.build(), 105, noise_sigma_mm));
  }
  {
    ScriptBuilder b("p6", geo(1.72, 0.105, 0.080, 0.43, 0.27), {4.2, 2.2}, kPi);
    b.walk_to({3.0, 2.4}, step).walk_to({2.2, 2.6}, step).look_at(at("dark_green"), 5).look_at(at("orange"), 5);
    b.walk_to({2.2, 4.1}, step);
    out.push_back(single_person_script(b.build(), 106, noise_sigma_mm));
  }
  {
    ScriptBuilder b("p7", geo(1.85, 0.101, 0.077, 0.46, 0.28), {2.7, 0.9}, kPi / 2);
    b.walk_to({2.7, 2.3}, step).look_at(at("green"), 5).look_at(at("orange"), 5).look_at(at("dark_green"), 5);
    b.walk_to({0.8, 2.3}, step);
    out.push_back(single_person_script(b.build(), 107, noise_sigma_mm, {{"bench", {1.5, 2.9}, {1.9, 3.3}, 0.5}}));
  }
  {
    ScriptBuilder b("p8", geo(1.65, 0.097, 0.074, 0.42, 0.26), {2.3, 4.1}, -kPi / 2);
    b.walk_to({2.3, 2.8}, step).walk_to({2.9, 2.4}, step).look_at(at("red"), 6).walk_to({4.2, 2.4}, step);
    out.push_back(single_person_script(b.build(), 108, noise_sigma_mm));
  }
  {
    ScriptBuilder b("p9", geo(1.78, 0.100, 0.075, 0.45, 0.27), {0.8, 2.8}, 0.0);
    b.walk_to({2.5, 2.8}, 0.10).look_at(at("orange"), 10).look_at(at("green"), 5).walk_to({4.2, 2.8}, step);
    out.push_back(single_person_script(b.build(), 109, noise_sigma_mm));
  }
  return out;
}

// One person walking a 1 m square loop under the camera while watching the
// four signs in turn. Leg lengths are equal, the time spent on each leg (and
// so on each sign) follows `dwell` (fractions of frames, in sign order).
// During the first frames of a leg the head swings over to the next sign.
inline ScenarioScript dwell_scenario(const Setup& setup, const std::vector<std::string>& sign_order,
                                     const std::vector<double>& dwell, int total_frames = 120,
                                     double noise_sigma_mm = 10.0, std::uint64_t seed = 7) {
  if (sign_order.size() != 4 || dwell.size() != 4) throw PreconditionError("dwell_scenario: need four legs");
  const auto& room = setup.room;
  const Vec2 c = room.camera_position;
  const Vec2 corners[5] = {c + Vec2{-0.5, -0.5}, c + Vec2{-0.5, 0.5}, c + Vec2{0.5, 0.5}, c + Vec2{0.5, -0.5},
                           c + Vec2{-0.5, -0.5}};
  ScriptedPerson p;
  p.name = "browser";
  int frame = 0;
  double prev_phi = 0.0;
  for (int leg = 0; leg < 4; ++leg) {
    const Vec2 target = sign_center(room, sign_by_id(setup.signs, sign_order[leg]));
    const int n = std::max(2, static_cast<int>(std::lround(dwell[leg] * total_frames)));
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / n;
      const Vec2 pos = corners[leg] + t * (corners[leg + 1] - corners[leg]);
      const double look = heading(target - pos);
      double phi = look;
      if (leg > 0) {
        // Swing from the previous sign at no more than 30 degrees per frame.
        const double swing = signed_angle_diff(look, prev_phi);
        const double max_step = deg2rad(30.0);
        if (std::abs(swing) > max_step) phi = prev_phi + (swing > 0 ? max_step : -max_step);
      }
      p.waypoints.push_back({frame, pos});
      p.head_angles.push_back({frame, wrap_two_pi(phi)});
      prev_phi = phi;
      ++frame;
    }
  }
  p.waypoints.push_back({frame, corners[4]});
  p.head_angles.push_back({frame, wrap_two_pi(prev_phi)});

  ScenarioScript s;
  s.duration_frames = frame + 1;
  s.persons.push_back(std::move(p));
  s.noise_sigma_mm = noise_sigma_mm;
  s.seed = seed;
  return s;
}

// A person loitering with the head right at the image border, then backing
// out of view. Nothing in this sequence should become a confirmed track.
inline ScenarioScript border_flicker_scenario(const Setup& setup, double noise_sigma_mm = 10.0) {
  const auto& room = setup.room;
  PersonGeometry g;
  const double head_depth = room.camera_height_m - g.height_m;
  // Head center a few pixels inside the left image edge.
  const Vec2 edge = pixel_to_room(6.0, room.principal_point.y, head_depth * 1000.0, room);
  ScriptedPerson p;
  p.name = "loiterer";
  p.geometry = g;
  for (int k = 0; k < 10; ++k) {
    const double sway = (k % 2 == 0 ? 0.01 : -0.01);
    p.waypoints.push_back({k, edge + Vec2{sway, 0.02 * std::sin(k)}});
    p.head_angles.push_back({k, kPi});
  }
  p.waypoints.push_back({14, edge - Vec2{0.6, 0.0}});
  p.head_angles.push_back({14, kPi});
  return single_person_script(std::move(p), 11, noise_sigma_mm);
}

// Two walkers passing each other in opposite directions one metre apart.
inline ScenarioScript passing_scenario(const Setup& setup, double noise_sigma_mm = 10.0) {
  const Vec2 c = setup.room.camera_position;
  ScriptBuilder a("east", PersonGeometry{}, c + Vec2{-1.7, -0.5}, 0.0);
  a.walk_to(c + Vec2{1.7, -0.5}, 0.12);
  PersonGeometry tall;
  tall.height_m = 1.84;
  ScriptBuilder b("west", tall, c + Vec2{1.7, 0.5}, kPi);
  b.walk_to(c + Vec2{-1.7, 0.5}, 0.12);
  ScenarioScript s;
  s.persons = {a.build(), b.build()};
  s.duration_frames = std::max(a.frame(), b.frame()) + 1;
  s.noise_sigma_mm = noise_sigma_mm;
  s.seed = 21;
  return s;
}

}  // namespace foa
