#pragma once

#include <cmath>
#include <numbers>

namespace foa {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline double heading(Vec2 a) { return std::atan2(a.y, a.x); }
inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps to [0, 2*pi).
inline double wrap_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// Wraps to (-pi, pi].
inline double wrap_pi(double a) {
  double r = wrap_two_pi(a);
  return r > kPi ? r - kTwoPi : r;
}

// Wraps to [0, pi). Used for undirected (axial) orientations.
inline double wrap_half_turn(double a) {
  double r = std::fmod(a, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

// Signed shortest rotation taking `from` onto `to`, in (-pi, pi].
inline double signed_angle_diff(double to, double from) { return wrap_pi(to - from); }

// Distance on the circle, in [0, pi].
inline double angular_distance(double a, double b) { return std::abs(wrap_pi(a - b)); }

}  // namespace foa
