#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace skirmish {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double norm_sq() const { return x * x + y * y; }
};

inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Wraps an angle to [-pi, pi).
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, [-pi, pi)

  Vec2 position() const { return {x, y}; }
};

// Axis-aligned rectangle, center + half extents.
struct Rect {
  double cx = 0.0;
  double cy = 0.0;
  double hx = 0.0;
  double hy = 0.0;

  double min_x() const { return cx - hx; }
  double max_x() const { return cx + hx; }
  double min_y() const { return cy - hy; }
  double max_y() const { return cy + hy; }

  bool contains(Vec2 p) const {
    return std::abs(p.x - cx) <= hx && std::abs(p.y - cy) <= hy;
  }

  // Euclidean distance from p to the rectangle (0 inside).
  double distance(Vec2 p) const {
    double dx = std::max(std::abs(p.x - cx) - hx, 0.0);
    double dy = std::max(std::abs(p.y - cy) - hy, 0.0);
    return std::hypot(dx, dy);
  }

  // Closest point of the rectangle to p (p itself when inside).
  Vec2 closest_point(Vec2 p) const {
    return {std::clamp(p.x, min_x(), max_x()), std::clamp(p.y, min_y(), max_y())};
  }
};

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

// Segment a->b vs rectangle, inclusive of boundary touches.
bool segment_intersects_rect(Vec2 a, Vec2 b, const Rect& r);

// Distance along the ray origin + t*dir (dir unit) to the rectangle.
// Returns +inf when the ray misses; 0 when the origin is inside.
double ray_rect_hit(Vec2 origin, Vec2 dir, const Rect& r);

// Same for a circle.
double ray_circle_hit(Vec2 origin, Vec2 dir, const Circle& c);

}  // namespace skirmish
