#include "skirmish/geom.hpp"

#include <algorithm>

namespace skirmish {

bool segment_intersects_rect(Vec2 a, Vec2 b, const Rect& r) {
  // Liang-Barsky clipping of the parametric segment against the slab bounds.
  double t0 = 0.0, t1 = 1.0;
  double d[2] = {b.x - a.x, b.y - a.y};
  double p0[2] = {a.x, a.y};
  double lo[2] = {r.min_x(), r.min_y()};
  double hi[2] = {r.max_x(), r.max_y()};
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      if (p0[axis] < lo[axis] || p0[axis] > hi[axis]) return false;
    } else {
      double ta = (lo[axis] - p0[axis]) / d[axis];
      double tb = (hi[axis] - p0[axis]) / d[axis];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return false;
    }
  }
  return true;
}

double ray_rect_hit(Vec2 origin, Vec2 dir, const Rect& r) {
  double t0 = 0.0, t1 = kInf;
  double d[2] = {dir.x, dir.y};
  double p0[2] = {origin.x, origin.y};
  double lo[2] = {r.min_x(), r.min_y()};
  double hi[2] = {r.max_x(), r.max_y()};
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      if (p0[axis] < lo[axis] || p0[axis] > hi[axis]) return kInf;
    } else {
      double ta = (lo[axis] - p0[axis]) / d[axis];
      double tb = (hi[axis] - p0[axis]) / d[axis];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return kInf;
    }
  }
  return t0;
}

double ray_circle_hit(Vec2 origin, Vec2 dir, const Circle& c) {
  Vec2 oc = origin - c.center;
  double b = oc.dot(dir);
  double q = oc.norm_sq() - c.radius * c.radius;
  if (q <= 0.0) return 0.0;  // origin inside
  double disc = b * b - q;
  if (disc < 0.0) return kInf;
  double t = -b - std::sqrt(disc);
  return t >= 0.0 ? t : kInf;
}

}  // namespace skirmish
