#pragma once

#include <span>
#include <string>
#include <vector>

#include "skirmish/geom.hpp"

namespace skirmish {

struct Obstacle {
  Rect rect;
  double height = 0.0;  // label only; every obstacle blocks movement and shots
};

// Static field geometry plus the derived occupancy grid. Immutable after
// load; shared read-only across environment instances.
struct Arena {
  double length = 8.1;  // x extent
  double width = 5.1;   // y extent
  std::vector<Obstacle> obstacles;
  std::vector<Rect> birth_areas;
  std::vector<Rect> zones;  // inert

  double cell_size = 0.1;
  double inflation = 0.3;  // robot footprint radius baked into the grid

  int nx = 0;
  int ny = 0;
  std::vector<uint8_t> occupied;  // row-major [iy * nx + ix]

  void build_grid();

  bool cell_in_bounds(int ix, int iy) const {
    return ix >= 0 && ix < nx && iy >= 0 && iy < ny;
  }
  bool cell_occupied(int ix, int iy) const { return occupied[iy * nx + ix] != 0; }
  Vec2 cell_center(int ix, int iy) const {
    return {(ix + 0.5) * cell_size, (iy + 0.5) * cell_size};
  }
  int cell_x(double x) const { return static_cast<int>(x / cell_size); }
  int cell_y(double y) const { return static_cast<int>(y / cell_size); }

  // True iff p lies inside the field shrunk by `inflation` and farther than
  // `inflation` from every obstacle rectangle.
  bool is_free(Vec2 p, double inflation) const;

  // True iff segment a->b intersects no obstacle rectangle.
  bool line_of_sight(Vec2 a, Vec2 b) const;

  // Nearest grid cell center that is free for an inflated robot; falls back
  // to the nearest in-bounds cell when everything is blocked.
  Vec2 nearest_free_cell(Vec2 p) const;
  // Up to n nearest free cell centers, ordered by distance then row-major.
  std::vector<Vec2> nearest_free_cells(Vec2 p, int n) const;
};

// Parses the line-oriented `key = value` arena spec. Throws
// std::runtime_error on parse errors, count mismatches, containment or
// symmetry violations.
Arena load_arena(const std::string& spec_text);

// The shipped default layout (identical bytes to data/arena_default.txt).
const std::string& default_arena_text();

// Ray-cast distances over a 270 degree fan centered on pose.theta.
// Rays stop at obstacles, field walls and the given robot footprints.
std::vector<double> lidar_scan(const Arena& arena, const Pose& pose, int n_rays,
                               double max_range,
                               std::span<const Circle> robots = {});

}  // namespace skirmish
