#pragma once

#include <vector>

#include "skirmish/arena.hpp"
#include "skirmish/dynamics.hpp"
#include "skirmish/world.hpp"

namespace skirmish {

inline constexpr int kCircleSamples = 180;

// Deterministic Lloyd k-means: farthest-point seeded from the given rng
// seed, empty clusters reseeded to the farthest point, centers returned
// sorted by angle around the input centroid. Throws on empty input.
std::vector<Vec2> kmeans(const std::vector<Vec2>& points, int k, uint64_t seed,
                         int max_iter = 50);

struct CandidateSet {
  std::vector<Vec2> points;       // exactly k
  std::vector<int> angle_index;   // sample index on the circle, -1 for fallback cells
  bool degenerate = false;        // fewer than k circle samples survived
};

// Firing positions around an opponent: 180 samples on the circle of radius
// best_distance, filtered by is_free(., inflation), clustered with k-means,
// each center snapped to the nearest surviving sample (ties to the lowest
// angle index). Throws std::invalid_argument when the opponent is dead.
CandidateSet candidate_points(const WorldState& world, const Arena& arena,
                              int opponent_id, int k, uint64_t seed,
                              double best_distance, double inflation);

struct PlannedPath {
  std::vector<Vec2> waypoints;
  std::vector<double> speeds;  // per waypoint, final speed 0

  bool empty() const { return waypoints.empty(); }
};

// 8-connected A* on the inflated occupancy grid (diagonal cost sqrt(2),
// Euclidean heuristic, no corner cutting). The goal snaps to the nearest
// free cell; throws std::invalid_argument when the start cell is blocked;
// returns an empty path iff the goal is unreachable.
std::vector<Vec2> plan_path(Vec2 start, Vec2 goal, const Arena& arena);

// Deceleration-limited speed profile: v_i = min(v_max, sqrt(2 a s_remaining)).
PlannedPath profile_path(std::vector<Vec2> waypoints, double v_max, double a_max);

// Pure-pursuit follower: trapezoidal speed from the remaining arc length,
// lookahead 0.4 m, heading aligned with the direction of travel. Zero twist
// within 0.1 m of the final waypoint.
Twist follow_path(const Pose& pose, const PlannedPath& path, double v_max, double a_max);

// Proportional heading control toward a point, clamped to the command range.
double aim_omega(const Pose& pose, Vec2 target);

}  // namespace skirmish
