#include "skirmish/planning.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "skirmish/rng.hpp"

namespace skirmish {

std::vector<Vec2> kmeans(const std::vector<Vec2>& points, int k, uint64_t seed,
                         int max_iter) {
  if (points.empty()) throw std::invalid_argument("kmeans: empty input");
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  int n = static_cast<int>(points.size());
  k = std::min(k, n);

  Rng rng(seed);
  std::vector<int> center_idx;
  center_idx.push_back(rng.uniform_int(n));
  while (static_cast<int>(center_idx.size()) < k) {
    // farthest-point init: maximize the min distance to the chosen set
    int best = -1;
    double best_d = -1.0;
    for (int i = 0; i < n; ++i) {
      double d = kInf;
      for (int c : center_idx) d = std::min(d, (points[i] - points[c]).norm_sq());
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    center_idx.push_back(best);
  }
  std::vector<Vec2> centers;
  for (int c : center_idx) centers.push_back(points[c]);

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = kInf;
      for (int c = 0; c < k; ++c) {
        double d = (points[i] - centers[c]).norm_sq();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<Vec2> sum(k);
    std::vector<int> count(k, 0);
    for (int i = 0; i < n; ++i) {
      sum[assign[i]] = sum[assign[i]] + points[i];
      ++count[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) {
        centers[c] = sum[c] * (1.0 / count[c]);
      } else {
        // reseed an empty cluster to the point farthest from all centers
        int best = 0;
        double best_d = -1.0;
        for (int i = 0; i < n; ++i) {
          double d = kInf;
          for (int c2 = 0; c2 < k; ++c2) d = std::min(d, (points[i] - centers[c2]).norm_sq());
          if (d > best_d) {
            best_d = d;
            best = i;
          }
        }
        centers[c] = points[best];
      }
    }
  }

  Vec2 mean{};
  for (const auto& p : points) mean = mean + p;
  mean = mean * (1.0 / n);
  std::sort(centers.begin(), centers.end(), [&](Vec2 a, Vec2 b) {
    double aa = std::atan2(a.y - mean.y, a.x - mean.x);
    double ab = std::atan2(b.y - mean.y, b.x - mean.x);
    if (aa != ab) return aa < ab;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });
  return centers;
}

CandidateSet candidate_points(const WorldState& world, const Arena& arena,
                              int opponent_id, int k, uint64_t seed,
                              double best_distance, double inflation) {
  if (k < 1) throw std::invalid_argument("candidate_points: k must be >= 1");
  if (!world.combat.alive(opponent_id)) {
    throw std::invalid_argument("candidate_points: opponent is dead");
  }
  Vec2 center = world.bodies[opponent_id].pose.position();

  std::vector<Vec2> samples;
  std::vector<int> sample_angle;
  for (int j = 0; j < kCircleSamples; ++j) {
    double a = 2.0 * kPi * j / kCircleSamples;
    Vec2 p = center + Vec2{std::cos(a), std::sin(a)} * best_distance;
    if (arena.is_free(p, inflation)) {
      samples.push_back(p);
      sample_angle.push_back(j);
    }
  }

  CandidateSet out;
  if (samples.empty()) {
    // opponent fully enclosed: fall back to its nearest free cells
    out.degenerate = true;
    out.points = arena.nearest_free_cells(center, k);
    out.angle_index.assign(out.points.size(), -1);
    return out;
  }

  int n = static_cast<int>(samples.size());
  auto centers = kmeans(samples, std::min(k, n), seed);
  struct Snapped {
    Vec2 p;
    int angle;
  };
  std::vector<Snapped> snapped;
  for (const auto& c : centers) {
    int best = 0;
    double best_d = kInf;
    for (int i = 0; i < n; ++i) {
      double d = (samples[i] - c).norm_sq();
      if (d < best_d - 1e-15 || (std::abs(d - best_d) <= 1e-15 && sample_angle[i] < sample_angle[best])) {
        best_d = d;
        best = i;
      }
    }
    snapped.push_back({samples[best], sample_angle[best]});
  }
  std::sort(snapped.begin(), snapped.end(),
            [](const Snapped& a, const Snapped& b) { return a.angle < b.angle; });

  for (const auto& s : snapped) {
    out.points.push_back(s.p);
    out.angle_index.push_back(s.angle);
  }
  if (n < k) {
    out.degenerate = true;
    int i = 0;
    while (static_cast<int>(out.points.size()) < k) {
      out.points.push_back(out.points[i % snapped.size()]);
      out.angle_index.push_back(out.angle_index[i % snapped.size()]);
      ++i;
    }
  }
  return out;
}

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

}  // namespace

std::vector<Vec2> plan_path(Vec2 start, Vec2 goal, const Arena& arena) {
  int sx = std::clamp(arena.cell_x(start.x), 0, arena.nx - 1);
  int sy = std::clamp(arena.cell_y(start.y), 0, arena.ny - 1);
  if (arena.cell_occupied(sx, sy)) {
    throw std::invalid_argument("plan_path: start cell is blocked");
  }
  Vec2 goal_cell = arena.nearest_free_cell(goal);
  int gx = arena.cell_x(goal_cell.x);
  int gy = arena.cell_y(goal_cell.y);

  int n = arena.nx * arena.ny;
  std::vector<double> g(n, kInf);
  std::vector<int> parent(n, -1);
  std::vector<uint8_t> closed(n, 0);

  auto heuristic = [&](int ix, int iy) {
    double dx = ix - gx, dy = iy - gy;
    return std::sqrt(dx * dx + dy * dy);
  };

  struct Node {
    double f;
    uint64_t seq;
    int cell;
    bool operator>(const Node& o) const {
      return f != o.f ? f > o.f : seq > o.seq;
    }
  };
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
  uint64_t seq = 0;

  int start_cell = sy * arena.nx + sx;
  g[start_cell] = 0.0;
  open.push({heuristic(sx, sy), seq++, start_cell});

  // row-major neighbor order
  constexpr int dxs[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  constexpr int dys[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

  int goal_cell_idx = gy * arena.nx + gx;
  bool found = start_cell == goal_cell_idx;
  while (!open.empty() && !found) {
    Node top = open.top();
    open.pop();
    int cell = top.cell;
    if (closed[cell]) continue;
    closed[cell] = 1;
    if (cell == goal_cell_idx) {
      found = true;
      break;
    }
    int ix = cell % arena.nx;
    int iy = cell / arena.nx;
    for (int d = 0; d < 8; ++d) {
      int jx = ix + dxs[d];
      int jy = iy + dys[d];
      if (!arena.cell_in_bounds(jx, jy) || arena.cell_occupied(jx, jy)) continue;
      bool diagonal = dxs[d] != 0 && dys[d] != 0;
      if (diagonal) {
        // no corner cutting: both orthogonal neighbors must be free
        if (arena.cell_occupied(jx, iy) || arena.cell_occupied(ix, jy)) continue;
      }
      int jcell = jy * arena.nx + jx;
      if (closed[jcell]) continue;
      double cost = g[cell] + (diagonal ? kSqrt2 : 1.0);
      if (cost < g[jcell]) {
        g[jcell] = cost;
        parent[jcell] = cell;
        open.push({cost + heuristic(jx, jy), seq++, jcell});
      }
    }
  }

  std::vector<Vec2> path;
  if (!found) return path;  // unreachable
  int cur = goal_cell_idx;
  while (cur != -1) {
    path.push_back(arena.cell_center(cur % arena.nx, cur / arena.nx));
    cur = parent[cur];
  }
  std::reverse(path.begin(), path.end());
  return path;
}

PlannedPath profile_path(std::vector<Vec2> waypoints, double v_max, double a_max) {
  PlannedPath out;
  out.waypoints = std::move(waypoints);
  int n = static_cast<int>(out.waypoints.size());
  out.speeds.assign(n, 0.0);
  double remaining = 0.0;
  for (int i = n - 2; i >= 0; --i) {
    remaining += dist(out.waypoints[i], out.waypoints[i + 1]);
    out.speeds[i] = std::min(v_max, std::sqrt(2.0 * a_max * remaining));
  }
  return out;
}

Twist follow_path(const Pose& pose, const PlannedPath& path, double v_max, double a_max) {
  Twist cmd;
  int n = static_cast<int>(path.waypoints.size());
  if (n == 0) return cmd;
  Vec2 p = pose.position();
  Vec2 goal = path.waypoints.back();
  if (dist(p, goal) <= 0.1) return cmd;

  // project onto the polyline: nearest point, earliest segment wins ties
  double best_d = kInf;
  int best_seg = 0;
  double best_t = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    Vec2 a = path.waypoints[i], b = path.waypoints[i + 1];
    Vec2 ab = b - a;
    double len_sq = ab.norm_sq();
    double t = len_sq > 0.0 ? std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0) : 0.0;
    Vec2 q = a + ab * t;
    double d = dist(p, q);
    if (d < best_d - 1e-12) {
      best_d = d;
      best_seg = i;
      best_t = t;
    }
  }
  if (n == 1) {
    best_seg = 0;
    best_t = 0.0;
  }

  // remaining arc length from the projection
  double s_remaining = 0.0;
  if (n >= 2) {
    Vec2 a = path.waypoints[best_seg], b = path.waypoints[best_seg + 1];
    s_remaining = dist(a, b) * (1.0 - best_t);
    for (int i = best_seg + 1; i + 1 < n; ++i) {
      s_remaining += dist(path.waypoints[i], path.waypoints[i + 1]);
    }
  }
  double speed = std::min(v_max, std::sqrt(std::max(0.0, 2.0 * a_max * s_remaining)));

  // lookahead point 0.4 m along the path
  constexpr double kLookahead = 0.4;
  Vec2 target = goal;
  double walk = kLookahead;
  if (n >= 2) {
    int seg = best_seg;
    double t = best_t;
    while (seg + 1 < n) {
      Vec2 a = path.waypoints[seg], b = path.waypoints[seg + 1];
      double seg_len = dist(a, b);
      double left = seg_len * (1.0 - t);
      if (walk <= left || seg + 2 >= n) {
        double adv = seg_len > 0.0 ? std::min(t + walk / seg_len, 1.0) : 1.0;
        target = a + (b - a) * adv;
        break;
      }
      walk -= left;
      ++seg;
      t = 0.0;
    }
  }

  Vec2 dir = target - p;
  double len = dir.norm();
  if (len < 1e-9) return cmd;
  dir = dir * (1.0 / len);
  double c = std::cos(pose.theta), s = std::sin(pose.theta);
  cmd.vx = (dir.x * c + dir.y * s) * speed;
  cmd.vy = (-dir.x * s + dir.y * c) * speed;
  double desired = std::atan2(dir.y, dir.x);
  cmd.omega = std::clamp(4.0 * wrap_angle(desired - pose.theta), -kMaxAngularSpeed,
                         kMaxAngularSpeed);
  return clamp_command(cmd);
}

double aim_omega(const Pose& pose, Vec2 target) {
  double bearing = std::atan2(target.y - pose.y, target.x - pose.x);
  return std::clamp(4.0 * wrap_angle(bearing - pose.theta), -kMaxAngularSpeed,
                    kMaxAngularSpeed);
}

}  // namespace skirmish
