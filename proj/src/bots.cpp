#include "skirmish/bots.hpp"

#include <algorithm>
#include <cmath>

#include "skirmish/rng.hpp"

namespace skirmish {

namespace {

int nearest_living_enemy(const WorldState& world, int robot, int team) {
  auto enemies = enemies_of_team(team);
  int best = -1;
  double best_d = kInf;
  Vec2 p = world.bodies[robot].pose.position();
  for (int e : enemies) {
    if (!world.combat.alive(e)) continue;
    double d = dist(p, world.bodies[e].pose.position());
    if (d < best_d) {
      best_d = d;
      best = e;
    }
  }
  return best;
}

int least_hp_living_enemy(const WorldState& world, int team) {
  auto enemies = enemies_of_team(team);
  int best = -1;
  for (int e : enemies) {
    if (!world.combat.alive(e)) continue;
    if (best == -1 || world.combat.hp[e] < world.combat.hp[best]) best = e;
  }
  return best;
}

int nearest_point_index(const CandidateSet& cands, Vec2 from) {
  int best = 0;
  double best_d = kInf;
  for (int i = 0; i < static_cast<int>(cands.points.size()); ++i) {
    double d = dist(from, cands.points[i]);
    if (d < best_d - 1e-12) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

void plan_decision(BotDecision& dec, const WorldState& world, const Arena& arena,
                   const BotConfig& cfg) {
  Vec2 start = world.bodies[dec.robot].pose.position();
  int sx = std::clamp(arena.cell_x(start.x), 0, arena.nx - 1);
  int sy = std::clamp(arena.cell_y(start.y), 0, arena.ny - 1);
  Vec2 plan_start = arena.cell_occupied(sx, sy) ? arena.nearest_free_cell(start) : start;
  dec.path = profile_path(plan_path(plan_start, dec.goal, arena), cfg.v_max, cfg.a_max);
  dec.twist = follow_path(world.bodies[dec.robot].pose, dec.path, cfg.v_max, cfg.a_max);
  if (dec.target >= 0) {
    dec.twist.omega = aim_omega(world.bodies[dec.robot].pose,
                                world.bodies[dec.target].pose.position());
  }
}

}  // namespace

std::array<BotDecision, kTeamSize> bot_actions(Level level, const WorldState& world,
                                               const Arena& arena, int team,
                                               const BotConfig& cfg, uint64_t seed) {
  auto members = robots_of_team(team);
  auto enemies = enemies_of_team(team);
  std::array<BotDecision, kTeamSize> out;
  for (int i = 0; i < kTeamSize; ++i) out[i].robot = members[i];

  // candidate sets per living enemy, seeded per enemy slot
  std::array<CandidateSet, kTeamSize> cands;
  std::array<bool, kTeamSize> have{false, false};
  for (int i = 0; i < kTeamSize; ++i) {
    if (world.combat.alive(enemies[i])) {
      cands[i] = candidate_points(world, arena, enemies[i], cfg.k_candidates,
                                  derive_seed(seed, i), cfg.best_distance, cfg.inflation);
      have[i] = true;
    }
  }
  auto enemy_slot = [&](int enemy_id) {
    return enemy_id == enemies[0] ? 0 : 1;
  };

  if (level == Level::hard) {
    int target = least_hp_living_enemy(world, team);
    for (int i = 0; i < kTeamSize; ++i) {
      out[i].target = target;
      out[i].shoot = target >= 0;
    }
    if (target >= 0 && have[enemy_slot(target)]) {
      const CandidateSet& cs = cands[enemy_slot(target)];
      Vec2 tp = world.bodies[target].pose.position();
      // score: closeness to the best shooting distance plus line of sight
      std::vector<std::pair<double, int>> scored;
      for (int i = 0; i < static_cast<int>(cs.points.size()); ++i) {
        double s = -std::abs(dist(cs.points[i], tp) - cfg.best_distance) -
                   0.5 * (arena.line_of_sight(cs.points[i], tp) ? 0.0 : 1.0);
        scored.push_back({-s, i});  // sort ascending by -score, tie lowest index
      }
      std::sort(scored.begin(), scored.end());
      int ia = scored[0].second;
      int ib = scored.size() > 1 ? scored[1].second : ia;
      // assign the two robots to the two points minimizing total travel
      Vec2 p0 = world.bodies[members[0]].pose.position();
      Vec2 p1 = world.bodies[members[1]].pose.position();
      double straight = dist(p0, cs.points[ia]) + dist(p1, cs.points[ib]);
      double swapped = dist(p0, cs.points[ib]) + dist(p1, cs.points[ia]);
      int g0 = straight <= swapped ? ia : ib;
      int g1 = straight <= swapped ? ib : ia;
      out[0].goal = cs.points[g0];
      out[0].goal_index = g0;
      out[1].goal = cs.points[g1];
      out[1].goal_index = g1;
    }
  } else {
    for (int i = 0; i < kTeamSize; ++i) {
      int target = level == Level::easy ? nearest_living_enemy(world, members[i], team)
                                        : least_hp_living_enemy(world, team);
      out[i].target = target;
      out[i].shoot = target >= 0;
      if (target >= 0 && have[enemy_slot(target)]) {
        const CandidateSet& cs = cands[enemy_slot(target)];
        int gi = nearest_point_index(cs, world.bodies[members[i]].pose.position());
        out[i].goal = cs.points[gi];
        out[i].goal_index = gi;
      }
    }
  }

  for (int i = 0; i < kTeamSize; ++i) {
    if (!world.combat.alive(members[i]) || out[i].target < 0 || out[i].goal_index < 0) {
      // dead robot or no viable goal: hold position
      out[i].goal = world.bodies[members[i]].pose.position();
      out[i].path = PlannedPath{};
      out[i].twist = Twist{};
      continue;
    }
    plan_decision(out[i], world, arena, cfg);
  }
  return out;
}

}  // namespace skirmish
