#pragma once

#include <array>

#include "skirmish/dynamics.hpp"

namespace skirmish {

inline constexpr int kNumRobots = 4;
inline constexpr int kTeamSize = 2;
inline constexpr int kNumTeams = 2;

// Robots 0,1 form team 0 (red, the learning side); 2,3 form team 1 (blue).
inline int team_of(int robot_id) { return robot_id / kTeamSize; }
inline std::array<int, 2> robots_of_team(int team) { return {team * 2, team * 2 + 1}; }
inline std::array<int, 2> enemies_of_team(int team) { return robots_of_team(1 - team); }

struct CombatConfig {
  int hp0 = 500;
  int bullets0 = 50;
  int damage = 50;  // HP per hit, scaled by the armor multiplier
  std::array<double, 4> armor_multiplier{1.0, 1.0, 1.0, 1.0};  // front/left/rear/right
  double range_max = 3.0;            // m
  double angle_gate = kPi / 6.0;     // rad, shooter bearing tolerance
};

struct CombatState {
  std::array<int, kNumRobots> hp{};
  std::array<int, kNumRobots> bullets{};
  std::array<int, kNumTeams> damage_dealt{};

  bool alive(int id) const { return hp[id] > 0; }
  bool team_dead(int team) const {
    auto r = robots_of_team(team);
    return !alive(r[0]) && !alive(r[1]);
  }
};

struct WorldState {
  std::array<RobotBody, kNumRobots> bodies;
  CombatState combat;
  int tick = 0;

  Circle footprint(int id) const {
    return {bodies[id].pose.position(), bodies[id].footprint_radius};
  }
};

}  // namespace skirmish
