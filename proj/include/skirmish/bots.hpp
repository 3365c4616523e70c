#pragma once

#include <array>

#include "skirmish/planning.hpp"

namespace skirmish {

struct BotConfig {
  int k_candidates = 4;
  double best_distance = 1.5;  // d*, m
  double inflation = 0.3;
  double v_max = kMaxLinearSpeed;
  double a_max = 2.0;  // planner deceleration assumption, m/s^2
};

struct BotDecision {
  int robot = -1;
  int target = -1;        // -1 when no living enemy
  Vec2 goal{};
  int goal_index = -1;    // index into the target's candidate set
  PlannedPath path;
  Twist twist{};          // follow_path + aim at the target
  bool shoot = false;
};

// Rule-based opponents for one team. easy: nearest candidate point of the
// nearest enemy; middle: same movement, target the least-HP enemy; hard:
// both robots siege the least-HP enemy at its two best candidate points.
std::array<BotDecision, kTeamSize> bot_actions(Level level, const WorldState& world,
                                               const Arena& arena, int team,
                                               const BotConfig& cfg, uint64_t seed);

}  // namespace skirmish
