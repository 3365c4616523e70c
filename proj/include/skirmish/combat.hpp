#pragma once

#include <string>
#include <vector>

#include "skirmish/arena.hpp"
#include "skirmish/rng.hpp"
#include "skirmish/world.hpp"

namespace skirmish {

enum class Verdict { ongoing, red_wins, blue_wins, draw };
enum class Armor { none, front, left, rear, right };

std::string to_string(Verdict v);
std::string to_string(Armor a);

struct ShotOutcome {
  int shooter = -1;
  int target = -1;
  bool fired = false;
  bool hit = false;
  Armor armor = Armor::none;
  int damage = 0;
  double distance = 0.0;
};

struct RewardWeights {
  double r_h = 0.02;  // per HP point of damage dealt
  double r_k = 3.0;   // per enemy kill
  double r_w = 20.0;  // for winning
};

// Combat events aggregated over one environment step.
struct StepEvents {
  std::array<int, kNumTeams> damage{};
  std::array<int, kNumTeams> kills{};
  std::vector<ShotOutcome> shots;
};

// Logistic hit-rate-vs-distance curve: p_max / (1 + exp(kappa * (d - d0))).
double hit_probability(double d, const HitParams& hp);

// One shot attempt. Fires only when the shooter has bullets, the target is
// alive, within range, inside the bearing gate and in line of sight; firing
// costs one bullet and the hit is Bernoulli(hit_probability(d)).
ShotOutcome resolve_shot(int shooter, int target, WorldState& world, const Arena& arena,
                         const CombatConfig& cfg, const HitParams& hp, Rng& rng);

// Win judgment: a destroyed team loses immediately; at the tick limit the
// higher damage output wins, equal damage is a draw.
Verdict judge(const WorldState& world, int tick, int tick_limit);

// Per-team shaped reward for one environment step.
std::array<double, kNumTeams> team_reward(const StepEvents& events,
                                          const RewardWeights& w, Verdict verdict);

}  // namespace skirmish
