#include "skirmish/combat.hpp"

#include <cmath>
#include <stdexcept>

namespace skirmish {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::ongoing: return "ongoing";
    case Verdict::red_wins: return "red_wins";
    case Verdict::blue_wins: return "blue_wins";
    case Verdict::draw: return "draw";
  }
  return "?";
}

std::string to_string(Armor a) {
  switch (a) {
    case Armor::none: return "none";
    case Armor::front: return "front";
    case Armor::left: return "left";
    case Armor::rear: return "rear";
    case Armor::right: return "right";
  }
  return "?";
}

double hit_probability(double d, const HitParams& hp) {
  return hp.p_max / (1.0 + std::exp(hp.kappa * (d - hp.d0)));
}

namespace {

Armor armor_quadrant(const Pose& target, Vec2 shooter_pos) {
  // bearing of the shooter in the target's body frame
  double phi = wrap_angle(std::atan2(shooter_pos.y - target.y, shooter_pos.x - target.x) -
                          target.theta);
  if (std::abs(phi) <= kPi / 4.0) return Armor::front;
  if (std::abs(phi) >= 3.0 * kPi / 4.0) return Armor::rear;
  return phi > 0.0 ? Armor::left : Armor::right;
}

}  // namespace

ShotOutcome resolve_shot(int shooter, int target, WorldState& world, const Arena& arena,
                         const CombatConfig& cfg, const HitParams& hp, Rng& rng) {
  if (shooter < 0 || shooter >= kNumRobots || target < 0 || target >= kNumRobots) {
    throw std::invalid_argument("resolve_shot: invalid robot id");
  }
  if (team_of(shooter) == team_of(target)) {
    throw std::invalid_argument("resolve_shot: target is not an opponent");
  }
  ShotOutcome out;
  out.shooter = shooter;
  out.target = target;
  const Pose& sp = world.bodies[shooter].pose;
  const Pose& tp = world.bodies[target].pose;
  out.distance = dist(sp.position(), tp.position());

  if (!world.combat.alive(shooter)) return out;
  if (world.combat.bullets[shooter] <= 0) return out;
  if (!world.combat.alive(target)) return out;
  if (out.distance > cfg.range_max) return out;
  double bearing = std::atan2(tp.y - sp.y, tp.x - sp.x);
  if (std::abs(wrap_angle(bearing - sp.theta)) > cfg.angle_gate) return out;
  if (!arena.line_of_sight(sp.position(), tp.position())) return out;

  out.fired = true;
  world.combat.bullets[shooter] -= 1;
  double p = hit_probability(out.distance, hp);
  if (rng.uniform() < p) {
    out.hit = true;
    out.armor = armor_quadrant(tp, sp.position());
    double mult = cfg.armor_multiplier[static_cast<int>(out.armor) - 1];
    int dmg = static_cast<int>(std::lround(cfg.damage * mult));
    int actual = std::min(dmg, world.combat.hp[target]);
    world.combat.hp[target] -= actual;
    world.combat.damage_dealt[team_of(shooter)] += actual;
    out.damage = actual;
  }
  return out;
}

Verdict judge(const WorldState& world, int tick, int tick_limit) {
  bool red_dead = world.combat.team_dead(0);
  bool blue_dead = world.combat.team_dead(1);
  if (red_dead && blue_dead) return Verdict::draw;
  if (blue_dead) return Verdict::red_wins;
  if (red_dead) return Verdict::blue_wins;
  if (tick >= tick_limit) {
    int d0 = world.combat.damage_dealt[0];
    int d1 = world.combat.damage_dealt[1];
    if (d0 > d1) return Verdict::red_wins;
    if (d1 > d0) return Verdict::blue_wins;
    return Verdict::draw;
  }
  return Verdict::ongoing;
}

std::array<double, kNumTeams> team_reward(const StepEvents& events,
                                          const RewardWeights& w, Verdict verdict) {
  std::array<double, kNumTeams> r{};
  for (int team = 0; team < kNumTeams; ++team) {
    r[team] = w.r_h * events.damage[team] + w.r_k * events.kills[team];
  }
  if (verdict == Verdict::red_wins) r[0] += w.r_w;
  if (verdict == Verdict::blue_wins) r[1] += w.r_w;
  return r;
}

}  // namespace skirmish
