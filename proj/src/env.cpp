#include "skirmish/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skirmish {

namespace {

struct ContextEntry {
  const char* name;
  double lo, hi;
  void (*apply)(EnvConfig&, double);
};

void check_int(double v, const char* name) {
  if (v != std::floor(v)) {
    throw std::invalid_argument(std::string("context ") + name + " must be an integer");
  }
}

const ContextEntry kRegistry[] = {
    {"VK1", 1e-9, 2.0, [](EnvConfig& c, double v) { c.dynamics.mu_slide = v; }},
    {"mu_slide", 1e-9, 2.0, [](EnvConfig& c, double v) { c.dynamics.mu_slide = v; }},
    {"mu_roll", 1e-9, 2.0, [](EnvConfig& c, double v) { c.dynamics.mu_roll = v; }},
    {"tau_max", 1e-9, 100.0, [](EnvConfig& c, double v) { c.dynamics.tau_max = v; }},
    {"kp", 0.0, 100.0, [](EnvConfig& c, double v) { c.dynamics.kp = v; }},
    {"ki", 0.0, 100.0, [](EnvConfig& c, double v) { c.dynamics.ki = v; }},
    {"kd", 0.0, 100.0, [](EnvConfig& c, double v) { c.dynamics.kd = v; }},
    {"mass", 1e-9, 1000.0, [](EnvConfig& c, double v) { c.dynamics.mass = v; }},
    {"wheel_inertia", 1e-12, 10.0, [](EnvConfig& c, double v) { c.dynamics.wheel_inertia = v; }},
    {"p_max", 1e-9, 1.0, [](EnvConfig& c, double v) { c.dynamics.hit.p_max = v; }},
    {"d0", 0.0, 100.0, [](EnvConfig& c, double v) { c.dynamics.hit.d0 = v; }},
    {"kappa", 1e-9, 100.0, [](EnvConfig& c, double v) { c.dynamics.hit.kappa = v; }},
    {"hp0", 1.0, 1e6, [](EnvConfig& c, double v) { check_int(v, "hp0"); c.combat.hp0 = static_cast<int>(v); }},
    {"bullets0", 0.0, 1e6, [](EnvConfig& c, double v) { check_int(v, "bullets0"); c.combat.bullets0 = static_cast<int>(v); }},
    {"level", 1.0, 3.0, [](EnvConfig& c, double v) { check_int(v, "level"); c.dynamics.level = static_cast<Level>(static_cast<int>(v)); }},
};

}  // namespace

void apply_contexts(const ContextMap& contexts, EnvConfig& cfg) {
  for (const auto& [name, value] : contexts) {
    const ContextEntry* entry = nullptr;
    for (const auto& e : kRegistry) {
      if (name == e.name) {
        entry = &e;
        break;
      }
    }
    if (!entry) throw std::invalid_argument("unknown context key: " + name);
    if (!(value >= entry->lo && value <= entry->hi)) {
      throw std::invalid_argument("context " + name + " out of range");
    }
    entry->apply(cfg, value);
  }
  cfg.dynamics.validate();
}

const std::vector<std::string>& context_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : kRegistry) v.push_back(e.name);
    return v;
  }();
  return names;
}

std::pair<int, int> decode_action(int index) {
  if (index < 0 || index >= kNumActions) {
    throw std::out_of_range("decode_action: index out of [0, 8)");
  }
  return {index / 2, index % 2};
}

int encode_action(int goal_point_idx, int target_enemy_idx) {
  return 2 * goal_point_idx + target_enemy_idx;
}

std::vector<double> build_observation(const WorldState& world,
                                      const std::array<CandidateSet, kTeamSize>& cands,
                                      int agent_id, const Arena& arena,
                                      const CombatConfig& combat, int steps_remaining,
                                      int max_steps) {
  std::vector<double> obs;
  obs.reserve(kObsDim);
  int ally = agent_id == 0 ? 1 : 0;
  const int order[4] = {agent_id, ally, 2, 3};
  for (int r : order) {
    const Pose& p = world.bodies[r].pose;
    obs.push_back(p.x / arena.length);
    obs.push_back(p.y / arena.width);
    obs.push_back(p.theta / kPi);
  }
  for (const auto& cs : cands) {
    for (const auto& p : cs.points) {
      obs.push_back(p.x / arena.length);
      obs.push_back(p.y / arena.width);
    }
  }
  for (int r : order) obs.push_back(static_cast<double>(world.combat.hp[r]) / combat.hp0);
  for (int r : order) {
    obs.push_back(static_cast<double>(world.combat.bullets[r]) / combat.bullets0);
  }
  obs.push_back(static_cast<double>(steps_remaining) / max_steps);
  return obs;
}

Env::Env(std::shared_ptr<const Arena> arena, EnvConfig cfg)
    : arena_(std::move(arena)), base_cfg_(cfg), cfg_(cfg) {
  if (!arena_) throw std::invalid_argument("Env: null arena");
}

void Env::refresh_candidates() {
  cand_degenerate_ = false;
  for (int team = 0; team < kNumTeams; ++team) {
    auto enemies = enemies_of_team(team);
    for (int slot = 0; slot < kTeamSize; ++slot) {
      int enemy = enemies[slot];
      if (!world_.combat.alive(enemy)) continue;  // keep the last set for the dead
      candidates_[team][slot] =
          candidate_points(world_, *arena_, enemy, cfg_.k_candidates, rng_cand_.next_u64(),
                           cfg_.best_distance, arena_->inflation);
      cand_degenerate_ = cand_degenerate_ || candidates_[team][slot].degenerate;
    }
  }
}

StepResult Env::make_result(const StepEvents& events) const {
  StepResult res;
  Verdict verdict = judge(world_, world_.tick, tick_limit_);
  res.info.verdict = verdict;
  res.info.damage = world_.combat.damage_dealt;
  res.info.kills = events.kills;
  res.info.shots = events.shots;
  res.info.level = static_cast<int>(cfg_.dynamics.level);
  res.info.steps = steps_done_;
  res.info.degenerate_candidates = cand_degenerate_;
  res.info.team_rewards = team_reward(events, cfg_.rewards, verdict);
  res.reward = res.info.team_rewards[0];
  res.done = verdict != Verdict::ongoing;
  for (int agent = 0; agent < kTeamSize; ++agent) {
    res.obs[agent] = build_observation(world_, candidates_[0], agent, *arena_, cfg_.combat,
                                       cfg_.max_steps - steps_done_, cfg_.max_steps);
  }
  return res;
}

StepResult Env::reset(const ContextMap& contexts, uint64_t seed) {
  cfg_ = base_cfg_;
  apply_contexts(contexts, cfg_);
  tick_limit_ = cfg_.max_steps * cfg_.ticks_per_step;

  rng_place_ = Rng(derive_seed(seed, 0x01));
  rng_shots_ = Rng(derive_seed(seed, 0x02));
  rng_cand_ = Rng(derive_seed(seed, 0x03));
  rng_bots_ = Rng(derive_seed(seed, 0x04));

  world_ = WorldState{};
  for (int r = 0; r < kNumRobots; ++r) {
    RobotBody body;
    const Rect& birth = arena_->birth_areas[r];
    // uniform placement inside the birth area, clear of walls and obstacles
    Vec2 p{birth.cx, birth.cy};
    for (int attempt = 0; attempt < 32; ++attempt) {
      Vec2 trial{rng_place_.uniform(birth.min_x(), birth.max_x()),
                 rng_place_.uniform(birth.min_y(), birth.max_y())};
      if (arena_->is_free(trial, body.footprint_radius)) {
        p = trial;
        break;
      }
    }
    body.pose.x = p.x;
    body.pose.y = p.y;
    body.pose.theta = team_of(r) == 0 ? 0.0 : wrap_angle(kPi);
    world_.bodies[r] = body;
    world_.combat.hp[r] = cfg_.combat.hp0;
    world_.combat.bullets[r] = cfg_.combat.bullets0;
  }
  world_.tick = 0;
  steps_done_ = 0;
  done_ = false;

  for (auto& team_sets : candidates_) {
    for (auto& cs : team_sets) {
      cs = CandidateSet{};
      cs.points.assign(cfg_.k_candidates, Vec2{});
      cs.angle_index.assign(cfg_.k_candidates, -1);
    }
  }
  refresh_candidates();

  StepEvents none;
  StepResult res = make_result(none);
  res.done = false;
  res.reward = 0.0;
  res.info.team_rewards = {0.0, 0.0};
  return res;
}

StepResult Env::step(const JointAction& action) {
  if (done_) throw std::logic_error("Env::step called after episode end");

  struct Intent {
    int target = -1;  // robot id to aim and shoot at
    bool has_goal = false;
    Vec2 goal{};
    Twist direct{};  // continuous mode
    bool direct_mode = false;
    PlannedPath path;
  };
  std::array<Intent, kNumRobots> intents;

  // learning team
  auto enemies0 = enemies_of_team(0);
  for (int agent = 0; agent < kTeamSize; ++agent) {
    Intent& it = intents[agent];
    if (!world_.combat.alive(agent)) continue;  // dead agents no-op
    if (cfg_.continuous_actions) {
      it.direct_mode = true;
      it.direct = clamp_command(action[agent].twist);
      it.target = enemies0[std::clamp(action[agent].target_enemy, 0, 1)];
    } else {
      auto [goal_idx, enemy_idx] = decode_action(action[agent].discrete);
      it.target = enemies0[enemy_idx];
      it.goal = candidates_[0][enemy_idx].points[goal_idx];
      it.has_goal = true;
    }
  }

  // opponent team
  BotConfig bot_cfg;
  bot_cfg.k_candidates = cfg_.k_candidates;
  bot_cfg.best_distance = cfg_.best_distance;
  bot_cfg.a_max = cfg_.a_max_plan;
  auto decisions = bot_actions(cfg_.dynamics.level, world_, *arena_, 1, bot_cfg,
                               rng_bots_.next_u64());
  for (const auto& dec : decisions) {
    Intent& it = intents[dec.robot];
    it.target = dec.target;
    it.goal = dec.goal;
    it.has_goal = world_.combat.alive(dec.robot) && dec.target >= 0;
    it.path = dec.path;
  }

  // plan once per step for the learning robots
  for (int agent = 0; agent < kTeamSize; ++agent) {
    Intent& it = intents[agent];
    if (!it.has_goal) continue;
    Vec2 start = world_.bodies[agent].pose.position();
    int sx = std::clamp(arena_->cell_x(start.x), 0, arena_->nx - 1);
    int sy = std::clamp(arena_->cell_y(start.y), 0, arena_->ny - 1);
    Vec2 plan_start = arena_->cell_occupied(sx, sy) ? arena_->nearest_free_cell(start) : start;
    it.path = profile_path(plan_path(plan_start, it.goal, *arena_), kMaxLinearSpeed,
                           cfg_.a_max_plan);
  }

  // physics
  for (int t = 0; t < cfg_.ticks_per_step; ++t) {
    for (int r = 0; r < kNumRobots; ++r) {
      if (!world_.combat.alive(r)) continue;
      const Intent& it = intents[r];
      Twist cmd;
      if (it.direct_mode) {
        cmd = it.direct;
      } else if (it.has_goal) {
        cmd = follow_path(world_.bodies[r].pose, it.path, kMaxLinearSpeed, cfg_.a_max_plan);
        if (it.target >= 0 && world_.combat.alive(it.target)) {
          cmd.omega = aim_omega(world_.bodies[r].pose,
                                world_.bodies[it.target].pose.position());
        }
      }
      std::vector<Circle> others;
      others.reserve(kNumRobots - 1);
      for (int o = 0; o < kNumRobots; ++o) {
        if (o != r) others.push_back(world_.footprint(o));
      }
      world_.bodies[r] = physics_tick(world_.bodies[r], cmd, cfg_.dynamics, kTickDt,
                                      *arena_, others);
    }
    ++world_.tick;
  }

  // one shot-resolution pass per robot, in id order
  StepEvents events;
  for (int r = 0; r < kNumRobots; ++r) {
    const Intent& it = intents[r];
    if (it.target < 0 || !world_.combat.alive(r)) continue;
    bool was_alive = world_.combat.alive(it.target);
    ShotOutcome shot = resolve_shot(r, it.target, world_, *arena_, cfg_.combat,
                                    cfg_.dynamics.hit, rng_shots_);
    if (shot.fired) {
      events.shots.push_back(shot);
      events.damage[team_of(r)] += shot.damage;
      if (was_alive && !world_.combat.alive(it.target)) events.kills[team_of(r)] += 1;
    }
  }

  ++steps_done_;
  refresh_candidates();
  StepResult res = make_result(events);
  done_ = res.done;

  // dead robots hold their last twist at zero
  for (int r = 0; r < kNumRobots; ++r) {
    if (!world_.combat.alive(r)) {
      world_.bodies[r].twist = Twist{};
      world_.bodies[r].wheel_speeds = {};
    }
  }
  return res;
}

std::vector<double> Env::lidar(int robot_id) const {
  std::vector<Circle> others;
  for (int o = 0; o < kNumRobots; ++o) {
    if (o != robot_id) others.push_back(world_.footprint(o));
  }
  return lidar_scan(*arena_, world_.bodies[robot_id].pose, cfg_.lidar_rays,
                    cfg_.lidar_max_range, others);
}

}  // namespace skirmish
