#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "skirmish/bots.hpp"
#include "skirmish/combat.hpp"
#include "skirmish/planning.hpp"

namespace skirmish {

inline constexpr int kObsDim = 37;
inline constexpr int kNumActions = 8;  // 4 goal points x 2 target enemies

// Named parameter overrides applied at reset ("VK1" aliases mu_slide).
using ContextMap = std::map<std::string, double>;

struct EnvConfig {
  int k_candidates = 4;
  double best_distance = 1.5;  // d*, m
  int ticks_per_step = 20;
  int max_steps = 50;
  double a_max_plan = 2.0;  // velocity-profile deceleration bound, m/s^2
  RewardWeights rewards;
  CombatConfig combat;
  DynamicsContext dynamics;
  bool continuous_actions = false;
  int lidar_rays = 61;
  double lidar_max_range = 6.0;
};

// Applies context overrides onto a config; throws std::invalid_argument on
// unknown names or out-of-range values.
void apply_contexts(const ContextMap& contexts, EnvConfig& cfg);
// The accepted context names, for documentation and error messages.
const std::vector<std::string>& context_names();

struct AgentAction {
  int discrete = 0;      // [0, 8) when the discrete interface is active
  Twist twist{};         // continuous interface: the command itself
  int target_enemy = 0;  // continuous interface: 0 or 1
};
using JointAction = std::array<AgentAction, kTeamSize>;

// index -> (goal_point_idx, target_enemy_idx); throws std::out_of_range.
std::pair<int, int> decode_action(int index);
int encode_action(int goal_point_idx, int target_enemy_idx);

struct EnvInfo {
  Verdict verdict = Verdict::ongoing;
  std::array<int, kNumTeams> damage{};
  std::array<int, kNumTeams> kills{};
  std::array<double, kNumTeams> team_rewards{};
  std::vector<ShotOutcome> shots;
  int level = 1;
  int steps = 0;
  bool degenerate_candidates = false;
};

struct StepResult {
  std::array<std::vector<double>, kTeamSize> obs;  // one 37-vector per agent
  double reward = 0.0;                             // learning team reward
  bool done = false;
  EnvInfo info;
};

// 37-dim global observation for one learning agent: poses (self, ally,
// enemy1, enemy2), candidate points of both enemies, HP, bullets, time.
std::vector<double> build_observation(const WorldState& world,
                                      const std::array<CandidateSet, kTeamSize>& cands,
                                      int agent_id, const Arena& arena,
                                      const CombatConfig& combat, int steps_remaining,
                                      int max_steps);

// One 2-vs-2 match: robots 0,1 take the joint action, robots 2,3 follow the
// configured rule-based bot. A step covers ticks_per_step physics ticks and
// one shot-resolution pass. Deterministic given (seed, contexts, actions).
class Env {
 public:
  Env(std::shared_ptr<const Arena> arena, EnvConfig cfg);

  StepResult reset(const ContextMap& contexts, uint64_t seed);
  StepResult step(const JointAction& action);

  bool done() const { return done_; }
  int steps_done() const { return steps_done_; }
  const WorldState& world() const { return world_; }
  const EnvConfig& config() const { return cfg_; }
  const Arena& arena() const { return *arena_; }
  // candidate sets around the given team's enemies (slot 0 = lower enemy id)
  const std::array<CandidateSet, kTeamSize>& candidates(int team) const {
    return candidates_[team];
  }
  std::vector<double> lidar(int robot_id) const;

  static constexpr int kTickLimitDefault = 1000;  // 50 steps x 20 ticks

 private:
  void refresh_candidates();
  StepResult make_result(const StepEvents& events) const;

  std::shared_ptr<const Arena> arena_;
  EnvConfig base_cfg_;  // as constructed; contexts are re-applied each reset
  EnvConfig cfg_;
  WorldState world_;
  std::array<CandidateSet, kTeamSize> candidates_[kNumTeams];
  bool cand_degenerate_ = false;
  Rng rng_place_{0}, rng_shots_{0}, rng_cand_{0}, rng_bots_{0};
  int steps_done_ = 0;
  bool done_ = true;
  int tick_limit_ = kTickLimitDefault;
};

}  // namespace skirmish
