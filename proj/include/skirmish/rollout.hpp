#pragma once

#include <memory>

#include "skirmish/marl.hpp"

namespace skirmish {

// Immutable copy of everything a worker needs to act.
struct PolicySnapshot {
  std::vector<Mlp> nets;  // one per agent
  double eps = 0.0;
};

PolicySnapshot snapshot_of(const Learner& learner, double eps);

struct WorkerPlan {
  int n_workers = 1;
  int episodes = 1;       // per collection round
  uint64_t base_seed = 0;
  bool async = false;     // handled by the training loop, not by collect()
};

struct EpisodeStats {
  uint64_t seed = 0;
  int steps = 0;
  std::array<double, kNumTeams> returns{};
  Verdict verdict = Verdict::ongoing;
};

struct CollectResult {
  std::vector<Transition> transitions;  // episode-major, step order within
  std::vector<EpisodeStats> stats;
};

// Runs plan.episodes episodes with epsilon-greedy acting. Episodes own
// private Env instances and are seeded independently, so the merged stream
// (ordered by episode index) does not depend on scheduling. Parallelized
// over episodes with OpenMP when n_workers > 1.
CollectResult collect(const PolicySnapshot& policy, const WorkerPlan& plan,
                      const ContextMap& contexts, std::shared_ptr<const Arena> arena,
                      const EnvConfig& cfg, uint64_t round);

// Serial reference implementation: same seeds, same merged order, no
// threading. Kept for tests and the benchmark.
CollectResult collect_reference(const PolicySnapshot& policy, const WorkerPlan& plan,
                                const ContextMap& contexts,
                                std::shared_ptr<const Arena> arena, const EnvConfig& cfg,
                                uint64_t round);

struct EvalResult {
  double win_rate = 0.0;    // wins / episodes; draws are not wins
  double mean_return = 0.0; // team 0 undiscounted return
  double mean_length = 0.0; // steps
  int wins = 0;
  int episodes = 0;
};

// Greedy (eps = 0) policy against the configured bot level over n distinct
// episode seeds. Deterministic given seed.
EvalResult evaluate(const PolicySnapshot& policy, int n_episodes,
                    const ContextMap& contexts, std::shared_ptr<const Arena> arena,
                    const EnvConfig& cfg, uint64_t seed, int n_workers = 1);

}  // namespace skirmish
