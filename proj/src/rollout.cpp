#include "skirmish/rollout.hpp"

#include <omp.h>

#include <stdexcept>

namespace skirmish {

PolicySnapshot snapshot_of(const Learner& learner, double eps) {
  return PolicySnapshot{learner.nets, eps};
}

namespace {

struct EpisodeOutput {
  std::vector<Transition> transitions;
  EpisodeStats stats;
};

EpisodeOutput run_episode(const PolicySnapshot& policy, const ContextMap& contexts,
                          std::shared_ptr<const Arena> arena, const EnvConfig& cfg,
                          uint64_t seed, bool record_transitions) {
  EpisodeOutput out;
  out.stats.seed = seed;
  Env env(arena, cfg);
  StepResult prev = env.reset(contexts, seed);
  Rng explore(derive_seed(seed, 0xE0));
  Mlp::Cache cache;
  while (!prev.done) {
    JointAction action{};
    std::array<int, kTeamSize> idx{};
    for (int agent = 0; agent < kTeamSize; ++agent) {
      policy.nets[agent].forward(prev.obs[agent], cache);
      idx[agent] = epsilon_greedy(policy.nets[agent].output(cache), policy.eps, explore);
      action[agent].discrete = idx[agent];
    }
    StepResult next = env.step(action);
    if (record_transitions) {
      Transition t;
      t.obs = prev.obs;
      t.actions = idx;
      t.reward = next.reward;
      t.next_obs = next.obs;
      t.done = next.done;
      out.transitions.push_back(std::move(t));
    }
    out.stats.steps += 1;
    for (int team = 0; team < kNumTeams; ++team) {
      out.stats.returns[team] += next.info.team_rewards[team];
    }
    out.stats.verdict = next.info.verdict;
    prev = std::move(next);
  }
  return out;
}

uint64_t episode_seed(uint64_t base_seed, uint64_t round, int episode) {
  return derive_seed(base_seed, round * 0x10000ULL + static_cast<uint64_t>(episode));
}

CollectResult merge(std::vector<EpisodeOutput>& outputs) {
  CollectResult res;
  for (auto& out : outputs) {
    for (auto& t : out.transitions) res.transitions.push_back(std::move(t));
    res.stats.push_back(out.stats);
  }
  return res;
}

}  // namespace

CollectResult collect(const PolicySnapshot& policy, const WorkerPlan& plan,
                      const ContextMap& contexts, std::shared_ptr<const Arena> arena,
                      const EnvConfig& cfg, uint64_t round) {
  if (plan.episodes < 1 || plan.n_workers < 1) {
    throw std::invalid_argument("collect: invalid worker plan");
  }
  std::vector<EpisodeOutput> outputs(plan.episodes);
  if (plan.n_workers == 1) {
    for (int e = 0; e < plan.episodes; ++e) {
      outputs[e] = run_episode(policy, contexts, arena, cfg,
                               episode_seed(plan.base_seed, round, e), true);
    }
  } else {
    int threads = std::min(plan.n_workers, plan.episodes);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int e = 0; e < plan.episodes; ++e) {
      outputs[e] = run_episode(policy, contexts, arena, cfg,
                               episode_seed(plan.base_seed, round, e), true);
    }
  }
  return merge(outputs);
}

CollectResult collect_reference(const PolicySnapshot& policy, const WorkerPlan& plan,
                                const ContextMap& contexts,
                                std::shared_ptr<const Arena> arena, const EnvConfig& cfg,
                                uint64_t round) {
  if (plan.episodes < 1) throw std::invalid_argument("collect: invalid worker plan");
  std::vector<EpisodeOutput> outputs(plan.episodes);
  for (int e = 0; e < plan.episodes; ++e) {
    outputs[e] = run_episode(policy, contexts, arena, cfg,
                             episode_seed(plan.base_seed, round, e), true);
  }
  return merge(outputs);
}

EvalResult evaluate(const PolicySnapshot& policy, int n_episodes,
                    const ContextMap& contexts, std::shared_ptr<const Arena> arena,
                    const EnvConfig& cfg, uint64_t seed, int n_workers) {
  if (n_episodes < 1) throw std::invalid_argument("evaluate: n_episodes must be >= 1");
  PolicySnapshot greedy = policy;
  greedy.eps = 0.0;
  std::vector<EpisodeOutput> outputs(n_episodes);
  if (n_workers <= 1) {
    for (int e = 0; e < n_episodes; ++e) {
      outputs[e] = run_episode(greedy, contexts, arena, cfg, derive_seed(seed, e), false);
    }
  } else {
    int threads = std::min(n_workers, n_episodes);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int e = 0; e < n_episodes; ++e) {
      outputs[e] = run_episode(greedy, contexts, arena, cfg, derive_seed(seed, e), false);
    }
  }
  EvalResult res;
  res.episodes = n_episodes;
  for (const auto& out : outputs) {
    if (out.stats.verdict == Verdict::red_wins) res.wins += 1;
    res.mean_return += out.stats.returns[0];
    res.mean_length += out.stats.steps;
  }
  res.win_rate = static_cast<double>(res.wins) / n_episodes;
  res.mean_return /= n_episodes;
  res.mean_length /= n_episodes;
  return res;
}

}  // namespace skirmish
