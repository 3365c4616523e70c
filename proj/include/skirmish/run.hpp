#pragma once

#include <memory>

#include "skirmish/config.hpp"

namespace skirmish {

std::shared_ptr<const Arena> arena_for(const RunConfig& cfg);
EnvConfig env_config_for(const RunConfig& cfg);
// The run's contexts with the level folded in (explicit context.level wins).
ContextMap effective_contexts(const RunConfig& cfg);

struct TrainResult {
  long env_steps = 0;
  double final_win_rate = 0.0;
  std::string checkpoint_path;
  std::string metrics_path;
};

// Collect/train loop with periodic evaluation; writes config echo,
// metrics.csv, episodes.jsonl and checkpoints under cfg.out.
TrainResult train_run(const RunConfig& cfg, bool verbose);

EvalResult eval_run(const RunConfig& cfg, bool verbose);

// Bot-vs-bot (or checkpoint-vs-bot) episodes, one trajectory JSONL per
// episode under cfg.out.
int play_run(const RunConfig& cfg, bool verbose);

struct BenchResult {
  double physics_ticks_per_sec = 0.0;  // world ticks (all four robots)
  double env_steps_per_sec = 0.0;
  double collect_serial_sps = 0.0;    // env steps per second
  double collect_parallel_sps = 0.0;  // same, OpenMP path with cfg.workers
};

BenchResult bench_run(const RunConfig& cfg, bool verbose);

int serve_run(const RunConfig& cfg, bool verbose);

// Dispatch on cfg.command. Returns a process exit code: 0 ok, 3 runtime
// fault (config errors exit 2 and are raised before this call).
int run(const RunConfig& cfg, bool verbose = true);

}  // namespace skirmish
