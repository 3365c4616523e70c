#include "skirmish/run.hpp"

#include <omp.h>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <json.hpp>

#include "skirmish/checkpoint.hpp"
#include "skirmish/server.hpp"

namespace skirmish {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void handle_signal(int) { g_interrupted = 1; }

void install_signal_handlers() {
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
}

double now_sec() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

json dynamics_json(const DynamicsContext& d) {
  return json{{"mu_slide", d.mu_slide},
              {"mu_roll", d.mu_roll},
              {"tau_max", d.tau_max},
              {"kp", d.kp},
              {"ki", d.ki},
              {"kd", d.kd},
              {"mass", d.mass},
              {"wheel_inertia", d.wheel_inertia},
              {"wheel_radius", d.wheel_radius},
              {"p_max", d.hit.p_max},
              {"d0", d.hit.d0},
              {"kappa", d.hit.kappa},
              {"level", static_cast<int>(d.level)}};
}

std::string metadata_for(const RunConfig& cfg, long env_steps) {
  json contexts = json::object();
  for (const auto& [k, v] : cfg.contexts) contexts[k] = v;
  json meta{{"v", 1},
            {"algo", cfg.algo},
            {"level", cfg.level},
            {"seed", cfg.seed},
            {"env_steps", env_steps},
            {"contexts", contexts},
            {"hyper",
             {{"gamma", cfg.hyper.gamma},
              {"lr", cfg.hyper.lr},
              {"batch_size", cfg.hyper.batch_size},
              {"buffer_capacity", cfg.hyper.buffer_capacity},
              {"eps_start", cfg.hyper.eps_start},
              {"eps_end", cfg.hyper.eps_end},
              {"eps_anneal_steps", cfg.hyper.eps_anneal_steps},
              {"target_interval", cfg.hyper.target_interval},
              {"warmup_steps", cfg.hyper.warmup_steps},
              {"hidden", cfg.hyper.hidden},
              {"mixer_embed", cfg.hyper.mixer_embed}}}};
  return meta.dump();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::shared_ptr<const Arena> arena_for(const RunConfig& cfg) {
  if (cfg.arena_file.empty()) {
    return std::make_shared<const Arena>(load_arena(default_arena_text()));
  }
  std::ifstream in(cfg.arena_file);
  if (!in) throw std::runtime_error("cannot open arena file: " + cfg.arena_file);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return std::make_shared<const Arena>(load_arena(text));
}

EnvConfig env_config_for(const RunConfig&) { return EnvConfig{}; }

ContextMap effective_contexts(const RunConfig& cfg) {
  ContextMap ctx = cfg.contexts;
  if (!ctx.count("level")) ctx["level"] = static_cast<double>(cfg.level);
  return ctx;
}

TrainResult train_run(const RunConfig& cfg, bool verbose) {
  install_signal_handlers();
  fs::create_directories(cfg.out);
  write_text(fs::path(cfg.out) / "config_resolved.txt", config_to_text(cfg));

  auto arena = arena_for(cfg);
  EnvConfig env_cfg = env_config_for(cfg);
  ContextMap contexts = effective_contexts(cfg);

  Algo algo = algo_from_string(cfg.algo);
  Learner learner = Learner::make(algo, kObsDim, kNumActions, kTeamSize, kObsDim,
                                  cfg.hyper, derive_seed(cfg.seed, 0xA11));
  ReplayBuffer buffer(static_cast<size_t>(cfg.hyper.buffer_capacity));
  Rng rng_train(derive_seed(cfg.seed, 0x7121));

  std::ofstream metrics(fs::path(cfg.out) / "metrics.csv");
  if (!metrics) throw std::runtime_error("cannot write metrics.csv under " + cfg.out);
  metrics << "step,loss,eps,train_win_rate,eval_win_rate\n";
  std::ofstream episodes_log(fs::path(cfg.out) / "episodes.jsonl");
  episodes_log << json{{"v", 1},
                       {"type", "header"},
                       {"algo", cfg.algo},
                       {"level", cfg.level},
                       {"seed", cfg.seed},
                       {"dynamics", dynamics_json([&] {
                          EnvConfig probe = env_cfg;
                          apply_contexts(contexts, probe);
                          return probe.dynamics;
                        }())}}
                       .dump()
                << "\n";

  long env_steps = 0;
  long episode_count = 0;
  long last_eval_bucket = -1;
  double eval_win_rate = -1.0;
  uint64_t round = 0;
  uint64_t collect_seed = derive_seed(cfg.seed, 0xC011);

  auto do_collect = [&](uint64_t round_idx, double eps) {
    WorkerPlan plan;
    plan.n_workers = cfg.workers;
    plan.episodes = cfg.workers;
    plan.base_seed = collect_seed;
    PolicySnapshot snap = snapshot_of(learner, eps);
    return collect(snap, plan, contexts, arena, env_cfg, round_idx);
  };

  std::future<CollectResult> pending;
  if (cfg.async) pending = std::async(std::launch::async, do_collect, round, epsilon_at(cfg.hyper, 0));

  while (env_steps < cfg.steps && !g_interrupted) {
    double eps = epsilon_at(cfg.hyper, env_steps);
    CollectResult res;
    if (cfg.async) {
      res = pending.get();
      // overlap the next round's collection with this round's training,
      // accepting a policy lag of one round
      pending = std::async(std::launch::async, do_collect, round + 1, eps);
    } else {
      res = do_collect(round, eps);
    }

    long before = env_steps;
    for (auto& t : res.transitions) {
      buffer.push(std::move(t));
      ++env_steps;
    }
    for (const auto& st : res.stats) {
      episodes_log << json{{"v", 1},
                           {"type", "episode"},
                           {"episode", episode_count},
                           {"seed", st.seed},
                           {"steps", st.steps},
                           {"return", {st.returns[0], st.returns[1]}},
                           {"verdict", to_string(st.verdict)}}
                          .dump()
                   << "\n";
      ++episode_count;
    }

    double loss_sum = 0.0;
    long n_train = 0;
    long past_warmup = std::max(0L, env_steps - std::max(before, static_cast<long>(cfg.hyper.warmup_steps)));
    for (long i = 0; i < past_warmup; ++i) {
      if (buffer.size() < static_cast<size_t>(cfg.hyper.batch_size)) break;
      auto batch = buffer.sample(static_cast<size_t>(cfg.hyper.batch_size), rng_train);
      loss_sum += train_step(learner, batch);
      ++n_train;
    }

    int wins = 0;
    for (const auto& st : res.stats) {
      if (st.verdict == Verdict::red_wins) ++wins;
    }
    double train_wr = res.stats.empty() ? 0.0 : static_cast<double>(wins) / res.stats.size();

    long bucket = env_steps / cfg.eval_interval;
    if (bucket > last_eval_bucket) {
      last_eval_bucket = bucket;
      EvalResult ev = evaluate(snapshot_of(learner, 0.0), cfg.eval_episodes, contexts,
                               arena, env_cfg, derive_seed(cfg.seed, 0xE7A0 + bucket),
                               cfg.workers);
      eval_win_rate = ev.win_rate;
    }

    char row[160];
    std::snprintf(row, sizeof(row), "%ld,%.10g,%.10g,%.10g,%.10g\n", env_steps,
                  n_train > 0 ? loss_sum / n_train : 0.0, eps, train_wr, eval_win_rate);
    metrics << row;
    metrics.flush();
    if (verbose && round % 50 == 0) {
      std::printf("[train] step=%ld eps=%.3f loss=%.4f train_wr=%.2f eval_wr=%.2f\n",
                  env_steps, eps, n_train > 0 ? loss_sum / n_train : 0.0, train_wr,
                  eval_win_rate);
    }
    ++round;
  }
  if (cfg.async && pending.valid()) pending.get();

  TrainResult out;
  out.env_steps = env_steps;
  out.metrics_path = (fs::path(cfg.out) / "metrics.csv").string();
  out.checkpoint_path = (fs::path(cfg.out) / "checkpoint_final.bin").string();
  save_checkpoint(learner, out.checkpoint_path, metadata_for(cfg, env_steps));

  EvalResult final_eval = evaluate(snapshot_of(learner, 0.0), cfg.final_eval_episodes,
                                   contexts, arena, env_cfg,
                                   derive_seed(cfg.seed, 0xF19A1), cfg.workers);
  out.final_win_rate = final_eval.win_rate;
  write_text(fs::path(cfg.out) / "summary.json",
             json{{"v", 1},
                  {"env_steps", env_steps},
                  {"episodes", episode_count},
                  {"final_win_rate", final_eval.win_rate},
                  {"final_mean_return", final_eval.mean_return},
                  {"final_mean_length", final_eval.mean_length},
                  {"interrupted", g_interrupted != 0},
                  {"checkpoint", out.checkpoint_path}}
                 .dump() +
                 "\n");
  if (verbose) {
    std::printf("[train] done: steps=%ld final_win_rate=%.3f -> %s\n", env_steps,
                final_eval.win_rate, out.checkpoint_path.c_str());
  }
  return out;
}

EvalResult eval_run(const RunConfig& cfg, bool verbose) {
  if (cfg.checkpoint.empty()) throw std::runtime_error("eval: --checkpoint is required");
  Learner learner = load_checkpoint(cfg.checkpoint);
  auto arena = arena_for(cfg);
  EvalResult ev = evaluate(snapshot_of(learner, 0.0), cfg.final_eval_episodes,
                           effective_contexts(cfg), arena, env_config_for(cfg),
                           derive_seed(cfg.seed, 0xE7A1), cfg.workers);
  if (verbose) {
    std::printf("win_rate=%.4f wins=%d episodes=%d mean_return=%.4f mean_length=%.2f\n",
                ev.win_rate, ev.wins, ev.episodes, ev.mean_return, ev.mean_length);
  }
  return ev;
}

namespace {

json pose_json(const WorldState& w) {
  json poses = json::array();
  for (int r = 0; r < kNumRobots; ++r) {
    const Pose& p = w.bodies[r].pose;
    poses.push_back({p.x, p.y, p.theta});
  }
  return poses;
}

json shots_json(const std::vector<ShotOutcome>& shots) {
  json arr = json::array();
  for (const auto& s : shots) {
    arr.push_back({{"shooter", s.shooter},
                   {"target", s.target},
                   {"fired", s.fired},
                   {"hit", s.hit},
                   {"armor", to_string(s.armor)},
                   {"damage", s.damage},
                   {"distance", s.distance}});
  }
  return arr;
}

// Mirrors the opponent bot into discrete team-0 actions so bot-vs-bot play
// exercises the same action interface as a learned policy.
JointAction bot_as_policy(const Env& env, Level level, uint64_t seed) {
  BotConfig bot_cfg;
  bot_cfg.k_candidates = env.config().k_candidates;
  bot_cfg.best_distance = env.config().best_distance;
  bot_cfg.a_max = env.config().a_max_plan;
  auto decisions = bot_actions(level, env.world(), env.arena(), 0, bot_cfg, seed);
  auto enemies = enemies_of_team(0);
  JointAction action{};
  for (int i = 0; i < kTeamSize; ++i) {
    const auto& dec = decisions[i];
    int slot = dec.target == enemies[1] ? 1 : 0;
    int goal = dec.goal_index >= 0 ? dec.goal_index : 0;
    action[i].discrete = encode_action(goal, slot);
  }
  return action;
}

}  // namespace

int play_run(const RunConfig& cfg, bool verbose) {
  install_signal_handlers();
  fs::create_directories(cfg.out);
  write_text(fs::path(cfg.out) / "config_resolved.txt", config_to_text(cfg));

  auto arena = arena_for(cfg);
  EnvConfig env_cfg = env_config_for(cfg);
  ContextMap contexts = effective_contexts(cfg);

  bool use_checkpoint = !cfg.checkpoint.empty();
  Learner learner;
  if (use_checkpoint) learner = load_checkpoint(cfg.checkpoint);
  Mlp::Cache cache;

  for (int episode = 0; episode < cfg.episodes && !g_interrupted; ++episode) {
    uint64_t ep_seed = derive_seed(cfg.seed, 0x91A7 + episode);
    Env env(arena, env_cfg);
    StepResult prev = env.reset(contexts, ep_seed);
    Rng bot_rng(derive_seed(ep_seed, 0xB07));

    char name[64];
    std::snprintf(name, sizeof(name), "episode_%03d.jsonl", episode);
    std::ofstream traj(fs::path(cfg.out) / name);
    if (!traj) throw std::runtime_error("cannot write trajectory under " + cfg.out);
    traj << json{{"v", 1},
                 {"type", "header"},
                 {"episode", episode},
                 {"seed", ep_seed},
                 {"level", cfg.level},
                 {"team0", use_checkpoint ? "checkpoint" : "bot"},
                 {"dynamics", dynamics_json(env.config().dynamics)}}
                .dump()
         << "\n";

    int step = 0;
    while (!prev.done) {
      JointAction action{};
      if (use_checkpoint) {
        for (int agent = 0; agent < kTeamSize; ++agent) {
          learner.nets[agent].forward(prev.obs[agent], cache);
          action[agent].discrete = argmax(learner.nets[agent].output(cache));
        }
      } else {
        action = bot_as_policy(env, env.config().dynamics.level, bot_rng.next_u64());
      }
      StepResult next = env.step(action);
      ++step;
      traj << json{{"v", 1},
                   {"type", "step"},
                   {"step", step},
                   {"tick", env.world().tick},
                   {"poses", pose_json(env.world())},
                   {"hp", env.world().combat.hp},
                   {"bullets", env.world().combat.bullets},
                   {"shots", shots_json(next.info.shots)},
                   {"rewards", {next.info.team_rewards[0], next.info.team_rewards[1]}},
                   {"verdict", to_string(next.info.verdict)}}
                  .dump()
           << "\n";
      prev = std::move(next);
    }
    if (verbose) {
      std::printf("[play] episode %d: steps=%d verdict=%s\n", episode, step,
                  to_string(prev.info.verdict).c_str());
    }
  }
  return 0;
}

BenchResult bench_run(const RunConfig& cfg, bool verbose) {
  BenchResult out;
  auto arena = arena_for(cfg);
  EnvConfig env_cfg = env_config_for(cfg);
  ContextMap contexts = effective_contexts(cfg);

  {  // raw physics ticks: four robots, fixed commands, no planning
    Env env(arena, env_cfg);
    env.reset(contexts, 7);
    WorldState world = env.world();
    DynamicsContext dyn = env.config().dynamics;
    Twist cmds[kNumRobots] = {{1.0, 0.3, 0.4}, {-0.8, 0.5, -0.2}, {0.6, -1.0, 0.1}, {-0.5, -0.5, 0.3}};
    auto tick_world = [&] {
      for (int r = 0; r < kNumRobots; ++r) {
        std::vector<Circle> others;
        for (int o = 0; o < kNumRobots; ++o) {
          if (o != r) others.push_back(world.footprint(o));
        }
        world.bodies[r] = physics_tick(world.bodies[r], cmds[r], dyn, kTickDt, *arena, others);
      }
      ++world.tick;
    };
    for (int i = 0; i < 2000; ++i) tick_world();  // warm up
    const int n_ticks = 100000;
    double t0 = now_sec();
    for (int i = 0; i < n_ticks; ++i) tick_world();
    out.physics_ticks_per_sec = n_ticks / (now_sec() - t0);
  }

  {  // full environment steps with scripted actions
    Env env(arena, env_cfg);
    Rng rng(3);
    int steps = 0;
    const int target_steps = 1500;
    double t0 = now_sec();
    uint64_t seed = 100;
    env.reset(contexts, seed);
    while (steps < target_steps) {
      if (env.done()) env.reset(contexts, ++seed);
      JointAction a{};
      a[0].discrete = rng.uniform_int(kNumActions);
      a[1].discrete = rng.uniform_int(kNumActions);
      env.step(a);
      ++steps;
    }
    out.env_steps_per_sec = steps / (now_sec() - t0);
  }

  {  // collection throughput, serial reference vs OpenMP path
    Learner learner = Learner::make(algo_from_string(cfg.algo), kObsDim, kNumActions,
                                    kTeamSize, kObsDim, cfg.hyper, derive_seed(cfg.seed, 1));
    PolicySnapshot snap = snapshot_of(learner, 0.2);
    WorkerPlan plan;
    plan.episodes = std::max(8, 2 * cfg.workers);
    plan.base_seed = derive_seed(cfg.seed, 2);

    double t0 = now_sec();
    auto serial = collect_reference(snap, plan, contexts, arena, env_cfg, 0);
    double serial_dt = now_sec() - t0;
    out.collect_serial_sps = serial.transitions.size() / serial_dt;

    plan.n_workers = std::max(2, cfg.workers);
    t0 = now_sec();
    auto parallel = collect(snap, plan, contexts, arena, env_cfg, 0);
    double parallel_dt = now_sec() - t0;
    out.collect_parallel_sps = parallel.transitions.size() / parallel_dt;
  }

  if (verbose) {
    std::printf("physics_ticks_per_sec = %.0f\n", out.physics_ticks_per_sec);
    std::printf("env_steps_per_sec = %.1f\n", out.env_steps_per_sec);
    std::printf("collect_serial_steps_per_sec = %.1f\n", out.collect_serial_sps);
    std::printf("collect_parallel_steps_per_sec = %.1f (workers=%d)\n",
                out.collect_parallel_sps, std::max(2, cfg.workers));
    std::printf("collect_speedup = %.2fx\n", out.collect_parallel_sps / out.collect_serial_sps);
  }
  return out;
}

int serve_run(const RunConfig& cfg, bool verbose) {
  auto arena = arena_for(cfg);
  EnvServer server(arena, env_config_for(cfg), effective_contexts(cfg));
  if (verbose) std::printf("[serve] listening on 127.0.0.1:%d\n", cfg.port);
  server.serve_forever(cfg.port);
  return 0;
}

int run(const RunConfig& cfg, bool verbose) {
  try {
    if (cfg.command == "train") {
      train_run(cfg, verbose);
    } else if (cfg.command == "eval") {
      eval_run(cfg, verbose);
    } else if (cfg.command == "play") {
      play_run(cfg, verbose);
    } else if (cfg.command == "bench") {
      bench_run(cfg, verbose);
    } else if (cfg.command == "serve") {
      serve_run(cfg, verbose);
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace skirmish
