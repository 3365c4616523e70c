#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "skirmish/run.hpp"

using namespace skirmish;

namespace {

struct Flags {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_common(CLI::App* cmd, Flags& flags) {
  cmd->add_option_function<std::string>(
         "--config", [&](const std::string& v) { flags.config_path = v; },
         "config file (key = value lines)");
  auto opt = [&, cmd](const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&flags, key](const std::string& v) { flags.overrides.push_back({key, v}); }, help);
  };
  opt("--algo", "algo", "iql | vdn | qmix");
  opt("--level", "level", "opponent difficulty: easy|middle|hard or 1|2|3");
  opt("--seed", "seed", "master seed");
  opt("--workers", "workers", "rollout worker threads");
  opt("--steps", "steps", "training env-step budget");
  opt("--episodes", "episodes", "episode count for play");
  opt("--out", "out", "output directory");
  opt("--checkpoint", "checkpoint", "checkpoint path (eval/play input)");
  opt("--arena-file", "arena_file", "arena layout file (default: built-in)");
  opt("--async", "async", "overlap collection with training (true|false)");
  opt("--port", "port", "serve port");
  opt("--eval-interval", "eval_interval", "env steps between evaluations");
  opt("--eval-episodes", "eval_episodes", "episodes per periodic evaluation");
  opt("--final-eval-episodes", "final_eval_episodes", "episodes for eval command / final evaluation");
  opt("--lr", "lr", "learning rate");
  opt("--batch-size", "batch_size", "train batch size");
  cmd->add_option_function<std::vector<std::string>>(
      "--context",
      [&](const std::vector<std::string>& kvs) {
        for (const auto& kv : kvs) {
          auto eq = kv.find('=');
          if (eq == std::string::npos) {
            throw CLI::ValidationError("--context expects KEY=VALUE, got '" + kv + "'");
          }
          flags.overrides.push_back({"context." + kv.substr(0, eq), kv.substr(eq + 1)});
        }
      },
      "dynamics/combat override, KEY=VALUE (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skirmish: headless 2v2 robot combat arena with a MARL training stack"};
  app.require_subcommand(1);

  Flags flags;
  const char* commands[] = {"train", "eval", "play", "bench", "serve"};
  const char* descs[] = {"train a policy against the scripted opponents",
                         "evaluate a checkpoint's win rate",
                         "run bot-vs-bot or checkpoint-vs-bot episodes, logging trajectories",
                         "measure physics and rollout throughput",
                         "expose reset/step over a line-delimited JSON socket"};
  for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(commands[i], descs[i]), flags);

  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  try {
    std::string file_text;
    if (!flags.config_path.empty()) {
      std::ifstream in(flags.config_path);
      if (!in) {
        std::cerr << "error: cannot open config file: " << flags.config_path << "\n";
        return 2;
      }
      file_text.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    }
    auto overrides = flags.overrides;
    overrides.push_back({"command", app.get_subcommands().front()->get_name()});
    cfg = parse_config(file_text, overrides);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return run(cfg);
}
