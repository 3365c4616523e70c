#pragma once

#include <string>
#include <vector>

#include "skirmish/marl.hpp"
#include "skirmish/rollout.hpp"

namespace skirmish {

struct RunConfig {
  std::string command;  // train | eval | play | bench | serve
  std::string algo = "vdn";
  int level = 1;  // 1 easy, 2 middle, 3 hard
  uint64_t seed = 1;
  int workers = 1;
  long steps = 50000;   // train env-step budget
  int episodes = 10;    // play / eval episode count
  std::string out = "runs/out";
  std::string checkpoint;
  std::string arena_file;  // empty -> built-in default layout
  bool async = false;
  int port = 10000;  // serve
  int eval_interval = 2500;
  int eval_episodes = 20;
  int final_eval_episodes = 100;
  ContextMap contexts;
  Hyper hyper;

  void validate() const;  // throws std::invalid_argument
};

// Parses `key = value` config text, then applies (key, value) overrides on
// top (command-line flags win). Unknown keys and malformed values throw
// std::invalid_argument.
RunConfig parse_config(const std::string& file_text,
                       const std::vector<std::pair<std::string, std::string>>& overrides);

// Serializes the fully resolved config; parse_config(text, {}) round-trips.
std::string config_to_text(const RunConfig& cfg);

int parse_level(const std::string& s);  // accepts 1/2/3 or easy/middle/hard

}  // namespace skirmish
