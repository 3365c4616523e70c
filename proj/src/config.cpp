#include "skirmish/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace skirmish {

int parse_level(const std::string& s) {
  if (s == "easy" || s == "1") return 1;
  if (s == "middle" || s == "2") return 2;
  if (s == "hard" || s == "3") return 3;
  throw std::invalid_argument("bad level: " + s + " (expected easy|middle|hard or 1|2|3)");
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

long to_long(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long r = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (...) {
    throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double r = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (...) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad bool for " + key + ": '" + v + "'");
}

void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "command") cfg.command = value;
  else if (key == "algo") cfg.algo = value;
  else if (key == "level") cfg.level = parse_level(value);
  else if (key == "seed") cfg.seed = static_cast<uint64_t>(to_long(key, value));
  else if (key == "workers") cfg.workers = static_cast<int>(to_long(key, value));
  else if (key == "steps") cfg.steps = to_long(key, value);
  else if (key == "episodes") cfg.episodes = static_cast<int>(to_long(key, value));
  else if (key == "out") cfg.out = value;
  else if (key == "checkpoint") cfg.checkpoint = value;
  else if (key == "arena_file") cfg.arena_file = value;
  else if (key == "async") cfg.async = to_bool(key, value);
  else if (key == "port") cfg.port = static_cast<int>(to_long(key, value));
  else if (key == "eval_interval") cfg.eval_interval = static_cast<int>(to_long(key, value));
  else if (key == "eval_episodes") cfg.eval_episodes = static_cast<int>(to_long(key, value));
  else if (key == "final_eval_episodes") cfg.final_eval_episodes = static_cast<int>(to_long(key, value));
  else if (key == "gamma") cfg.hyper.gamma = to_double(key, value);
  else if (key == "lr") cfg.hyper.lr = to_double(key, value);
  else if (key == "batch_size") cfg.hyper.batch_size = static_cast<int>(to_long(key, value));
  else if (key == "buffer_capacity") cfg.hyper.buffer_capacity = static_cast<int>(to_long(key, value));
  else if (key == "eps_start") cfg.hyper.eps_start = to_double(key, value);
  else if (key == "eps_end") cfg.hyper.eps_end = to_double(key, value);
  else if (key == "eps_anneal_steps") cfg.hyper.eps_anneal_steps = static_cast<int>(to_long(key, value));
  else if (key == "target_interval") cfg.hyper.target_interval = static_cast<int>(to_long(key, value));
  else if (key == "warmup_steps") cfg.hyper.warmup_steps = static_cast<int>(to_long(key, value));
  else if (key == "hidden") cfg.hyper.hidden = static_cast<int>(to_long(key, value));
  else if (key == "mixer_embed") cfg.hyper.mixer_embed = static_cast<int>(to_long(key, value));
  else if (key.rfind("context.", 0) == 0) {
    cfg.contexts[key.substr(8)] = to_double(key, value);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

}  // namespace

RunConfig parse_config(const std::string& file_text,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig cfg;
  std::istringstream in(file_text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected 'key = value' at line " +
                                  std::to_string(line_no));
    }
    apply_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  for (const auto& [key, value] : overrides) apply_kv(cfg, key, value);
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  static const std::vector<std::string> commands = {"train", "eval", "play", "bench", "serve"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    throw std::invalid_argument("config: command must be one of train|eval|play|bench|serve");
  }
  algo_from_string(algo);  // throws on unknown
  if (level < 1 || level > 3) throw std::invalid_argument("config: level out of 1..3");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (steps < 1) throw std::invalid_argument("config: steps must be >= 1");
  if (episodes < 1) throw std::invalid_argument("config: episodes must be >= 1");
  if (out.empty()) throw std::invalid_argument("config: out must not be empty");
  if (port < 1 || port > 65535) throw std::invalid_argument("config: port out of range");
  if (eval_interval < 1) throw std::invalid_argument("config: eval_interval must be >= 1");
  if (eval_episodes < 1 || final_eval_episodes < 1) {
    throw std::invalid_argument("config: eval episode counts must be >= 1");
  }
  if (!(hyper.gamma >= 0.0 && hyper.gamma < 1.0 + 1e-12)) {
    throw std::invalid_argument("config: gamma out of [0, 1]");
  }
  if (!(hyper.lr > 0.0)) throw std::invalid_argument("config: lr must be positive");
  if (hyper.batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
  if (hyper.buffer_capacity < hyper.batch_size) {
    throw std::invalid_argument("config: buffer_capacity must be >= batch_size");
  }
  if (!(hyper.eps_start >= 0.0 && hyper.eps_start <= 1.0) ||
      !(hyper.eps_end >= 0.0 && hyper.eps_end <= 1.0)) {
    throw std::invalid_argument("config: eps bounds out of [0, 1]");
  }
  if (hyper.eps_anneal_steps < 1) throw std::invalid_argument("config: eps_anneal_steps must be >= 1");
  if (hyper.target_interval < 1) throw std::invalid_argument("config: target_interval must be >= 1");
  if (hyper.warmup_steps < 0) throw std::invalid_argument("config: warmup_steps must be >= 0");
  if (hyper.hidden < 1 || hyper.mixer_embed < 1) {
    throw std::invalid_argument("config: network widths must be >= 1");
  }
  // context names and ranges are validated by the registry
  EnvConfig probe;
  apply_contexts(contexts, probe);
}

std::string config_to_text(const RunConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "command = " << cfg.command << "\n";
  out << "algo = " << cfg.algo << "\n";
  out << "level = " << cfg.level << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "workers = " << cfg.workers << "\n";
  out << "steps = " << cfg.steps << "\n";
  out << "episodes = " << cfg.episodes << "\n";
  out << "out = " << cfg.out << "\n";
  if (!cfg.checkpoint.empty()) out << "checkpoint = " << cfg.checkpoint << "\n";
  if (!cfg.arena_file.empty()) out << "arena_file = " << cfg.arena_file << "\n";
  out << "async = " << (cfg.async ? "true" : "false") << "\n";
  out << "port = " << cfg.port << "\n";
  out << "eval_interval = " << cfg.eval_interval << "\n";
  out << "eval_episodes = " << cfg.eval_episodes << "\n";
  out << "final_eval_episodes = " << cfg.final_eval_episodes << "\n";
  out << "gamma = " << cfg.hyper.gamma << "\n";
  out << "lr = " << cfg.hyper.lr << "\n";
  out << "batch_size = " << cfg.hyper.batch_size << "\n";
  out << "buffer_capacity = " << cfg.hyper.buffer_capacity << "\n";
  out << "eps_start = " << cfg.hyper.eps_start << "\n";
  out << "eps_end = " << cfg.hyper.eps_end << "\n";
  out << "eps_anneal_steps = " << cfg.hyper.eps_anneal_steps << "\n";
  out << "target_interval = " << cfg.hyper.target_interval << "\n";
  out << "warmup_steps = " << cfg.hyper.warmup_steps << "\n";
  out << "hidden = " << cfg.hyper.hidden << "\n";
  out << "mixer_embed = " << cfg.hyper.mixer_embed << "\n";
  for (const auto& [name, value] : cfg.contexts) {
    out << "context." << name << " = " << value << "\n";
  }
  return out.str();
}

}  // namespace skirmish
