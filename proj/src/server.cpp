#include "skirmish/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <json.hpp>
#include <stdexcept>

namespace skirmish {

using nlohmann::json;

EnvServer::EnvServer(std::shared_ptr<const Arena> arena, EnvConfig cfg,
                     ContextMap base_contexts)
    : env_(std::move(arena), std::move(cfg)), base_contexts_(std::move(base_contexts)) {}

EnvServer::~EnvServer() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

namespace {

json info_json(const EnvInfo& info) {
  return json{{"verdict", to_string(info.verdict)},
              {"damage", info.damage},
              {"kills", info.kills},
              {"team_rewards", info.team_rewards},
              {"level", info.level},
              {"steps", info.steps}};
}

json obs_json(const StepResult& res) {
  return json{res.obs[0], res.obs[1]};
}

}  // namespace

std::string EnvServer::handle_line(const std::string& line) {
  json reply;
  reply["v"] = 1;
  try {
    json msg = json::parse(line);
    std::string cmd = msg.at("cmd").get<std::string>();
    if (cmd == "reset") {
      ContextMap contexts = base_contexts_;
      if (msg.contains("contexts")) {
        for (auto& [k, v] : msg["contexts"].items()) contexts[k] = v.get<double>();
      }
      uint64_t seed = msg.value("seed", 0ULL);
      StepResult res = env_.reset(contexts, seed);
      reply["obs"] = obs_json(res);
      reply["info"] = info_json(res.info);
    } else if (cmd == "step") {
      auto acts = msg.at("actions");
      if (!acts.is_array() || acts.size() != kTeamSize) {
        throw std::invalid_argument("step: actions must be an array of 2 indices");
      }
      JointAction action{};
      for (int i = 0; i < kTeamSize; ++i) action[i].discrete = acts[i].get<int>();
      StepResult res = env_.step(action);
      reply["obs"] = obs_json(res);
      reply["reward"] = res.reward;
      reply["done"] = res.done;
      reply["info"] = info_json(res.info);
    } else if (cmd == "close") {
      reply["ok"] = true;
    } else {
      throw std::invalid_argument("unknown cmd: " + cmd);
    }
  } catch (const std::exception& e) {
    reply = json{{"v", 1}, {"error", e.what()}};
  }
  return reply.dump();
}

int EnvServer::start(int port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error("socket() failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw std::runtime_error("bind() failed on port " + std::to_string(port));
  }
  if (::listen(listen_fd_, 1) != 0) throw std::runtime_error("listen() failed");
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  return ntohs(addr.sin_port);
}

void EnvServer::serve_client(int fd) {
  std::string pending;
  char buf[4096];
  for (;;) {
    ssize_t n = ::read(fd, buf, sizeof(buf));
    if (n <= 0) break;
    pending.append(buf, static_cast<size_t>(n));
    size_t pos;
    bool closed = false;
    while ((pos = pending.find('\n')) != std::string::npos) {
      std::string line = pending.substr(0, pos);
      pending.erase(0, pos + 1);
      if (line.empty()) continue;
      std::string reply = handle_line(line) + "\n";
      size_t off = 0;
      while (off < reply.size()) {
        ssize_t w = ::write(fd, reply.data() + off, reply.size() - off);
        if (w <= 0) {
          closed = true;
          break;
        }
        off += static_cast<size_t>(w);
      }
      if (line.find("\"close\"") != std::string::npos || closed) {
        closed = true;
        break;
      }
    }
    if (closed) break;
  }
  ::close(fd);
}

void EnvServer::serve_clients(int n) {
  for (int i = 0; i < n; ++i) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    serve_client(fd);
  }
}

void EnvServer::serve_forever(int port) {
  start(port);
  for (;;) serve_clients(1);
}

}  // namespace skirmish
