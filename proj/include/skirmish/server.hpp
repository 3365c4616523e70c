#pragma once

#include <memory>
#include <string>

#include "skirmish/env.hpp"

namespace skirmish {

// Line-delimited JSON protocol exposing reset/step to external policies:
//   {"cmd":"reset","seed":1,"contexts":{"level":2}}      -> obs + info
//   {"cmd":"step","actions":[a0,a1]}                      -> obs/reward/done/info
//   {"cmd":"close"}                                       -> ok, ends the session
// One JSON object per message in both directions.
class EnvServer {
 public:
  EnvServer(std::shared_ptr<const Arena> arena, EnvConfig cfg, ContextMap base_contexts);
  ~EnvServer();

  // Binds 127.0.0.1:port (0 picks an ephemeral port); returns the bound port.
  int start(int port);
  // Accepts and serves n clients sequentially, then returns.
  void serve_clients(int n);
  void serve_forever(int port);

  // Protocol core, exposed for direct testing.
  std::string handle_line(const std::string& line);

 private:
  void serve_client(int fd);

  Env env_;
  ContextMap base_contexts_;
  int listen_fd_ = -1;
};

}  // namespace skirmish
