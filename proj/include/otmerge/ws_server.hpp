#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <thread>

#include "otmerge/hub.hpp"

namespace otm {

// WebSocket front end for a Hub. Every frame from every connection is handled
// on one io thread, so hub commands never interleave. Clients connect to /ws;
// each frame carries one JSON message.
class WsServer {
 public:
  // Binds immediately; port 0 picks a free port. Throws std::system_error if
  // the address cannot be bound.
  WsServer(Hub hub, std::uint16_t port, const std::string& address = "127.0.0.1");
  ~WsServer();

  WsServer(const WsServer&) = delete;
  WsServer& operator=(const WsServer&) = delete;

  std::uint16_t port() const;

  // Serves until stop() is called.
  void run();
  // Serves until stop(), SIGINT or SIGTERM.
  void run_until_interrupted();
  // Serves on a background thread.
  void start();
  void stop();

  // Runs `fn` against the hub on the io thread and waits for it.
  void inspect(const std::function<void(const Hub&)>& fn);
  Doc doc();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

}  // namespace otm
