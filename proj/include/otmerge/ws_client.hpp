#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "otmerge/hub.hpp"

namespace otm {

// Minimal WebSocket text-frame client. Frames are read on a background
// thread and queued.
class WsConnection {
 public:
  WsConnection(const std::string& host, std::uint16_t port, const std::string& path = "/ws");
  ~WsConnection();

  WsConnection(const WsConnection&) = delete;
  WsConnection& operator=(const WsConnection&) = delete;

  void send(std::string frame);
  // Waits for the next frame; throws std::runtime_error on timeout or once
  // the connection is gone and the queue is drained.
  std::string receive(std::chrono::milliseconds timeout = std::chrono::seconds(10));
  std::optional<std::string> try_receive();
  bool closed() const;
  void close();

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// Headless protocol client: a Replica driven over a WsConnection. Incoming
// frames are buffered until pump() so a script decides when they land.
class ScriptedClient {
 public:
  ScriptedClient(const std::string& host, std::uint16_t port, ClientId id, Delivery delivery);

  // Sends join and waits for the snapshot.
  void join();
  void edit(const Diff& d) { replica_.edit(d); }
  // Sends the outbox as a put and waits until its acknowledgment has arrived
  // (it is applied by the next pump).
  void flush();
  // Sends a get, waits for every reply, then pumps.
  void get();
  // Applies every frame received so far, in order.
  std::size_t pump();
  // Waits until every request has a reply queued.
  void await_replies();

  const Replica& replica() const { return replica_; }
  const Doc& doc() const { return replica_.doc(); }

 private:
  void fill(bool block);

  WsConnection conn_;
  Replica replica_;
  std::deque<wire::Msg> inbox_;
  std::size_t replies_queued_ = 0;
};

}  // namespace otm
