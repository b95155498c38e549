#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "otmerge/session.hpp"
#include "otmerge/wire.hpp"

namespace otm {

enum class Delivery { pull, push };

using ConnId = std::uint64_t;

struct Outgoing {
  ConnId conn = 0;
  wire::Msg msg;
  bool close_after = false;
};

// Diff batches sent (or, in pull mode, queued) for one client and not yet
// confirmed by a later put's "seen".
struct LedgerEntry {
  std::uint64_t serial = 0;
  DiffSeq diffs;
};

// The collaboration server as a pure state machine: one command in, the
// frames to send out. Not thread-safe; the transport serializes calls.
//
// Every put is answered with an empty "diffs" batch (the put's
// acknowledgment). In pull mode a get returns the pending queue and
// acknowledges it; in push mode foreign batches are sent as they happen,
// never empty, and a get is answered with an empty batch that marks
// everything sent before it. A client can therefore match every empty
// batch to its own puts and gets in order.
class Hub {
 public:
  explicit Hub(Doc initial = {}, Delivery delivery = Delivery::pull, XformOptions opts = {});

  std::vector<Outgoing> handle(ConnId conn, const wire::Msg& msg);
  // Decodes first; undecodable frames get an error and close the connection.
  std::vector<Outgoing> handle_frame(ConnId conn, std::string_view frame);
  void disconnect(ConnId conn);

  const Doc& doc() const;
  Delivery delivery() const { return delivery_; }
  std::size_t client_count() const { return clients_.size(); }
  std::optional<std::uint64_t> serial_of(const ClientId& c) const;
  // Unconfirmed batches for a client (push mode), or the session queue as a
  // single entry (pull mode).
  std::vector<LedgerEntry> ledger_of(const ClientId& c) const;

 private:
  struct Client {
    ClientId id;
    std::uint64_t serial = 0;
    std::deque<LedgerEntry> ledger;  // push mode only
  };

  std::vector<Outgoing> on_join(ConnId conn, const wire::Join& m);
  std::vector<Outgoing> on_put(ConnId conn, Client& c, const wire::Put& m);
  std::vector<Outgoing> on_get(ConnId conn, Client& c);
  std::vector<Outgoing> push_put(ConnId conn, Client& c, const wire::Put& m);

  static std::vector<Outgoing> fail(ConnId conn, std::string msg);

  Delivery delivery_;
  XformOptions opts_;
  ServerState state_;
  std::map<ConnId, Client> clients_;
};

// Client side of the protocol, transport-free. Keeps the local document, the
// unsent edits, and the puts awaiting acknowledgment, and rebases incoming
// batches over both the same way the server rebases puts.
class Replica {
 public:
  Replica(ClientId id, Delivery delivery);

  const ClientId& id() const { return id_; }
  bool joined() const { return joined_; }
  const Doc& doc() const { return doc_; }
  const DiffSeq& outbox() const { return outbox_; }
  std::size_t in_flight() const { return in_flight_.size(); }
  std::size_t outstanding() const { return outstanding_.size(); }
  std::uint64_t seen() const { return seen_; }

  wire::Join join_request() const { return wire::Join{id_}; }
  // Throws ApplyError.
  void edit(const Diff& d);
  // Moves the outbox into flight. In pull mode a put may not overtake an
  // outstanding get (throws SessionError).
  wire::Put put_request();
  wire::Get get_request();

  // True if this frame answers one of our own requests rather than being a
  // pushed foreign batch. Decidable before the frame is applied.
  bool is_reply(const wire::Msg& msg) const;
  // Throws SessionError on an err frame or a protocol violation.
  void receive(const wire::Msg& msg);

 private:
  enum class Request { put, get };

  void absorb(DiffSeq incoming);

  ClientId id_;
  Delivery delivery_;
  bool joined_ = false;
  Doc doc_;
  DiffSeq outbox_;
  std::deque<DiffSeq> in_flight_;
  std::deque<Request> outstanding_;
  std::uint64_t seen_ = 0;
};

}  // namespace otm
