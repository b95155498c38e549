#include "otmerge/hub.hpp"

#include "otmerge/codec.hpp"
#include "overloaded.hpp"

namespace otm {

Hub::Hub(Doc initial, Delivery delivery, XformOptions opts)
    : delivery_(delivery), opts_(opts), state_(std::move(initial)) {}

const Doc& Hub::doc() const { return state_.doc; }

std::optional<std::uint64_t> Hub::serial_of(const ClientId& c) const {
  for (const auto& [conn, client] : clients_) {
    if (client.id == c) return client.serial;
  }
  return std::nullopt;
}

std::vector<LedgerEntry> Hub::ledger_of(const ClientId& c) const {
  for (const auto& [conn, client] : clients_) {
    if (client.id != c) continue;
    if (delivery_ == Delivery::pull) return {LedgerEntry{0, state_.pending.at(c)}};
    return {client.ledger.begin(), client.ledger.end()};
  }
  return {};
}

std::vector<Outgoing> Hub::fail(ConnId conn, std::string msg) {
  return {Outgoing{conn, wire::Err{std::move(msg)}, true}};
}

std::vector<Outgoing> Hub::handle_frame(ConnId conn, std::string_view frame) {
  wire::Msg msg;
  try {
    msg = wire::decode(frame);
  } catch (const ParseError& e) {
    return fail(conn, std::string("bad frame: ") + e.what());
  }
  return handle(conn, msg);
}

std::vector<Outgoing> Hub::handle(ConnId conn, const wire::Msg& msg) {
  if (const auto* join = std::get_if<wire::Join>(&msg)) return on_join(conn, *join);
  auto it = clients_.find(conn);
  const bool is_request = std::holds_alternative<wire::Put>(msg) || std::holds_alternative<wire::Get>(msg);
  if (!is_request) return fail(conn, "unexpected message from a client");
  if (it == clients_.end()) return fail(conn, "join first");
  if (const auto* put = std::get_if<wire::Put>(&msg)) return on_put(conn, it->second, *put);
  return on_get(conn, it->second);
}

void Hub::disconnect(ConnId conn) {
  auto it = clients_.find(conn);
  if (it == clients_.end()) return;
  state_.pending.erase(it->second.id);
  state_.joined.erase(it->second.id);
  clients_.erase(it);
}

std::vector<Outgoing> Hub::on_join(ConnId conn, const wire::Join& m) {
  if (clients_.count(conn)) return fail(conn, "this connection already joined");
  if (m.client.empty()) return fail(conn, "client id must be non-empty");
  Doc snapshot;
  try {
    snapshot = server_join(state_, m.client);
  } catch (const SessionError& e) {
    return fail(conn, e.what());
  }
  clients_.emplace(conn, Client{m.client, 0, {}});
  return {Outgoing{conn, wire::DocSnapshot{std::move(snapshot), 0}}};
}

std::vector<Outgoing> Hub::on_put(ConnId conn, Client& c, const wire::Put& m) {
  if (m.seen > c.serial) {
    return fail(conn, "seen " + std::to_string(m.seen) + " is ahead of serial " + std::to_string(c.serial));
  }
  if (delivery_ == Delivery::push) return push_put(conn, c, m);
  try {
    server_put(state_, c.id, m.diffs, opts_);
  } catch (const std::exception& e) {
    return fail(conn, e.what());
  }
  return {Outgoing{conn, wire::Diffs{{}, ++c.serial}}};
}

std::vector<Outgoing> Hub::push_put(ConnId conn, Client& c, const wire::Put& m) {
  while (!c.ledger.empty() && c.ledger.front().serial <= m.seen) c.ledger.pop_front();

  // Work on copies so a rejected put leaves everything as it was.
  DiffSeq rebased = m.diffs;
  std::deque<LedgerEntry> remainder = c.ledger;
  Doc next;
  try {
    for (LedgerEntry& entry : remainder) {
      SeqTransformPair p = transform_seq(entry.diffs, rebased, opts_);
      rebased = std::move(p.b_after_a);
      entry.diffs = std::move(p.a_after_b);
    }
    rebased = normalize(rebased);
    next = apply_seq(state_.doc, rebased);
  } catch (const std::exception& e) {
    return fail(conn, std::string("put does not apply after rebasing: ") + e.what());
  }

  state_.doc = std::move(next);
  c.ledger = std::move(remainder);

  std::vector<Outgoing> out;
  if (!rebased.empty()) {
    for (auto& [other_conn, other] : clients_) {
      if (other_conn == conn) continue;
      const std::uint64_t serial = ++other.serial;
      other.ledger.push_back(LedgerEntry{serial, rebased});
      out.push_back(Outgoing{other_conn, wire::Diffs{rebased, serial}});
    }
  }
  out.push_back(Outgoing{conn, wire::Diffs{{}, ++c.serial}});
  return out;
}

std::vector<Outgoing> Hub::on_get(ConnId conn, Client& c) {
  if (delivery_ == Delivery::push) return {Outgoing{conn, wire::Diffs{{}, ++c.serial}}};
  return {Outgoing{conn, wire::Diffs{server_get(state_, c.id), ++c.serial}}};
}

// ---------------------------------------------------------------------------

Replica::Replica(ClientId id, Delivery delivery) : id_(std::move(id)), delivery_(delivery) {}

void Replica::edit(const Diff& d) {
  if (!joined_) throw SessionError("edit before the document arrived");
  doc_ = otm::apply(doc_, d);
  outbox_.push_back(d);
}

wire::Put Replica::put_request() {
  if (!joined_) throw SessionError("put before join completed");
  if (delivery_ == Delivery::pull) {
    for (Request r : outstanding_) {
      if (r == Request::get) throw SessionError("put would overtake an outstanding get");
    }
  }
  wire::Put put{outbox_, seen_};
  in_flight_.push_back(std::move(outbox_));
  outbox_.clear();
  outstanding_.push_back(Request::put);
  return put;
}

wire::Get Replica::get_request() {
  if (!joined_) throw SessionError("get before join completed");
  outstanding_.push_back(Request::get);
  return wire::Get{};
}

bool Replica::is_reply(const wire::Msg& msg) const {
  if (const auto* d = std::get_if<wire::Diffs>(&msg)) return delivery_ == Delivery::pull || d->diffs.empty();
  return true;
}

void Replica::absorb(DiffSeq incoming) {
  for (DiffSeq& put : in_flight_) {
    SeqTransformPair p = transform_seq(incoming, put);
    put = std::move(p.b_after_a);
    incoming = std::move(p.a_after_b);
  }
  SeqTransformPair p = transform_seq(incoming, outbox_);
  Doc next = apply_seq(doc_, p.a_after_b);
  doc_ = std::move(next);
  outbox_ = std::move(p.b_after_a);
}

void Replica::receive(const wire::Msg& msg) {
  std::visit(detail::overloaded{
                 [&](const wire::DocSnapshot& m) {
                   if (joined_) throw SessionError("second document snapshot");
                   joined_ = true;
                   doc_ = m.text;
                   seen_ = m.serial;
                 },
                 [&](const wire::Diffs& m) {
                   if (!joined_) throw SessionError("diffs before the document arrived");
                   if (is_reply(msg)) {
                     if (outstanding_.empty()) throw SessionError("unsolicited reply");
                     const Request r = outstanding_.front();
                     outstanding_.pop_front();
                     if (r == Request::put) {
                       in_flight_.pop_front();
                     } else if (delivery_ == Delivery::pull) {
                       absorb(m.diffs);
                     }
                   } else {
                     absorb(m.diffs);
                   }
                   seen_ = m.serial;
                 },
                 [&](const wire::Err& m) { throw SessionError("server error: " + m.msg); },
                 [&](const auto&) { throw SessionError("unexpected client-bound message"); },
             },
             msg);
}

}  // namespace otm
