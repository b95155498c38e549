#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "otmerge/diff.hpp"
#include "otmerge/xform.hpp"

namespace otm {

using ClientId = std::string;

class SessionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Authoritative document plus, per joined client, the queue of rebased
// foreign diffs that client has not fetched yet.
struct ServerState {
  Doc doc;
  std::map<ClientId, DiffSeq> pending;
  std::set<ClientId> joined;

  explicit ServerState(Doc initial = {}) : doc(std::move(initial)) {}
};

// Returns the document the client starts from. Throws SessionError if the
// client has already joined.
Doc server_join(ServerState& st, const ClientId& c);

// Rebases `diffs` (made against the server document with pending[c] not yet
// applied) and applies it. The rebased diffs are queued for every other
// client and pending[c] is rebased over the put.
void server_put(ServerState& st, const ClientId& c, const DiffSeq& diffs, const XformOptions& opts = {});

// Hands over and clears pending[c].
DiffSeq server_get(ServerState& st, const ClientId& c);

// Client in faithful mode only receives with an empty outbox. Live mode
// rebases the outbox over whatever arrives.
enum class ReceiveMode { faithful, live };

struct ClientState {
  ClientId id;
  Doc doc;
  DiffSeq outbox;
};

ClientState make_client(ClientId id, Doc doc);

// Applies locally and queues for the next flush. Throws ApplyError.
void client_edit(ClientState& cs, const Diff& d);

// Returns the outbox and clears it. The local document is unchanged.
DiffSeq client_flush(ClientState& cs);

void client_receive(ClientState& cs, const DiffSeq& delivered, ReceiveMode mode = ReceiveMode::faithful,
                    const XformOptions& opts = {});

}  // namespace otm
