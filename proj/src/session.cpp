#include "otmerge/session.hpp"

namespace otm {

namespace {

DiffSeq& pending_of(ServerState& st, const ClientId& c) {
  auto it = st.pending.find(c);
  if (it == st.pending.end()) throw SessionError("unknown client \"" + c + "\"");
  return it->second;
}

}  // namespace

Doc server_join(ServerState& st, const ClientId& c) {
  if (!st.joined.insert(c).second) throw SessionError("client \"" + c + "\" already joined");
  st.pending.emplace(c, DiffSeq{});
  return st.doc;
}

void server_put(ServerState& st, const ClientId& c, const DiffSeq& diffs, const XformOptions& opts) {
  DiffSeq& mine = pending_of(st, c);
  SeqTransformPair rebased = transform_seq(mine, diffs, opts);
  rebased.b_after_a = normalize(rebased.b_after_a);

  // Validate before touching anything so a bad put leaves the state intact.
  Doc next;
  try {
    next = apply_seq(st.doc, rebased.b_after_a);
  } catch (const ApplyError& e) {
    throw SessionError("put from \"" + c + "\" does not apply after rebasing: " + e.what());
  }

  st.doc = std::move(next);
  mine = normalize(rebased.a_after_b);
  for (auto& [other, queue] : st.pending) {
    if (other == c) continue;
    queue.insert(queue.end(), rebased.b_after_a.begin(), rebased.b_after_a.end());
  }
}

DiffSeq server_get(ServerState& st, const ClientId& c) {
  DiffSeq& mine = pending_of(st, c);
  DiffSeq out;
  out.swap(mine);
  return out;
}

ClientState make_client(ClientId id, Doc doc) { return ClientState{std::move(id), std::move(doc), {}}; }

void client_edit(ClientState& cs, const Diff& d) {
  cs.doc = otm::apply(cs.doc, d);
  cs.outbox.push_back(d);
}

DiffSeq client_flush(ClientState& cs) {
  DiffSeq out;
  out.swap(cs.outbox);
  return out;
}

void client_receive(ClientState& cs, const DiffSeq& delivered, ReceiveMode mode, const XformOptions& opts) {
  if (mode == ReceiveMode::faithful) {
    if (!cs.outbox.empty()) {
      throw SessionError("client \"" + cs.id + "\" received with unflushed edits");
    }
    cs.doc = apply_seq(cs.doc, delivered);
    return;
  }
  SeqTransformPair rebased = transform_seq(cs.outbox, delivered, opts);
  Doc next = apply_seq(cs.doc, rebased.b_after_a);
  cs.doc = std::move(next);
  cs.outbox = normalize(rebased.a_after_b);
}

}  // namespace otm
