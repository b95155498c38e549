#include <gtest/gtest.h>

#include <random>

#include "otmerge/session.hpp"
#include "otmerge/sim.hpp"

using namespace otm;

TEST(Join, FreshServer) {
  ServerState st(U"s");
  EXPECT_EQ(server_join(st, "c1"), U"s");
  ASSERT_EQ(st.pending.count("c1"), 1u);
  EXPECT_TRUE(st.pending["c1"].empty());
  EXPECT_TRUE(st.joined.count("c1"));
}

TEST(Join, TwoJoinsShareDocument) {
  ServerState st(U"hello");
  const Doc d1 = server_join(st, "c1");
  const Doc d2 = server_join(st, "c2");
  EXPECT_EQ(d1, st.doc);
  EXPECT_EQ(d2, st.doc);
}

TEST(Join, DuplicateRejected) {
  ServerState st;
  server_join(st, "c1");
  EXPECT_THROW(server_join(st, "c1"), SessionError);
}

TEST(Join, LeavesOthersPendingAlone) {
  ServerState st(U"abc");
  server_join(st, "c1");
  server_join(st, "c2");
  server_put(st, "c1", {Insert{0, U"x"}});
  server_join(st, "c3");
  EXPECT_EQ(st.pending["c2"], (DiffSeq{Insert{0, U"x"}}));
  EXPECT_TRUE(st.pending["c3"].empty());
}

TEST(Put, EmptyPendingIsPlainApply) {
  ServerState st(U"abcdefgh");
  server_join(st, "c1");
  server_join(st, "c2");
  const DiffSeq d{Delete{2, 3}};
  server_put(st, "c1", d);
  EXPECT_EQ(st.doc, U"abfgh");
  EXPECT_EQ(st.pending["c2"], d);
  EXPECT_TRUE(st.pending["c1"].empty());
}

TEST(Put, UnknownClient) {
  ServerState st;
  EXPECT_THROW(server_put(st, "ghost", {}), SessionError);
  EXPECT_THROW(server_get(st, "ghost"), SessionError);
}

TEST(Put, InapplicableLeavesStateIntact) {
  ServerState st(U"abc");
  server_join(st, "c1");
  server_join(st, "c2");
  const ServerState before = st;
  EXPECT_THROW(server_put(st, "c1", {Delete{1, 5}}), SessionError);
  EXPECT_EQ(st.doc, before.doc);
  EXPECT_EQ(st.pending, before.pending);
}

// Two clients edit the same s concurrently; client 1 puts first.
TEST(Put, BaseCaseOfTwoClientProof) {
  const Doc s = U"the quick brown fox";
  const DiffSeq big_delta{Insert{4, U"very "}, Delete{0, 4}};
  const DiffSeq small_delta{Delete{10, 5}, Insert{10, U"red"}};

  ServerState st(s);
  ClientState c1 = make_client("c1", server_join(st, "c1"));
  ClientState c2 = make_client("c2", server_join(st, "c2"));
  for (const Diff& d : big_delta) client_edit(c1, d);
  for (const Diff& d : small_delta) client_edit(c2, d);

  server_put(st, "c1", client_flush(c1));
  server_put(st, "c2", client_flush(c2));

  const SeqTransformPair x = transform_seq(big_delta, small_delta);
  EXPECT_EQ(st.doc, apply_seq(apply_seq(s, big_delta), x.b_after_a));
  EXPECT_EQ(st.pending["c1"], normalize(x.b_after_a));
  EXPECT_EQ(st.pending["c2"], normalize(x.a_after_b));

  client_receive(c1, server_get(st, "c1"));
  client_receive(c2, server_get(st, "c2"));
  EXPECT_EQ(c1.doc, st.doc);
  EXPECT_EQ(c2.doc, st.doc);
  EXPECT_EQ(to_utf8(st.doc), "very quick red fox");
}

// After the base case, client 1 puts again before getting.
TEST(Put, InductionStepOfTwoClientProof) {
  const Doc s = U"abcdefghij";
  ServerState st(s);
  ClientState c1 = make_client("c1", server_join(st, "c1"));
  ClientState c2 = make_client("c2", server_join(st, "c2"));

  client_edit(c1, Delete{2, 3});
  client_edit(c2, Insert{3, U"XY"});
  server_put(st, "c1", client_flush(c1));
  server_put(st, "c2", client_flush(c2));

  const Doc s_prime = st.doc;
  const DiffSeq pending1 = st.pending["c1"];
  const DiffSeq pending2 = st.pending["c2"];
  // Hypothesis: both clients reach s' through their pending queues.
  ASSERT_EQ(apply_seq(c1.doc, pending1), s_prime);
  ASSERT_EQ(apply_seq(c2.doc, pending2), s_prime);

  const DiffSeq further{Insert{0, U"<"}, Delete{4, 1}};
  for (const Diff& d : further) client_edit(c1, d);
  server_put(st, "c1", client_flush(c1));

  const SeqTransformPair x = transform_seq(pending1, further);
  EXPECT_EQ(st.doc, apply_seq(s_prime, x.b_after_a));
  EXPECT_EQ(apply_seq(c1.doc, st.pending["c1"]), st.doc);
  EXPECT_EQ(apply_seq(c2.doc, st.pending["c2"]), st.doc);

  client_receive(c1, server_get(st, "c1"));
  client_receive(c2, server_get(st, "c2"));
  EXPECT_EQ(c1.doc, st.doc);
  EXPECT_EQ(c2.doc, st.doc);
}

TEST(Get, Examples) {
  ServerState st(U"abc");
  server_join(st, "c1");
  server_join(st, "c2");
  EXPECT_TRUE(server_get(st, "c1").empty());
  server_put(st, "c2", {Insert{3, U"d"}});
  EXPECT_EQ(server_get(st, "c1"), (DiffSeq{Insert{3, U"d"}}));
  EXPECT_TRUE(server_get(st, "c1").empty());
}

TEST(Client, EditFlushReceive) {
  ClientState cs = make_client("c", U"");
  client_edit(cs, Insert{0, U"a"});
  EXPECT_EQ(cs.doc, U"a");
  client_edit(cs, Insert{1, U"b"});
  EXPECT_EQ(cs.outbox, (DiffSeq{Insert{0, U"a"}, Insert{1, U"b"}}));
  EXPECT_THROW(client_edit(cs, Delete{1, 5}), ApplyError);
  EXPECT_EQ(client_flush(cs), (DiffSeq{Insert{0, U"a"}, Insert{1, U"b"}}));
  EXPECT_EQ(cs.doc, U"ab");
  EXPECT_TRUE(client_flush(cs).empty());

  ClientState r = make_client("r", U"abc");
  client_receive(r, {Insert{0, U"x"}});
  EXPECT_EQ(r.doc, U"xabc");
  client_receive(r, {});
  EXPECT_EQ(r.doc, U"xabc");
}

TEST(Client, FaithfulRejectsUnflushedReceive) {
  ClientState cs = make_client("c", U"abc");
  client_edit(cs, Insert{0, U"a"});
  EXPECT_THROW(client_receive(cs, {Insert{0, U"b"}}), SessionError);
}

TEST(Client, LiveModeRebasesOutbox) {
  ServerState st(U"");
  ClientState c1 = make_client("c1", server_join(st, "c1"));
  ClientState c2 = make_client("c2", server_join(st, "c2"));
  client_edit(c1, Insert{0, U"a"});
  client_edit(c2, Insert{0, U"b"});
  server_put(st, "c2", client_flush(c2));

  client_receive(c1, server_get(st, "c1"), ReceiveMode::live);
  EXPECT_EQ(c1.outbox.size(), 1u);
  server_put(st, "c1", client_flush(c1));
  client_receive(c2, server_get(st, "c2"), ReceiveMode::live);
  client_receive(c1, server_get(st, "c1"), ReceiveMode::live);
  EXPECT_EQ(c1.doc, st.doc);
  EXPECT_EQ(c2.doc, st.doc);
  EXPECT_EQ(st.doc.size(), 2u);
}

// Random interleavings of puts and gets, with a ghost copy of what the server
// believes each client holds.
TEST(SessionProperty, PendingQueueReproducesServerDoc) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    std::mt19937_64 rng(seed);
    ServerState st(U"abcdef");
    std::vector<ClientState> cs;
    std::map<ClientId, Doc> known;
    for (int i = 0; i < 3; ++i) {
      const ClientId id = "c" + std::to_string(i);
      cs.push_back(make_client(id, server_join(st, id)));
      known[id] = st.doc;
    }
    GenParams gen;
    for (int step = 0; step < 60; ++step) {
      ClientState& c = cs[rng() % cs.size()];
      switch (rng() % 3) {
        case 0:
          client_edit(c, random_diff(c.doc.size(), gen, rng));
          break;
        case 1:
          server_put(st, c.id, client_flush(c));
          known[c.id] = c.doc;
          break;
        default:
          if (!c.outbox.empty()) break;
          client_receive(c, server_get(st, c.id));
          known[c.id] = c.doc;
          break;
      }
      for (const ClientState& other : cs) {
        ASSERT_EQ(apply_seq(known[other.id], st.pending[other.id]), st.doc) << "seed " << seed;
      }
    }
  }
}
