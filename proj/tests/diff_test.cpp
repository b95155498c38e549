#include <gtest/gtest.h>

#include <random>

#include "otmerge/diff.hpp"

using namespace otm;

namespace {

Doc thirty() {
  Doc s;
  for (int i = 0; i < 30; ++i) s.push_back(U'A' + i % 26);
  return s;
}

Diff random_any(std::size_t doc_len, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  if (doc_len == 0 || coin(rng)) {
    const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, doc_len)(rng);
    Text t(std::uniform_int_distribution<std::size_t>(1, 3)(rng), U'x');
    return Insert{pos, t};
  }
  const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, doc_len - 1)(rng);
  const std::size_t len = std::uniform_int_distribution<std::size_t>(1, doc_len - pos)(rng);
  return Delete{pos, len};
}

}  // namespace

TEST(Apply, Examples) {
  EXPECT_EQ(otm::apply(U"abcdefgh", Insert{3, U"XY"}), U"abcXYdefgh");
  EXPECT_EQ(otm::apply(U"abcdefgh", Delete{2, 3}), U"abfgh");
  EXPECT_EQ(otm::apply(U"", Insert{0, U"a"}), U"a");
  EXPECT_EQ(otm::apply(U"abc", Empty{}), U"abc");
}

TEST(Apply, OutOfRange) {
  EXPECT_THROW(otm::apply(U"abc", Insert{4, U"x"}), ApplyError);
  EXPECT_THROW(otm::apply(U"abc", Delete{2, 2}), ApplyError);
  try {
    otm::apply(U"abc", Delete{3, 1});
    FAIL();
  } catch (const ApplyError& e) {
    EXPECT_EQ(e.doc_len(), 3u);
    EXPECT_EQ(e.diff(), Diff(Delete{3, 1}));
  }
}

TEST(ApplySeq, Examples) {
  EXPECT_EQ(apply_seq(U"abcdefgh", {}), U"abcdefgh");
  // "abcdefgh" -d(2,2)-> "abefgh" -d(4,2)-> "abef"
  EXPECT_EQ(apply_seq(U"abcdefgh", {Delete{2, 2}, Delete{4, 2}}), U"abef");
}

TEST(ApplySeq, ErrorCarriesIndex) {
  try {
    apply_seq(U"abcd", {Delete{0, 1}, Insert{1, U"x"}, Delete{3, 2}});
    FAIL();
  } catch (const ApplyError& e) {
    EXPECT_EQ(e.index(), 2u);
    EXPECT_EQ(e.doc_len(), 4u);
  }
}

TEST(ApplySeq, BothOrdersAgreeOnThirtyChars) {
  const Doc s = thirty();
  EXPECT_EQ(apply_seq(s, {Insert{12, U"a"}, Insert{28, U"a"}}), apply_seq(s, {Insert{27, U"a"}, Insert{12, U"a"}}));
  EXPECT_EQ(apply_seq(s, {Delete{5, 1}, Delete{15, 1}}), apply_seq(s, {Delete{16, 1}, Delete{5, 1}}));
}

TEST(Constructors, Validate) {
  EXPECT_THROW(make_insert(0, Text{}), std::invalid_argument);
  EXPECT_THROW(make_delete(0, 0), std::invalid_argument);
  EXPECT_EQ(make_insert(2, "hé"), (Insert{2, U"hé"}));
}

TEST(Endpoints, Examples) {
  EXPECT_EQ(endpoints(Insert{12, U"a"}), (Endpoints{12, 12}));
  EXPECT_EQ(endpoints(Delete{5, 3}), (Endpoints{5, 7}));
  EXPECT_EQ(endpoints(Insert{4, U"xy"}), (Endpoints{4, 5}));
  EXPECT_THROW(endpoints(Diff{Empty{}}), DomainError);
}

TEST(Classify, Examples) {
  const Rel r1 = classify(Insert{12, U"a"}, Insert{27, U"a"});
  EXPECT_EQ(r1, (Rel{Cmp::lt, Cmp::lt, false}));
  EXPECT_EQ(r1.coarse(), Coarse::separate_left);

  const Rel r2 = classify(Delete{2, 4}, Delete{2, 4});
  EXPECT_EQ(r2, (Rel{Cmp::eq, Cmp::eq, true}));
  EXPECT_EQ(r2.coarse(), Coarse::same_start);

  const Rel r3 = classify(Delete{1, 3}, Delete{2, 4});
  EXPECT_EQ(r3, (Rel{Cmp::lt, Cmp::lt, true}));
  EXPECT_EQ(r3.coarse(), Coarse::overlap_left);
}

TEST(Classify, SameStartLongerWinsOverRightOverlap) {
  // Both "same start" and "right overlap" hold literally; same start is checked first.
  EXPECT_EQ(classify(Delete{2, 5}, Delete{2, 2}).coarse(), Coarse::same_start);
}

TEST(Lift, Examples) {
  EXPECT_EQ(lift(Insert{27, U"a"}, Diff{Insert{12, U"a"}}), (Insert{28, U"a"}));
  EXPECT_EQ(lift(Delete{16, 1}, Diff{Delete{5, 1}}), (Delete{15, 1}));
  EXPECT_EQ(lift(Delete{4, 2}, Diff{Insert{4, U"xy"}}), (Delete{6, 2}));
  EXPECT_THROW(lift(Delete{1, 1}, Diff{Delete{0, 3}}), DomainError);
}

TEST(Subtract, Examples) {
  EXPECT_EQ(subtract(Delete{2, 4}, Delete{1, 3}), (Delete{4, 2}));
  EXPECT_EQ(subtract(Delete{3, 4}, Delete{2, 2}), (Delete{4, 3}));
  EXPECT_THROW(subtract(Delete{5, 2}, Delete{0, 2}), DomainError);
  EXPECT_THROW(subtract(Delete{2, 2}, Delete{1, 5}), DomainError);
}

TEST(SplitDelete, Examples) {
  EXPECT_EQ(split_delete(Delete{2, 4}, 4), std::make_pair(Delete{2, 2}, Delete{4, 2}));
  EXPECT_EQ(split_delete(Delete{0, 5}, 1), std::make_pair(Delete{0, 1}, Delete{1, 4}));
  EXPECT_THROW(split_delete(Delete{2, 4}, 2), DomainError);
  EXPECT_THROW(split_delete(Delete{2, 4}, 6), DomainError);
}

TEST(ToString, Format) {
  EXPECT_EQ(to_string(Diff{Insert{3, U"XY"}}), "i(3,\"XY\")");
  EXPECT_EQ(to_string(DiffSeq{Delete{2, 3}, Empty{}}), "[d(2,3), e()]");
}

TEST(Utf8, RoundTripAndRejects) {
  const std::string s = "a\xC3\xA9\xE2\x82\xAC\xF0\x9F\x98\x80";
  const Text t = from_utf8(s);
  EXPECT_EQ(t.size(), 4u);
  EXPECT_EQ(to_utf8(t), s);
  EXPECT_THROW(from_utf8("\xC3"), std::invalid_argument);
  EXPECT_THROW(from_utf8("\xED\xA0\x80"), std::invalid_argument);
  EXPECT_THROW(from_utf8("\xC0\xAF"), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Properties

TEST(DiffProperty, ApplicabilityClosure) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = rng() % 10;
    const Doc d(n, U'q');
    const Diff x = random_any(n, rng);
    ASSERT_TRUE(is_applicable(d, x));
    const std::size_t got = otm::apply(d, x).size();
    if (const auto* i = std::get_if<Insert>(&x)) {
      EXPECT_EQ(got, n + i->text.size());
    } else {
      EXPECT_EQ(got, n - std::get<Delete>(x).len);
    }
  }
}

TEST(DiffProperty, ClassificationTotality) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const Diff a = random_any(n, rng);
    const Diff b = random_any(n, rng);
    const Endpoints ea = endpoints(a);
    const Endpoints eb = endpoints(b);
    const Rel r = classify(a, b);
    const Coarse c = r.coarse();
    const bool left = ea.end < eb.start;
    const bool right = ea.start > eb.end;
    EXPECT_EQ(r.overlap, !left && !right);
    if (ea.start == eb.start) {
      EXPECT_EQ(c, Coarse::same_start);
    } else if (left) {
      EXPECT_EQ(c, Coarse::separate_left);
    } else if (right) {
      EXPECT_EQ(c, Coarse::separate_right);
    } else {
      EXPECT_EQ(c, ea.start < eb.start ? Coarse::overlap_left : Coarse::overlap_right);
    }
  }
}

TEST(DiffProperty, LiftRoundTrip) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = rng() % 20;
    const Text t(1 + rng() % 4, U'z');
    const Diff x = random_any(20, rng);
    if (endpoints(x).start < n) continue;
    const Diff up = lift(x, Diff{Insert{n, t}});
    EXPECT_EQ(lift(up, Diff{Delete{n, t.size()}}), x);
  }
}

TEST(DiffProperty, SplitThenApplyEqualsWhole) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + rng() % 12;
    Doc d;
    for (std::size_t i = 0; i < n; ++i) d.push_back(U'a' + rng() % 26);
    const std::size_t pos = rng() % (n - 1);
    const std::size_t len = 2 + rng() % (n - pos - 1);
    const Delete whole{pos, len};
    const std::size_t at = pos + 1 + rng() % (len - 1);
    const auto [left, right] = split_delete(whole, at);
    EXPECT_EQ(left.len + right.len, whole.len);
    EXPECT_EQ(apply_seq(d, {left, lift(right, Diff{left})}), otm::apply(d, whole));
  }
}

TEST(DiffProperty, SubtractConservation) {
  std::mt19937_64 rng(15);
  int checked = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    const Delete inner{rng() % 10, 1 + rng() % 5};
    const Delete outer{rng() % 10, 1 + rng() % 5};
    const Endpoints ei = endpoints(inner);
    const Endpoints eo = endpoints(outer);
    if (!(ei.start <= eo.start && eo.start <= ei.end && ei.end < eo.end)) continue;
    const std::size_t overlap = ei.end - eo.start + 1;
    EXPECT_EQ(outer.len, overlap + subtract(outer, inner).len);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}
