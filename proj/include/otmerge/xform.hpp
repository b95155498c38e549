#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "otmerge/diff.hpp"

namespace otm {

// Every branch of the single-diff transform table. "First"/"second" refer to
// the argument order of transform_single.
enum class Branch : std::uint8_t {
  ins_ins_identical,
  ins_ins_tie_break,       // same position, different text
  ins_ins_first_left,
  ins_ins_first_right,
  ins_del_at_or_before,    // insert at or before the delete's start
  ins_del_after,           // insert past the delete's end
  ins_del_split,           // insert strictly inside the delete
  del_ins_before,          // delete entirely before the insert position
  del_ins_at_or_after,     // insert at or before the delete's start
  del_ins_split,
  del_del_identical,
  del_del_first_left,
  del_del_first_right,
  del_del_overlap_left,
  del_del_overlap_right,
  del_del_same_start_shorter_first,
  del_del_same_start_longer_first,
  del_del_first_contains,
  del_del_second_contains,
  with_empty,              // either side is the identity placeholder
};

inline constexpr std::size_t kBranchCount = static_cast<std::size_t>(Branch::with_empty) + 1;
// Branches of the insert/delete table proper; with_empty is bookkeeping.
inline constexpr std::size_t kTableBranchCount = kBranchCount - 1;

std::string_view branch_name(Branch b);

struct BranchTally {
  std::array<std::uint64_t, kBranchCount> hits{};

  void record(Branch b) { ++hits[static_cast<std::size_t>(b)]; }
  std::uint64_t count(Branch b) const { return hits[static_cast<std::size_t>(b)]; }
  std::size_t table_branches_covered() const;
  void merge(const BranchTally& other);
};

enum class SplitStrategy { midpoint, leftmost };

// Which equal-deletes rule to use. `literal` reproduces the rule as first
// written down (second becomes identity, first stays unchanged), which breaks
// convergence; it exists only as a negative control for the checkers.
enum class EqualDeletesRule { both_empty, literal };

struct XformOptions {
  SplitStrategy split = SplitStrategy::midpoint;
  EqualDeletesRule equal_deletes = EqualDeletesRule::both_empty;
  BranchTally* tally = nullptr;
  std::uint64_t* single_calls = nullptr;
};

// second_after_first applies after `first`; first_after_second after
// `second`. Each holds at most two diffs (two only when an insert splits a
// delete; the second fragment is already expressed after the first).
struct TransformPair {
  DiffSeq second_after_first;
  DiffSeq first_after_second;

  friend bool operator==(const TransformPair&, const TransformPair&) = default;
};

struct SeqTransformPair {
  DiffSeq b_after_a;
  DiffSeq a_after_b;

  friend bool operator==(const SeqTransformPair&, const SeqTransformPair&) = default;
};

// Rewrites two concurrent diffs against the same document so that
// apply(apply(s, first), second_after_first) == apply(apply(s, second), first_after_second).
TransformPair transform_single(const Diff& first, const Diff& second, const XformOptions& opts = {});

// Which table branch transform_single takes for this pair.
Branch branch_of(const Diff& first, const Diff& second);

// Sequence version: apply_seq(apply_seq(s, a), b_after_a) ==
// apply_seq(apply_seq(s, b), a_after_b). Divide and conquer on the longer side.
SeqTransformPair transform_seq(const DiffSeq& a, const DiffSeq& b, const XformOptions& opts = {});

// Drops identity placeholders.
DiffSeq normalize(const DiffSeq& seq);

}  // namespace otm
