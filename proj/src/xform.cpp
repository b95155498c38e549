#include "otmerge/xform.hpp"

#include <algorithm>
#include <span>

namespace otm {

namespace {

TransformPair insert_insert(const Insert& a, const Insert& b, Branch br) {
  switch (br) {
    case Branch::ins_ins_identical:
      return {{b}, {a}};
    case Branch::ins_ins_tie_break:
      // The diff whose text sorts lower ends up to the right.
      if (a.text < b.text) return {{b}, {lift(a, b)}};
      return {{lift(b, a)}, {a}};
    case Branch::ins_ins_first_left:
      return {{lift(b, a)}, {a}};
    default:
      return {{b}, {lift(a, b)}};
  }
}

TransformPair insert_delete(const Insert& ins, const Delete& del, Branch br) {
  switch (br) {
    case Branch::ins_del_at_or_before:
      return {{lift(del, ins)}, {ins}};
    case Branch::ins_del_after:
      return {{del}, {lift(ins, del)}};
    default: {
      auto [left, right] = split_delete(del, ins.pos);
      return {{left, lift(lift(right, ins), left)}, {lift(ins, left)}};
    }
  }
}

TransformPair delete_delete(const Delete& a, const Delete& b, Branch br, EqualDeletesRule rule) {
  switch (br) {
    case Branch::del_del_identical:
      if (rule == EqualDeletesRule::literal) return {{}, {a}};
      return {{}, {}};
    case Branch::del_del_first_left:
      return {{lift(b, a)}, {a}};
    case Branch::del_del_first_right:
      return {{b}, {lift(a, b)}};
    case Branch::del_del_overlap_left:
      return {{lift(subtract(b, a), a)}, {split_delete(a, b.pos).first}};
    case Branch::del_del_overlap_right:
      return {{split_delete(b, a.pos).first}, {lift(subtract(a, b), b)}};
    case Branch::del_del_same_start_shorter_first:
      return {{lift(subtract(b, a), a)}, {}};
    case Branch::del_del_same_start_longer_first:
      return {{}, {lift(subtract(a, b), b)}};
    case Branch::del_del_first_contains:
      // Both fragments of the first close up once the second is gone.
      return {{}, {Delete{a.pos, a.len - b.len}}};
    default:
      return {{Delete{b.pos, b.len - a.len}}, {}};
  }
}

Branch classify_insert_insert(const Insert& a, const Insert& b) {
  if (a.pos == b.pos) return a.text == b.text ? Branch::ins_ins_identical : Branch::ins_ins_tie_break;
  return a.pos < b.pos ? Branch::ins_ins_first_left : Branch::ins_ins_first_right;
}

Branch classify_insert_delete(const Insert& ins, const Delete& del) {
  if (ins.pos <= del.pos) return Branch::ins_del_at_or_before;
  if (ins.pos >= del.pos + del.len) return Branch::ins_del_after;
  return Branch::ins_del_split;
}

Branch classify_delete_insert(const Delete& del, const Insert& ins) {
  if (ins.pos <= del.pos) return Branch::del_ins_at_or_after;
  if (ins.pos >= del.pos + del.len) return Branch::del_ins_before;
  return Branch::del_ins_split;
}

Branch classify_delete_delete(const Delete& a, const Delete& b) {
  if (a == b) return Branch::del_del_identical;
  const Rel rel = classify(a, b);
  switch (rel.coarse()) {
    case Coarse::separate_left:
      return Branch::del_del_first_left;
    case Coarse::separate_right:
      return Branch::del_del_first_right;
    case Coarse::same_start:
      return a.len < b.len ? Branch::del_del_same_start_shorter_first : Branch::del_del_same_start_longer_first;
    case Coarse::overlap_left:
      return rel.end_cmp == Cmp::lt ? Branch::del_del_overlap_left : Branch::del_del_first_contains;
    case Coarse::overlap_right:
      return rel.end_cmp == Cmp::gt ? Branch::del_del_overlap_right : Branch::del_del_second_contains;
  }
  return Branch::del_del_identical;
}

TransformPair mirrored(TransformPair p) { return {std::move(p.first_after_second), std::move(p.second_after_first)}; }

SeqTransformPair transform_span(std::span<const Diff> a, std::span<const Diff> b, const XformOptions& opts);

DiffSeq to_seq(std::span<const Diff> s) { return DiffSeq(s.begin(), s.end()); }

std::size_t split_point(std::size_t len, SplitStrategy strategy) {
  return strategy == SplitStrategy::midpoint ? len / 2 : 1;
}

void append(DiffSeq& into, DiffSeq&& from) {
  into.insert(into.end(), std::make_move_iterator(from.begin()), std::make_move_iterator(from.end()));
}

SeqTransformPair transform_span(std::span<const Diff> a, std::span<const Diff> b, const XformOptions& opts) {
  if (a.empty()) return {to_seq(b), {}};
  if (b.empty()) return {{}, to_seq(a)};
  if (a.size() == 1 && b.size() == 1) {
    TransformPair p = transform_single(a[0], b[0], opts);
    return {std::move(p.second_after_first), std::move(p.first_after_second)};
  }
  if (a.size() >= b.size()) {
    const std::size_t cut = split_point(a.size(), opts.split);
    SeqTransformPair head = transform_span(a.first(cut), b, opts);
    SeqTransformPair tail = transform_span(a.subspan(cut), head.b_after_a, opts);
    append(head.a_after_b, std::move(tail.a_after_b));
    return {std::move(tail.b_after_a), std::move(head.a_after_b)};
  }
  const std::size_t cut = split_point(b.size(), opts.split);
  SeqTransformPair head = transform_span(a, b.first(cut), opts);
  SeqTransformPair tail = transform_span(head.a_after_b, b.subspan(cut), opts);
  append(head.b_after_a, std::move(tail.b_after_a));
  return {std::move(head.b_after_a), std::move(tail.a_after_b)};
}

}  // namespace

std::string_view branch_name(Branch b) {
  switch (b) {
    case Branch::ins_ins_identical: return "ins_ins_identical";
    case Branch::ins_ins_tie_break: return "ins_ins_tie_break";
    case Branch::ins_ins_first_left: return "ins_ins_first_left";
    case Branch::ins_ins_first_right: return "ins_ins_first_right";
    case Branch::ins_del_at_or_before: return "ins_del_at_or_before";
    case Branch::ins_del_after: return "ins_del_after";
    case Branch::ins_del_split: return "ins_del_split";
    case Branch::del_ins_before: return "del_ins_before";
    case Branch::del_ins_at_or_after: return "del_ins_at_or_after";
    case Branch::del_ins_split: return "del_ins_split";
    case Branch::del_del_identical: return "del_del_identical";
    case Branch::del_del_first_left: return "del_del_first_left";
    case Branch::del_del_first_right: return "del_del_first_right";
    case Branch::del_del_overlap_left: return "del_del_overlap_left";
    case Branch::del_del_overlap_right: return "del_del_overlap_right";
    case Branch::del_del_same_start_shorter_first: return "del_del_same_start_shorter_first";
    case Branch::del_del_same_start_longer_first: return "del_del_same_start_longer_first";
    case Branch::del_del_first_contains: return "del_del_first_contains";
    case Branch::del_del_second_contains: return "del_del_second_contains";
    case Branch::with_empty: return "with_empty";
  }
  return "unknown";
}

std::size_t BranchTally::table_branches_covered() const {
  return static_cast<std::size_t>(
      std::count_if(hits.begin(), hits.begin() + kTableBranchCount, [](std::uint64_t n) { return n > 0; }));
}

void BranchTally::merge(const BranchTally& other) {
  for (std::size_t i = 0; i < kBranchCount; ++i) hits[i] += other.hits[i];
}

Branch branch_of(const Diff& first, const Diff& second) {
  if (is_empty(first) || is_empty(second)) return Branch::with_empty;
  if (const auto* a = std::get_if<Insert>(&first)) {
    if (const auto* b = std::get_if<Insert>(&second)) return classify_insert_insert(*a, *b);
    return classify_insert_delete(*a, std::get<Delete>(second));
  }
  const auto& a = std::get<Delete>(first);
  if (const auto* b = std::get_if<Insert>(&second)) return classify_delete_insert(a, *b);
  return classify_delete_delete(a, std::get<Delete>(second));
}

TransformPair transform_single(const Diff& first, const Diff& second, const XformOptions& opts) {
  const Branch br = branch_of(first, second);
  if (opts.tally) opts.tally->record(br);
  if (opts.single_calls) ++*opts.single_calls;

  if (br == Branch::with_empty) {
    DiffSeq s = is_empty(second) ? DiffSeq{} : DiffSeq{second};
    DiffSeq f = is_empty(first) ? DiffSeq{} : DiffSeq{first};
    return {std::move(s), std::move(f)};
  }
  if (const auto* a = std::get_if<Insert>(&first)) {
    if (const auto* b = std::get_if<Insert>(&second)) return insert_insert(*a, *b, br);
    return insert_delete(*a, std::get<Delete>(second), br);
  }
  const auto& a = std::get<Delete>(first);
  if (const auto* b = std::get_if<Insert>(&second)) {
    // Mirror of insert/delete: same table with the roles swapped.
    const Branch mirror = br == Branch::del_ins_before     ? Branch::ins_del_after
                          : br == Branch::del_ins_at_or_after ? Branch::ins_del_at_or_before
                                                              : Branch::ins_del_split;
    return mirrored(insert_delete(*b, a, mirror));
  }
  return delete_delete(a, std::get<Delete>(second), br, opts.equal_deletes);
}

SeqTransformPair transform_seq(const DiffSeq& a, const DiffSeq& b, const XformOptions& opts) {
  return transform_span(a, b, opts);
}

DiffSeq normalize(const DiffSeq& seq) {
  DiffSeq out;
  out.reserve(seq.size());
  std::copy_if(seq.begin(), seq.end(), std::back_inserter(out), [](const Diff& d) { return !is_empty(d); });
  return out;
}

}  // namespace otm
