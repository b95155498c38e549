#include "otmerge/diff.hpp"

#include <sstream>

#include "overloaded.hpp"

namespace otm {

namespace {

using detail::overloaded;

std::string describe_apply_failure(const Diff& diff, std::size_t doc_len, std::size_t index) {
  std::ostringstream out;
  out << "diff #" << index << " " << to_string(diff) << " does not apply to a document of length "
      << doc_len;
  return out.str();
}

Cmp compare(std::size_t a, std::size_t b) {
  if (a < b) return Cmp::lt;
  if (a > b) return Cmp::gt;
  return Cmp::eq;
}

std::size_t shifted(std::size_t pos, const Diff& by) {
  return std::visit(overloaded{
                        [&](const Insert& ins) { return pos + ins.text.size(); },
                        [&](const Delete& del) {
                          if (del.len > pos) {
                            throw DomainError("lift by " + to_string(by) + " moves position " +
                                              std::to_string(pos) + " below zero");
                          }
                          return pos - del.len;
                        },
                        [&](const Empty&) { return pos; },
                    },
                    by);
}

}  // namespace

ApplyError::ApplyError(const Diff& diff, std::size_t doc_len, std::size_t index_in_seq)
    : std::runtime_error(describe_apply_failure(diff, doc_len, index_in_seq)),
      diff_(diff),
      doc_len_(doc_len),
      index_(index_in_seq) {}

Insert make_insert(std::size_t pos, Text text) {
  if (text.empty()) throw std::invalid_argument("insert text must be non-empty");
  return Insert{pos, std::move(text)};
}

Insert make_insert(std::size_t pos, std::string_view utf8) { return make_insert(pos, from_utf8(utf8)); }

Delete make_delete(std::size_t pos, std::size_t len) {
  if (len == 0) throw std::invalid_argument("delete length must be positive");
  return Delete{pos, len};
}

bool is_applicable(const Doc& doc, const Diff& diff) {
  return std::visit(overloaded{
                        [&](const Insert& ins) { return !ins.text.empty() && ins.pos <= doc.size(); },
                        [&](const Delete& del) {
                          return del.len > 0 && del.pos <= doc.size() && del.len <= doc.size() - del.pos;
                        },
                        [](const Empty&) { return true; },
                    },
                    diff);
}

Doc apply(const Doc& doc, const Diff& diff) {
  if (!is_applicable(doc, diff)) throw ApplyError(diff, doc.size(), 0);
  return std::visit(overloaded{
                        [&](const Insert& ins) {
                          Doc out;
                          out.reserve(doc.size() + ins.text.size());
                          out.append(doc, 0, ins.pos);
                          out.append(ins.text);
                          out.append(doc, ins.pos);
                          return out;
                        },
                        [&](const Delete& del) {
                          Doc out;
                          out.reserve(doc.size() - del.len);
                          out.append(doc, 0, del.pos);
                          out.append(doc, del.pos + del.len);
                          return out;
                        },
                        [&](const Empty&) { return doc; },
                    },
                    diff);
}

Doc apply_seq(Doc doc, const DiffSeq& seq) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!is_applicable(doc, seq[i])) throw ApplyError(seq[i], doc.size(), i);
    doc = apply(doc, seq[i]);
  }
  return doc;
}

Endpoints endpoints(const Insert& diff) { return {diff.pos, diff.pos + diff.text.size() - 1}; }

Endpoints endpoints(const Delete& diff) { return {diff.pos, diff.pos + diff.len - 1}; }

Endpoints endpoints(const Diff& diff) {
  return std::visit(overloaded{
                        [](const Insert& ins) { return endpoints(ins); },
                        [](const Delete& del) { return endpoints(del); },
                        [](const Empty&) -> Endpoints { throw DomainError("the empty diff has no endpoints"); },
                    },
                    diff);
}

Coarse Rel::coarse() const {
  if (start_cmp == Cmp::eq) return Coarse::same_start;
  if (!overlap) return start_cmp == Cmp::lt ? Coarse::separate_left : Coarse::separate_right;
  return start_cmp == Cmp::lt ? Coarse::overlap_left : Coarse::overlap_right;
}

Rel classify(const Diff& a, const Diff& b) {
  const Endpoints ea = endpoints(a);
  const Endpoints eb = endpoints(b);
  return Rel{compare(ea.start, eb.start), compare(ea.end, eb.end), ea.start <= eb.end && ea.end >= eb.start};
}

Insert lift(const Insert& target, const Diff& by) { return Insert{shifted(target.pos, by), target.text}; }

Delete lift(const Delete& target, const Diff& by) { return Delete{shifted(target.pos, by), target.len}; }

Diff lift(const Diff& target, const Diff& by) {
  return std::visit(overloaded{
                        [&](const Insert& ins) -> Diff { return lift(ins, by); },
                        [&](const Delete& del) -> Diff { return lift(del, by); },
                        [](const Empty&) -> Diff { return Empty{}; },
                    },
                    target);
}

Delete subtract(const Delete& outer, const Delete& inner) {
  const Endpoints eo = endpoints(outer);
  const Endpoints ei = endpoints(inner);
  if (!(ei.start <= eo.start && eo.start <= ei.end && ei.end < eo.end)) {
    throw DomainError("subtract " + to_string(inner) + " from " + to_string(outer) +
                      ": inner must overlap the left end of outer and stop short of its right end");
  }
  return Delete{ei.end + 1, eo.end - ei.end};
}

std::pair<Delete, Delete> split_delete(const Delete& target, std::size_t at) {
  if (!(target.pos < at && at < target.pos + target.len)) {
    throw DomainError("cannot split " + to_string(target) + " at " + std::to_string(at));
  }
  const std::size_t left_len = at - target.pos;
  return {Delete{target.pos, left_len}, Delete{at, target.len - left_len}};
}

bool is_empty(const Diff& diff) { return std::holds_alternative<Empty>(diff); }

std::string to_string(const Diff& diff) {
  return std::visit(overloaded{
                        [](const Insert& ins) {
                          return "i(" + std::to_string(ins.pos) + ",\"" + to_utf8(ins.text) + "\")";
                        },
                        [](const Delete& del) {
                          return "d(" + std::to_string(del.pos) + "," + std::to_string(del.len) + ")";
                        },
                        [](const Empty&) { return std::string("e()"); },
                    },
                    diff);
}

std::string to_string(const DiffSeq& seq) {
  std::string out = "[";
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ", ";
    out += to_string(seq[i]);
  }
  return out + "]";
}

}  // namespace otm
