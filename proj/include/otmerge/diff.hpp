#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "otmerge/utf8.hpp"

namespace otm {

using Doc = Text;

// Inserts `text` before index `pos`. `text` is never empty.
struct Insert {
  std::size_t pos = 0;
  Text text;

  friend bool operator==(const Insert&, const Insert&) = default;
};

// Removes indices [pos, pos + len). `len` is at least one.
struct Delete {
  std::size_t pos = 0;
  std::size_t len = 1;

  friend bool operator==(const Delete&, const Delete&) = default;
};

// Placeholder that applies as the identity. Sequences may carry these; see
// normalize().
struct Empty {
  friend bool operator==(const Empty&, const Empty&) = default;
};

using Diff = std::variant<Insert, Delete, Empty>;

// Diffs applied left to right, each in the coordinates of the document
// produced by everything before it. The empty sequence is the identity.
using DiffSeq = std::vector<Diff>;

// Raised when a diff does not fit the document it is applied to.
class ApplyError : public std::runtime_error {
 public:
  ApplyError(const Diff& diff, std::size_t doc_len, std::size_t index_in_seq);

  std::size_t doc_len() const { return doc_len_; }
  // Zero for a single application.
  std::size_t index() const { return index_; }
  const Diff& diff() const { return diff_; }

 private:
  Diff diff_;
  std::size_t doc_len_;
  std::size_t index_;
};

// Raised when an algebraic helper is called outside its domain. Reaching one
// from the transform table is a bug in the table.
class DomainError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Validating constructors. Throw std::invalid_argument on empty text / zero
// length.
Insert make_insert(std::size_t pos, Text text);
Insert make_insert(std::size_t pos, std::string_view utf8);
Delete make_delete(std::size_t pos, std::size_t len);

bool is_applicable(const Doc& doc, const Diff& diff);
Doc apply(const Doc& doc, const Diff& diff);
// Throws ApplyError carrying the index of the failing diff.
Doc apply_seq(Doc doc, const DiffSeq& seq);

struct Endpoints {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive

  friend bool operator==(const Endpoints&, const Endpoints&) = default;
};

// First and last index touched: an insert covers the span its text will
// occupy, a delete the span it removes. Empty has no extent.
Endpoints endpoints(const Insert& diff);
Endpoints endpoints(const Delete& diff);
Endpoints endpoints(const Diff& diff);

enum class Cmp { lt, eq, gt };

// Coarse relation of the first diff to the second. Exactly one holds; a
// shared start is checked first.
enum class Coarse {
  separate_left,   // first ends before second starts
  overlap_left,    // first starts earlier and reaches into second
  same_start,
  overlap_right,   // first starts later but no later than second's end
  separate_right,  // first starts after second ends
};

struct Rel {
  Cmp start_cmp = Cmp::eq;
  Cmp end_cmp = Cmp::eq;
  bool overlap = false;

  Coarse coarse() const;
  friend bool operator==(const Rel&, const Rel&) = default;
};

Rel classify(const Diff& a, const Diff& b);

// Shifts `target` to account for `by` having been applied at or before its
// position: +|text| for an insert, -len for a delete.
Diff lift(const Diff& target, const Diff& by);
Insert lift(const Insert& target, const Diff& by);
Delete lift(const Delete& target, const Diff& by);

// The part of `outer` lying to the right of `inner`. Requires
// inner.start <= outer.start <= inner.end < outer.end.
Delete subtract(const Delete& outer, const Delete& inner);

// Splits `target` at an index strictly inside it. Both halves are in the
// original document's coordinates.
std::pair<Delete, Delete> split_delete(const Delete& target, std::size_t at);

bool is_empty(const Diff& diff);

std::string to_string(const Diff& diff);
std::string to_string(const DiffSeq& seq);

}  // namespace otm
