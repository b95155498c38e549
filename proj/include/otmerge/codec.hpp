#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "otmerge/diff.hpp"

namespace otm {

// Malformed JSON or a value that is not a well-formed diff.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical encoding: {"op":"i","pos":N,"text":S} and {"op":"d","pos":N,"len":L}.
// The identity placeholder is written {"op":"e"}.
nlohmann::json diff_to_json(const Diff& diff);
nlohmann::json seq_to_json(const DiffSeq& seq);

Diff diff_from_json(const nlohmann::json& j);
DiffSeq seq_from_json(const nlohmann::json& j);

DiffSeq parse_seq(std::string_view text);
std::string dump_seq(const DiffSeq& seq);

}  // namespace otm
