#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "otmerge/diff.hpp"

namespace otm::wire {

// client -> server
struct Join {
  std::string client;
  friend bool operator==(const Join&, const Join&) = default;
};
struct Put {
  DiffSeq diffs;
  std::uint64_t seen = 0;
  friend bool operator==(const Put&, const Put&) = default;
};
struct Get {
  friend bool operator==(const Get&, const Get&) = default;
};

// server -> client
struct DocSnapshot {
  Text text;
  std::uint64_t serial = 0;
  friend bool operator==(const DocSnapshot&, const DocSnapshot&) = default;
};
struct Diffs {
  DiffSeq diffs;
  std::uint64_t serial = 0;
  friend bool operator==(const Diffs&, const Diffs&) = default;
};
struct Err {
  std::string msg;
  friend bool operator==(const Err&, const Err&) = default;
};

using Msg = std::variant<Join, Put, Get, DocSnapshot, Diffs, Err>;

// One JSON object per frame, "t" selects the kind. Throws otm::ParseError.
std::string encode(const Msg& msg);
Msg decode(std::string_view frame);

}  // namespace otm::wire
