#include "otmerge/wire.hpp"

#include "json.hpp"
#include "otmerge/codec.hpp"
#include "overloaded.hpp"

namespace otm::wire {

using nlohmann::json;

namespace {

std::uint64_t read_serial(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_unsigned()) {
    throw ParseError(std::string("message needs a non-negative integer \"") + key + "\"");
  }
  return it->get<std::uint64_t>();
}

const std::string& read_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw ParseError(std::string("message needs a string \"") + key + "\"");
  return it->get_ref<const std::string&>();
}

}  // namespace

std::string encode(const Msg& msg) {
  json j = std::visit(
      detail::overloaded{
          [](const Join& m) { return json{{"t", "join"}, {"client", m.client}}; },
          [](const Put& m) { return json{{"t", "put"}, {"diffs", seq_to_json(m.diffs)}, {"seen", m.seen}}; },
          [](const Get&) { return json{{"t", "get"}}; },
          [](const DocSnapshot& m) { return json{{"t", "doc"}, {"text", to_utf8(m.text)}, {"serial", m.serial}}; },
          [](const Diffs& m) { return json{{"t", "diffs"}, {"diffs", seq_to_json(m.diffs)}, {"serial", m.serial}}; },
          [](const Err& m) { return json{{"t", "err"}, {"msg", m.msg}}; },
      },
      msg);
  return j.dump();
}

Msg decode(std::string_view frame) {
  json j;
  try {
    j = json::parse(frame);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!j.is_object()) throw ParseError("message must be a JSON object");
  const std::string& t = read_string(j, "t");
  if (t == "join") return Join{read_string(j, "client")};
  if (t == "put") {
    if (!j.contains("diffs")) throw ParseError("put needs \"diffs\"");
    return Put{seq_from_json(j.at("diffs")), read_serial(j, "seen")};
  }
  if (t == "get") return Get{};
  if (t == "doc") {
    try {
      return DocSnapshot{from_utf8(read_string(j, "text")), read_serial(j, "serial")};
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
  }
  if (t == "diffs") {
    if (!j.contains("diffs")) throw ParseError("diffs message needs \"diffs\"");
    return Diffs{seq_from_json(j.at("diffs")), read_serial(j, "serial")};
  }
  if (t == "err") return Err{read_string(j, "msg")};
  throw ParseError("unknown message type \"" + t + "\"");
}

}  // namespace otm::wire
