#include "otmerge/codec.hpp"

#include "overloaded.hpp"

namespace otm {

using nlohmann::json;

namespace {

std::size_t read_index(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("diff is missing \"") + key + "\"");
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
    throw ParseError(std::string("\"") + key + "\" must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

}  // namespace

json diff_to_json(const Diff& diff) {
  return std::visit(detail::overloaded{
                        [](const Insert& ins) {
                          return json{{"op", "i"}, {"pos", ins.pos}, {"text", to_utf8(ins.text)}};
                        },
                        [](const Delete& del) { return json{{"op", "d"}, {"pos", del.pos}, {"len", del.len}}; },
                        [](const Empty&) { return json{{"op", "e"}}; },
                    },
                    diff);
}

json seq_to_json(const DiffSeq& seq) {
  json out = json::array();
  for (const auto& d : seq) out.push_back(diff_to_json(d));
  return out;
}

Diff diff_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("diff must be a JSON object");
  auto op = j.find("op");
  if (op == j.end() || !op->is_string()) throw ParseError("diff is missing string field \"op\"");
  const auto& kind = op->get_ref<const std::string&>();
  if (kind == "i") {
    auto text = j.find("text");
    if (text == j.end() || !text->is_string()) throw ParseError("insert is missing string field \"text\"");
    Text decoded;
    try {
      decoded = from_utf8(text->get_ref<const std::string&>());
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
    if (decoded.empty()) throw ParseError("insert text must be non-empty");
    return Insert{read_index(j, "pos"), std::move(decoded)};
  }
  if (kind == "d") {
    const std::size_t len = read_index(j, "len");
    if (len == 0) throw ParseError("delete length must be positive");
    return Delete{read_index(j, "pos"), len};
  }
  if (kind == "e") return Empty{};
  throw ParseError("unknown diff op \"" + kind + "\"");
}

DiffSeq seq_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("diff sequence must be a JSON array");
  DiffSeq out;
  out.reserve(j.size());
  for (const auto& item : j) out.push_back(diff_from_json(item));
  return out;
}

DiffSeq parse_seq(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  return seq_from_json(j);
}

std::string dump_seq(const DiffSeq& seq) { return seq_to_json(seq).dump(); }

}  // namespace otm
