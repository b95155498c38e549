#pragma once

#include <string>
#include <string_view>

namespace otm {

// Documents are sequences of Unicode scalar values; every index in a diff
// counts scalar values, never bytes.
using Text = std::u32string;

// Throws std::invalid_argument on malformed UTF-8 (overlongs, surrogates,
// truncated sequences).
Text from_utf8(std::string_view bytes);
std::string to_utf8(std::u32string_view text);

}  // namespace otm
