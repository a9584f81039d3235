#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace opseq {

// Mnemonic on one line, if any. Accepts either a bare mnemonic or a listing
// line such as "401000: 8b ec   mov ebp, esp", where the first alphabetic
// token after the address and byte columns is taken. Result is lowercased.
std::optional<std::string> extract_mnemonic(std::string_view line);

// Mnemonic sequence of a whole file. Blank lines and lines starting with ';'
// or '#' are skipped. Throws EmptySampleError naming `source` when nothing
// was extracted.
std::vector<std::string> parse_disassembly(std::string_view text, std::string_view source = "<input>");

}  // namespace opseq
