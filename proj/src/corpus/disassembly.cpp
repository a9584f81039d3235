#include "opseq/corpus/disassembly.hpp"

#include <cctype>

#include "opseq/error.hpp"

namespace opseq {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }
bool is_mnemonic_char(char c) { return is_alpha(c) || (c >= '0' && c <= '9') || c == '_' || c == '.'; }

bool all_hex(std::string_view t) {
  for (char c : t) {
    if (!is_hex(c)) return false;
  }
  return true;
}

// Address columns ("401000:", ".text:00401000"), byte columns ("8b", "ec")
// and long hex runs are never mnemonics.
bool is_column_token(std::string_view t) {
  if (t.find(':') != std::string_view::npos) return true;
  if (!is_alpha(t.front())) return true;
  if (t.size() == 2 && all_hex(t)) return true;
  if (t.size() >= 6 && all_hex(t)) return true;
  return false;
}

}  // namespace

std::optional<std::string> extract_mnemonic(std::string_view line) {
  std::size_t pos = 0;
  while (pos < line.size() && is_space(line[pos])) ++pos;
  if (pos == line.size() || line[pos] == ';' || line[pos] == '#') return std::nullopt;

  while (pos < line.size()) {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    if (pos == line.size()) break;
    if (line[pos] == ';' || line[pos] == '#') break;  // trailing comment
    std::size_t end = pos;
    while (end < line.size() && !is_space(line[end])) ++end;
    const std::string_view token = line.substr(pos, end - pos);
    pos = end;
    if (is_column_token(token)) continue;

    std::string mnemonic;
    for (char c : token) {
      if (!is_mnemonic_char(c)) break;
      mnemonic.push_back(lower(c));
    }
    if (!mnemonic.empty()) return mnemonic;
  }
  return std::nullopt;
}

std::vector<std::string> parse_disassembly(std::string_view text, std::string_view source) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    if (auto m = extract_mnemonic(text.substr(start, nl - start))) out.push_back(std::move(*m));
    start = nl + 1;
  }
  if (out.empty()) throw EmptySampleError("no opcodes extracted from " + std::string(source));
  return out;
}

}  // namespace opseq
