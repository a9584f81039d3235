#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace opseq {

using OpcodeCounts = std::map<std::string, std::uint64_t, std::less<>>;

struct VocabEntry {
  std::string mnemonic;
  std::uint64_t count = 0;
};

// Ranked opcode -> id mapping. PAD = 0, ranks 1..K by descending count
// (ties lexicographic), OTHER = K + 1 for everything else.
class OpcodeVocab {
 public:
  static constexpr std::int32_t kPad = 0;

  explicit OpcodeVocab(std::vector<VocabEntry> ranked);

  std::size_t top_k() const { return entries_.size(); }
  std::size_t size() const { return entries_.size() + 2; }
  std::int32_t other_id() const { return static_cast<std::int32_t>(entries_.size() + 1); }

  std::int32_t id_of(std::string_view mnemonic) const;
  // "<pad>" and "<other>" for the sentinels.
  std::string mnemonic_of(std::int32_t id) const;
  const std::vector<VocabEntry>& entries() const { return entries_; }

  // Lines "rank<TAB>mnemonic<TAB>count" in rank order.
  std::string to_text() const;
  static OpcodeVocab from_text(std::string_view text);

 private:
  std::vector<VocabEntry> entries_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

OpcodeCounts count_opcodes(const std::vector<std::vector<std::string>>& sequences);
OpcodeVocab vocab_from_counts(const OpcodeCounts& counts, std::size_t top_k = 30);
OpcodeVocab build_vocab(const std::vector<std::vector<std::string>>& sequences, std::size_t top_k = 30);

// Unknown mnemonics map to OTHER; the first L ids are kept; short sequences
// are padded with PAD at the end.
std::vector<std::int32_t> encode(std::span<const std::string> sequence, const OpcodeVocab& vocab,
                                 std::size_t length = 2000);
// Inverse of encode for in-vocabulary symbols; PAD entries are dropped.
std::vector<std::string> decode(std::span<const std::int32_t> ids, const OpcodeVocab& vocab);

}  // namespace opseq
