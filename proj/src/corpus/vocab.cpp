#include "opseq/corpus/vocab.hpp"

#include <algorithm>
#include <sstream>

#include "opseq/error.hpp"
#include "opseq/io.hpp"

namespace opseq {

namespace {

bool ranks_before(const VocabEntry& a, const VocabEntry& b) {
  if (a.count != b.count) return a.count > b.count;
  return a.mnemonic < b.mnemonic;
}

}  // namespace

OpcodeVocab::OpcodeVocab(std::vector<VocabEntry> ranked) : entries_(std::move(ranked)) {
  if (entries_.empty()) throw VocabError("vocabulary needs at least one opcode");
  for (std::size_t r = 0; r < entries_.size(); ++r) {
    const auto& e = entries_[r];
    if (e.mnemonic.empty()) throw VocabError("empty mnemonic at rank " + std::to_string(r + 1));
    if (r > 0 && !ranks_before(entries_[r - 1], e)) {
      throw VocabError("vocabulary not in rank order at '" + e.mnemonic + "'");
    }
    ids_.emplace(e.mnemonic, static_cast<std::int32_t>(r + 1));
  }
}

std::int32_t OpcodeVocab::id_of(std::string_view mnemonic) const {
  auto it = ids_.find(std::string(mnemonic));
  return it == ids_.end() ? other_id() : it->second;
}

std::string OpcodeVocab::mnemonic_of(std::int32_t id) const {
  if (id == kPad) return "<pad>";
  if (id == other_id()) return "<other>";
  if (id < 0 || id > other_id()) throw VocabError("token id " + std::to_string(id) + " outside vocabulary");
  return entries_[static_cast<std::size_t>(id - 1)].mnemonic;
}

std::string OpcodeVocab::to_text() const {
  std::ostringstream out;
  for (std::size_t r = 0; r < entries_.size(); ++r) {
    out << (r + 1) << '\t' << entries_[r].mnemonic << '\t' << entries_[r].count << '\n';
  }
  return out.str();
}

OpcodeVocab OpcodeVocab::from_text(std::string_view text) {
  std::vector<VocabEntry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw FormatError("vocab line " + std::to_string(line_no) + ": expected rank<TAB>mnemonic<TAB>count");
    }
    std::size_t rank = 0;
    VocabEntry e;
    try {
      rank = parse_size(line.substr(0, t1), "rank");
      e.count = parse_u64(line.substr(t2 + 1), "count");
    } catch (const ConfigError& err) {
      throw FormatError("vocab line " + std::to_string(line_no) + ": " + err.what());
    }
    e.mnemonic = line.substr(t1 + 1, t2 - t1 - 1);
    if (rank != entries.size() + 1) {
      throw FormatError("vocab line " + std::to_string(line_no) + ": rank " + std::to_string(rank) + " out of sequence");
    }
    entries.push_back(std::move(e));
  }
  try {
    return OpcodeVocab(std::move(entries));
  } catch (const VocabError& err) {
    throw FormatError(std::string("malformed vocab: ") + err.what());
  }
}

OpcodeCounts count_opcodes(const std::vector<std::vector<std::string>>& sequences) {
  OpcodeCounts counts;
  for (const auto& seq : sequences) {
    for (const auto& op : seq) ++counts[op];
  }
  return counts;
}

OpcodeVocab vocab_from_counts(const OpcodeCounts& counts, std::size_t top_k) {
  if (top_k < 1) throw ConfigError("K must be at least 1");
  if (counts.empty()) throw EmptyInputError("cannot build a vocabulary from an empty corpus");
  std::vector<VocabEntry> all;
  all.reserve(counts.size());
  for (const auto& [m, c] : counts) all.push_back({m, c});
  std::stable_sort(all.begin(), all.end(), ranks_before);
  if (all.size() > top_k) all.resize(top_k);
  return OpcodeVocab(std::move(all));
}

OpcodeVocab build_vocab(const std::vector<std::vector<std::string>>& sequences, std::size_t top_k) {
  if (top_k < 1) throw ConfigError("K must be at least 1");
  return vocab_from_counts(count_opcodes(sequences), top_k);
}

std::vector<std::int32_t> encode(std::span<const std::string> sequence, const OpcodeVocab& vocab,
                                 std::size_t length) {
  std::vector<std::int32_t> ids(length, OpcodeVocab::kPad);
  const std::size_t n = std::min(length, sequence.size());
  for (std::size_t i = 0; i < n; ++i) ids[i] = vocab.id_of(sequence[i]);
  return ids;
}

std::vector<std::string> decode(std::span<const std::int32_t> ids, const OpcodeVocab& vocab) {
  std::vector<std::string> out;
  for (auto id : ids) {
    if (id != OpcodeVocab::kPad) out.push_back(vocab.mnemonic_of(id));
  }
  return out;
}

}  // namespace opseq
