#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "opseq/corpus/vocab.hpp"

namespace opseq {

struct SampleRecord {
  std::size_t family = 0;  // index into the owning dataset's family list
  std::vector<std::int32_t> ids;
};

// Fixed-length encoded corpus. Text layout:
//   opseq-data v1
//   L=<length>
//   K=<top_k>
//   pad_side=post
//   truncate=prefix
//   families=<name>,<name>,...
//   records=<count>
//   then one "<family_index>\t<id>,<id>,..." line per record.
struct EncodedDataset {
  std::size_t seq_len = 2000;
  std::size_t top_k = 30;
  std::vector<std::string> families;
  std::vector<SampleRecord> records;

  std::size_t vocab_size() const { return top_k + 2; }
  std::vector<std::size_t> family_counts() const;
  void validate() const;

  // Keeps only the named families, relabelled in the given order.
  EncodedDataset subset(const std::vector<std::string>& names) const;
  // Re-fits every record to a new length with the same prefix/post-pad rule.
  EncodedDataset with_length(std::size_t length) const;

  std::string to_text() const;
  static EncodedDataset from_text(std::string_view text);
};

struct CorpusSample {
  std::string family;
  std::filesystem::path path;
  std::vector<std::string> opcodes;
};

struct CorpusScan {
  std::vector<std::string> families;          // sorted subdirectory names
  std::vector<CorpusSample> samples;          // family order, then file-name order
  std::vector<std::string> skipped;           // files that yielded no opcodes
};

// Reads root/<family>/<sample files>. Parsing fans out over `jobs` threads;
// the result order never depends on the job count.
CorpusScan read_corpus_dir(const std::filesystem::path& root, std::size_t jobs = 1);

EncodedDataset encode_corpus(const CorpusScan& scan, const OpcodeVocab& vocab, std::size_t length);

// Stratified shuffle-split: per family, round(test_frac * n) samples go to
// test (clamped to [1, n - 1]).
struct SplitDataset {
  std::vector<SampleRecord> train;
  std::vector<SampleRecord> test;
  std::uint64_t seed = 0;
};

SplitDataset split(const std::vector<SampleRecord>& records, double test_frac, std::uint64_t seed);

}  // namespace opseq
