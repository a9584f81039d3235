#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "opseq/ndcore/tensor.hpp"

namespace opseq {

enum class Separation { easy, hard };

std::string_view separation_name(Separation s);
Separation parse_separation(std::string_view name);

struct SynthConfig {
  std::size_t families = 5;
  std::size_t per_family = 100;
  std::size_t mean_len = 200;
  std::size_t opcodes = 50;       // alphabet size
  std::size_t core_opcodes = 30;  // symbols the Markov chains move between
  double rare_rate = 0.04;        // chance a body token is a uniform pick from the rare tail
  Separation separation = Separation::easy;
  std::uint64_t seed = 7;

  // Hard mode only.
  std::size_t marker_len = 4;
  double marker_noise = 0.3;  // chance a marker is borrowed from another family
  std::size_t motif_len = 3;
  double motif_rate = 0.04;   // chance per body position to emit one of the family's motifs

  void validate() const;
};

struct SynthFamily {
  std::string name;
  Tensor transitions;  // core x core, rows sum to 1
  std::vector<double> initial;
  std::vector<std::size_t> start_marker;
  std::vector<std::size_t> end_marker;
  std::vector<std::vector<std::size_t>> motifs;
};

struct SynthSample {
  std::size_t family = 0;
  std::vector<std::string> opcodes;
};

struct SynthCorpus {
  SynthConfig config;
  std::vector<std::string> alphabet;  // core symbols first, rare tail after
  std::vector<SynthFamily> families;
  std::vector<SynthSample> samples;
};

SynthCorpus synth_corpus(const SynthConfig& config);

// Mean over rows of the total-variation distance between two transition matrices.
double transition_distance(const Tensor& a, const Tensor& b);

// root/<family>/sample_NNNN.txt (one mnemonic per line) plus root/manifest.txt.
// The tree is assembled in a temporary sibling and renamed into place.
void write_corpus_dir(const SynthCorpus& corpus, const std::filesystem::path& root);
std::string manifest_text(const SynthCorpus& corpus);

}  // namespace opseq
