#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "opseq/corpus/dataset.hpp"
#include "opseq/corpus/synth.hpp"
#include "opseq/corpus/vocab.hpp"
#include "opseq/error.hpp"
#include "opseq/io.hpp"

using namespace opseq;
namespace fs = std::filesystem;

namespace {

double tv_rows(const Tensor& a, const Tensor& b) {
  const std::size_t n = a.dim(0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(a(i, j) - b(i, j));
    total += 0.5 * row;
  }
  return total / static_cast<double>(n);
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
  return out;
}

}  // namespace

TEST_CASE("easy corpus layout and labels") {
  SynthConfig cfg;
  const SynthCorpus c = synth_corpus(cfg);
  REQUIRE(c.samples.size() == 500);
  std::vector<std::size_t> per(5, 0);
  for (const auto& s : c.samples) {
    ++per[s.family];
    CHECK(s.opcodes.size() >= 150);
    CHECK(s.opcodes.size() <= 250);
  }
  CHECK(per == std::vector<std::size_t>(5, 100));
  CHECK(c.alphabet.size() == 50);
  CHECK(c.families[3].name == "family_03");
  CHECK(std::set<std::string>(c.alphabet.begin(), c.alphabet.end()).size() == 50);
}

TEST_CASE("easy families are well separated Markov chains") {
  for (std::uint64_t seed : {1, 7, 99}) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.families = 8;
    cfg.per_family = 2;
    const SynthCorpus c = synth_corpus(cfg);
    for (const auto& f : c.families) {
      for (std::size_t i = 0; i < f.transitions.dim(0); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < f.transitions.dim(1); ++j) s += f.transitions(i, j);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
    for (std::size_t a = 0; a < c.families.size(); ++a)
      for (std::size_t b = a + 1; b < c.families.size(); ++b) {
        const double d = tv_rows(c.families[a].transitions, c.families[b].transitions);
        CHECK(d >= 0.2);
        CHECK(transition_distance(c.families[a].transitions, c.families[b].transitions) ==
              doctest::Approx(d).epsilon(1e-12));
      }
  }
}

TEST_CASE("hard families share dynamics and differ in markers and motifs") {
  SynthConfig cfg;
  cfg.separation = Separation::hard;
  cfg.families = 10;
  cfg.per_family = 3;
  const SynthCorpus c = synth_corpus(cfg);
  std::set<std::vector<std::size_t>> starts, ends;
  std::set<std::vector<std::vector<std::size_t>>> motif_sets;
  for (const auto& f : c.families) {
    CHECK(tv_rows(f.transitions, c.families[0].transitions) == 0.0);
    CHECK(f.start_marker.size() == cfg.marker_len);
    starts.insert(f.start_marker);
    ends.insert(f.end_marker);
    CHECK(f.motifs.size() == 2);
    auto m = f.motifs;
    std::sort(m.begin(), m.end());
    motif_sets.insert(m);
  }
  CHECK(starts.size() == 10);
  CHECK(ends.size() == 10);
  CHECK(motif_sets.size() == 10);
}

TEST_CASE("generation is seed deterministic") {
  SynthConfig cfg;
  cfg.per_family = 10;
  const SynthCorpus a = synth_corpus(cfg), b = synth_corpus(cfg);
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].opcodes == b.samples[i].opcodes);
  cfg.seed = 8;
  const SynthCorpus c = synth_corpus(cfg);
  CHECK_FALSE(a.samples[0].opcodes == c.samples[0].opcodes);
  CHECK(manifest_text(a) == manifest_text(b));
}

TEST_CASE("invalid generator settings") {
  SynthConfig cfg;
  cfg.families = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.core_opcodes = 60;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(parse_separation("medium"), ConfigError);
}

TEST_CASE("corpus directory writing") {
  const fs::path root = fs::temp_directory_path() / "opseq_synth_test";
  fs::remove_all(root);
  SynthConfig cfg;
  cfg.per_family = 4;
  cfg.separation = Separation::hard;
  const SynthCorpus c = synth_corpus(cfg);
  write_corpus_dir(c, root);
  const auto first = read_tree(root);
  CHECK(first.size() == 21);
  const std::string manifest = first.at("manifest.txt");
  CHECK(manifest.rfind("opseq-synth v1", 0) == 0);
  CHECK(manifest.find("separation=hard") != std::string::npos);
  CHECK(manifest.find("transition_seed=7") != std::string::npos);
  write_corpus_dir(c, root);
  CHECK(read_tree(root) == first);

  const CorpusScan scan = read_corpus_dir(root);
  CHECK(scan.samples.size() == 20);
  CHECK(scan.samples[5].opcodes == c.samples[5].opcodes);
  fs::remove_all(root);

  fs::create_directories(root);
  write_file_atomic(root / "keep.txt", "user data");
  CHECK_THROWS_AS(write_corpus_dir(c, root), InputError);
  CHECK(read_file(root / "keep.txt") == "user data");
  fs::remove_all(root);
}

TEST_CASE("encoded ids recount to the stored vocabulary counts") {
  SynthConfig cfg;
  cfg.per_family = 20;
  const SynthCorpus c = synth_corpus(cfg);
  std::vector<std::vector<std::string>> seqs;
  for (const auto& s : c.samples) seqs.push_back(s.opcodes);
  const OpcodeVocab v = build_vocab(seqs, 30);
  std::vector<std::uint64_t> recount(v.size(), 0);
  for (const auto& s : seqs)
    for (std::int32_t id : encode(s, v, 400)) ++recount[static_cast<std::size_t>(id)];
  for (std::size_t r = 0; r < v.top_k(); ++r) CHECK(recount[r + 1] == v.entries()[r].count);
}
