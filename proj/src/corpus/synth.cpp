#include "opseq/corpus/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "opseq/error.hpp"
#include "opseq/io.hpp"
#include "opseq/rng.hpp"

namespace opseq {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMnemonics[] = {
    "mov",   "push",  "call",  "pop",   "lea",   "add",   "cmp",   "jmp",   "test",  "jz",    "sub",
    "jnz",   "xor",   "and",   "retn",  "inc",   "or",    "movzx", "dec",   "shl",   "shr",   "imul",
    "nop",   "leave", "jb",    "ja",    "jl",    "jg",    "sar",   "not",   "neg",   "sbb",   "adc",
    "xchg",  "cdq",   "idiv",  "div",   "mul",   "rol",   "ror",   "stosd", "movsd", "rep",   "setz",
    "setnz", "cmovz", "bt",    "bswap", "fld",   "fstp",  "fild",  "fmul",  "fadd",  "fxch",  "lodsb",
    "scasb", "cld",   "std",   "int3",  "hlt",   "in",    "out",   "pushf", "popf",
};

std::vector<std::string> make_alphabet(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < std::size(kMnemonics)) out.emplace_back(kMnemonics[i]);
    else out.push_back("op" + std::to_string(i));
  }
  return out;
}

std::size_t sample_categorical(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

// Row-stochastic matrix: `mix` of uniform plus a peaked part on a few targets.
Tensor random_transitions(std::size_t n, double mix, Rng& rng) {
  constexpr std::size_t kPeaks = 3;
  Tensor t({n, n});
  std::vector<std::size_t> targets(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) targets[i] = i;
    rng.shuffle(std::span<std::size_t>(targets));
    double weights[kPeaks];
    double total = 0.0;
    for (auto& w : weights) total += (w = rng.uniform(0.5, 1.0));
    for (std::size_t c = 0; c < n; ++c) t(r, c) = mix / static_cast<double>(n);
    for (std::size_t k = 0; k < std::min(kPeaks, n); ++k) t(r, targets[k]) += (1.0 - mix) * weights[k] / total;
  }
  return t;
}

std::vector<std::size_t> random_symbols(std::size_t len, std::size_t n, Rng& rng) {
  std::vector<std::size_t> s(len);
  for (auto& v : s) v = static_cast<std::size_t>(rng.below(n));
  return s;
}

std::string family_name(std::size_t f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "family_%02zu", f);
  return buf;
}

}  // namespace

std::string_view separation_name(Separation s) { return s == Separation::easy ? "easy" : "hard"; }

Separation parse_separation(std::string_view name) {
  if (name == "easy") return Separation::easy;
  if (name == "hard") return Separation::hard;
  throw ConfigError("separation must be 'easy' or 'hard', got '" + std::string(name) + "'");
}

void SynthConfig::validate() const {
  if (families < 2) throw ConfigError("synthetic corpus needs at least 2 families");
  if (per_family < 1) throw ConfigError("per_family must be positive");
  if (mean_len < 4) throw ConfigError("mean_len must be at least 4");
  if (core_opcodes < 2 || core_opcodes > opcodes) throw ConfigError("core_opcodes must lie in [2, opcodes]");
  if (!(rare_rate >= 0.0 && rare_rate < 1.0)) throw ConfigError("rare_rate must lie in [0, 1)");
  if (separation == Separation::hard) {
    if (marker_len < 1 || motif_len < 1) throw ConfigError("marker_len and motif_len must be positive");
    if (!(marker_noise >= 0.0 && marker_noise <= 1.0)) throw ConfigError("marker_noise must lie in [0, 1]");
    if (!(motif_rate >= 0.0 && motif_rate < 1.0)) throw ConfigError("motif_rate must lie in [0, 1)");
  }
}

double transition_distance(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape() || a.rank() != 2) {
    throw DimensionError("transition matrices differ in shape: " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
  double total = 0.0;
  for (std::size_t r = 0; r < a.dim(0); ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < a.dim(1); ++c) row += std::abs(a(r, c) - b(r, c));
    total += 0.5 * row;
  }
  return total / static_cast<double>(a.dim(0));
}

SynthCorpus synth_corpus(const SynthConfig& config) {
  config.validate();
  SynthCorpus corpus;
  corpus.config = config;
  corpus.alphabet = make_alphabet(config.opcodes);
  const std::size_t core = config.core_opcodes;
  const std::size_t rare = config.opcodes - core;
  const bool hard = config.separation == Separation::hard;

  // Family structure comes from `seed`, sample draws from `seed + 1`.
  Rng structure(config.seed);
  const std::vector<double> uniform_initial(core, 1.0 / static_cast<double>(core));

  Tensor shared;
  std::vector<std::vector<std::size_t>> motif_pool;
  std::vector<std::pair<std::size_t, std::size_t>> motif_pairs;
  if (hard) {
    shared = random_transitions(core, 0.3, structure);
    // Each family owns a distinct pair of motifs drawn from a small shared pool,
    // so no single motif identifies a family.
    std::size_t pool = 2;
    while (pool * (pool - 1) / 2 < config.families) ++pool;
    for (std::size_t m = 0; m < pool; ++m) motif_pool.push_back(random_symbols(config.motif_len, core, structure));
    for (std::size_t a = 0; a < pool; ++a)
      for (std::size_t b = a + 1; b < pool; ++b) motif_pairs.emplace_back(a, b);
  }

  for (std::size_t f = 0; f < config.families; ++f) {
    SynthFamily fam;
    fam.name = family_name(f);
    fam.initial = uniform_initial;
    if (hard) {
      fam.transitions = shared;
      fam.start_marker = random_symbols(config.marker_len, core, structure);
      fam.end_marker = random_symbols(config.marker_len, core, structure);
      fam.motifs = {motif_pool[motif_pairs[f].first], motif_pool[motif_pairs[f].second]};
    } else {
      fam.transitions = random_transitions(core, 0.3, structure);
    }
    corpus.families.push_back(std::move(fam));
  }

  Rng draw(config.seed + 1);
  const auto lo = static_cast<std::size_t>(std::ceil(0.75 * static_cast<double>(config.mean_len)));
  const auto hi = static_cast<std::size_t>(std::floor(1.25 * static_cast<double>(config.mean_len)));

  for (std::size_t f = 0; f < config.families; ++f) {
    const SynthFamily& fam = corpus.families[f];
    for (std::size_t s = 0; s < config.per_family; ++s) {
      const std::size_t len = lo + static_cast<std::size_t>(draw.below(hi - lo + 1));
      std::vector<std::size_t> symbols;
      symbols.reserve(len);

      auto pick_marker = [&](bool start) -> const std::vector<std::size_t>& {
        const SynthFamily* owner = &fam;
        if (draw.bernoulli(config.marker_noise)) owner = &corpus.families[draw.below(config.families)];
        return start ? owner->start_marker : owner->end_marker;
      };

      std::size_t body_len = len;
      std::vector<std::size_t> tail;
      if (hard) {
        const auto& head = pick_marker(true);
        symbols.insert(symbols.end(), head.begin(), head.end());
        tail = pick_marker(false);
        body_len = len > head.size() + tail.size() ? len - head.size() - tail.size() : 0;
      }

      std::size_t state = sample_categorical(fam.initial, draw);
      std::size_t emitted = 0;
      while (emitted < body_len) {
        if (rare > 0 && draw.bernoulli(config.rare_rate)) {
          symbols.push_back(core + static_cast<std::size_t>(draw.below(rare)));
          ++emitted;
          continue;
        }
        if (hard && draw.bernoulli(config.motif_rate)) {
          const auto& motif = fam.motifs[draw.below(fam.motifs.size())];
          for (std::size_t k = 0; k < motif.size() && emitted < body_len; ++k, ++emitted) symbols.push_back(motif[k]);
          state = motif.back();
          continue;
        }
        state = sample_categorical(fam.transitions.row(state), draw);
        symbols.push_back(state);
        ++emitted;
      }
      symbols.insert(symbols.end(), tail.begin(), tail.end());

      SynthSample sample{f, {}};
      sample.opcodes.reserve(symbols.size());
      for (auto sym : symbols) sample.opcodes.push_back(corpus.alphabet[sym]);
      corpus.samples.push_back(std::move(sample));
    }
  }
  return corpus;
}

std::string manifest_text(const SynthCorpus& corpus) {
  const SynthConfig& c = corpus.config;
  std::ostringstream out;
  out << "opseq-synth v1\n";
  out << "generator=markov\n";
  out << "families=" << c.families << '\n';
  out << "per_family=" << c.per_family << '\n';
  out << "mean_len=" << c.mean_len << '\n';
  out << "opcodes=" << c.opcodes << '\n';
  out << "core_opcodes=" << c.core_opcodes << '\n';
  out << "rare_rate=" << format_double(c.rare_rate) << '\n';
  out << "separation=" << separation_name(c.separation) << '\n';
  out << "seed=" << c.seed << '\n';
  out << "transition_seed=" << c.seed << '\n';
  out << "sample_seed=" << c.seed + 1 << '\n';
  if (c.separation == Separation::hard) {
    out << "marker_len=" << c.marker_len << '\n';
    out << "marker_noise=" << format_double(c.marker_noise) << '\n';
    out << "motif_len=" << c.motif_len << '\n';
    out << "motif_rate=" << format_double(c.motif_rate) << '\n';
  }
  return out.str();
}

void write_corpus_dir(const SynthCorpus& corpus, const fs::path& root) {
  if (fs::exists(root)) {
    const fs::path manifest = root / "manifest.txt";
    const bool ours = fs::is_regular_file(manifest) && read_file(manifest).rfind("opseq-synth", 0) == 0;
    if (!ours && !(fs::is_directory(root) && fs::is_empty(root))) {
      throw InputError("refusing to overwrite " + root.string() + ": not a synthetic corpus directory");
    }
  }
  fs::path staging = root;
  staging += ".staging." + std::to_string(::getpid());
  fs::remove_all(staging);
  fs::create_directories(staging);

  std::vector<std::size_t> next(corpus.families.size(), 0);
  for (const auto& s : corpus.samples) {
    const fs::path dir = staging / corpus.families[s.family].name;
    fs::create_directories(dir);
    char name[32];
    std::snprintf(name, sizeof name, "sample_%04zu.txt", next[s.family]++);
    std::ofstream out(dir / name, std::ios::binary);
    for (const auto& op : s.opcodes) out << op << '\n';
    if (!out) throw RuntimeFailure("failed writing " + (dir / name).string());
  }
  {
    std::ofstream out(staging / "manifest.txt", std::ios::binary);
    out << manifest_text(corpus);
  }
  if (fs::exists(root)) fs::remove_all(root);
  if (root.has_parent_path()) fs::create_directories(root.parent_path());
  fs::rename(staging, root);
}

}  // namespace opseq
