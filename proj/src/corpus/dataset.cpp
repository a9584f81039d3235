#include "opseq/corpus/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "opseq/corpus/disassembly.hpp"
#include "opseq/error.hpp"
#include "opseq/io.hpp"
#include "opseq/rng.hpp"

namespace opseq {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMagic = "opseq-data v1";

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto p = s.find(sep, start);
    parts.emplace_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return parts;
}

}  // namespace

std::vector<std::size_t> EncodedDataset::family_counts() const {
  std::vector<std::size_t> counts(families.size(), 0);
  for (const auto& r : records) ++counts.at(r.family);
  return counts;
}

void EncodedDataset::validate() const {
  if (seq_len == 0) throw FormatError("dataset length L must be positive");
  if (top_k == 0) throw FormatError("dataset K must be positive");
  const auto limit = static_cast<std::int32_t>(vocab_size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.family >= families.size()) throw FormatError("record " + std::to_string(i) + " has unknown family index");
    if (r.ids.size() != seq_len) throw FormatError("record " + std::to_string(i) + " has wrong length");
    for (auto id : r.ids) {
      if (id < 0 || id >= limit) {
        throw FormatError("record " + std::to_string(i) + " holds id " + std::to_string(id) + " outside [0, " +
                          std::to_string(limit) + ")");
      }
    }
  }
}

EncodedDataset EncodedDataset::subset(const std::vector<std::string>& names) const {
  std::map<std::size_t, std::size_t> remap;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = std::find(families.begin(), families.end(), names[i]);
    if (it == families.end()) throw ConfigError("family '" + names[i] + "' not present in dataset");
    remap[static_cast<std::size_t>(it - families.begin())] = i;
  }
  EncodedDataset out{seq_len, top_k, names, {}};
  for (const auto& r : records) {
    auto it = remap.find(r.family);
    if (it != remap.end()) out.records.push_back({it->second, r.ids});
  }
  return out;
}

EncodedDataset EncodedDataset::with_length(std::size_t length) const {
  if (length == 0) throw ConfigError("sequence length must be positive");
  EncodedDataset out{length, top_k, families, records};
  for (auto& r : out.records) r.ids.resize(length, OpcodeVocab::kPad);
  return out;
}

std::string EncodedDataset::to_text() const {
  std::ostringstream out;
  out << kMagic << '\n';
  out << "L=" << seq_len << '\n';
  out << "K=" << top_k << '\n';
  out << "pad_side=post\n";
  out << "truncate=prefix\n";
  out << "families=";
  for (std::size_t i = 0; i < families.size(); ++i) out << (i ? "," : "") << families[i];
  out << '\n';
  out << "records=" << records.size() << '\n';
  for (const auto& r : records) {
    out << r.family << '\t';
    for (std::size_t i = 0; i < r.ids.size(); ++i) out << (i ? "," : "") << r.ids[i];
    out << '\n';
  }
  return out.str();
}

EncodedDataset EncodedDataset::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw FormatError("not an opseq dataset (bad header)");

  EncodedDataset ds;
  std::size_t expected = 0;
  bool have_records = false;
  while (!have_records && std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("malformed dataset header line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "L") ds.seq_len = parse_size(value, key);
      else if (key == "K") ds.top_k = parse_size(value, key);
      else if (key == "pad_side") {
        if (value != "post") throw FormatError("unsupported pad_side '" + value + "'");
      } else if (key == "truncate") {
        if (value != "prefix") throw FormatError("unsupported truncate '" + value + "'");
      } else if (key == "families") {
        ds.families = value.empty() ? std::vector<std::string>{} : split_on(value, ',');
      } else if (key == "records") {
        expected = parse_size(value, key);
        have_records = true;
      } else {
        throw FormatError("unknown dataset header key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw FormatError(e.what());
    }
  }
  if (!have_records) throw FormatError("dataset header lacks records=");

  ds.records.reserve(expected);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError("malformed record line " + std::to_string(ds.records.size()));
    SampleRecord r;
    try {
      r.family = parse_size(std::string_view(line).substr(0, tab), "family index");
      for (const auto& tok : split_on(std::string_view(line).substr(tab + 1), ',')) {
        r.ids.push_back(static_cast<std::int32_t>(parse_size(tok, "token id")));
      }
    } catch (const ConfigError& e) {
      throw FormatError("record " + std::to_string(ds.records.size()) + ": " + e.what());
    }
    ds.records.push_back(std::move(r));
  }
  if (ds.records.size() != expected) {
    throw FormatError("dataset declares " + std::to_string(expected) + " records but holds " +
                      std::to_string(ds.records.size()));
  }
  ds.validate();
  return ds;
}

// ---------------------------------------------------------------------------

CorpusScan read_corpus_dir(const fs::path& root, std::size_t jobs) {
  if (!fs::is_directory(root)) throw InputError("corpus directory " + root.string() + " does not exist");

  CorpusScan scan;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && entry.path().filename().string().front() != '.') dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().filename().string().front() != '.') files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    scan.families.push_back(dir.filename().string());
    for (auto& f : files) scan.samples.push_back({dir.filename().string(), std::move(f), {}});
  }

  std::vector<char> empty(scan.samples.size(), 0);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < scan.samples.size(); i += stride) {
      auto& s = scan.samples[i];
      try {
        s.opcodes = parse_disassembly(read_file(s.path), s.path.string());
      } catch (const EmptySampleError&) {
        empty[i] = 1;
      }
    }
  };
  jobs = std::max<std::size_t>(1, jobs);
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
    for (auto& t : pool) t.join();
  }

  std::vector<CorpusSample> kept;
  for (std::size_t i = 0; i < scan.samples.size(); ++i) {
    if (empty[i]) scan.skipped.push_back(scan.samples[i].path.string());
    else kept.push_back(std::move(scan.samples[i]));
  }
  scan.samples = std::move(kept);
  if (scan.samples.empty()) throw EmptyInputError("corpus " + root.string() + " contains no opcode samples");
  return scan;
}

EncodedDataset encode_corpus(const CorpusScan& scan, const OpcodeVocab& vocab, std::size_t length) {
  if (length == 0) throw ConfigError("sequence length must be positive");
  EncodedDataset ds;
  ds.seq_len = length;
  ds.top_k = vocab.top_k();
  std::map<std::string, std::size_t> index;
  for (const auto& f : scan.families) {
    const bool present = std::any_of(scan.samples.begin(), scan.samples.end(),
                                     [&](const CorpusSample& s) { return s.family == f; });
    if (!present) continue;
    index[f] = ds.families.size();
    ds.families.push_back(f);
  }
  for (const auto& s : scan.samples) ds.records.push_back({index.at(s.family), encode(s.opcodes, vocab, length)});
  return ds;
}

// ---------------------------------------------------------------------------

SplitDataset split(const std::vector<SampleRecord>& records, double test_frac, std::uint64_t seed) {
  if (!(test_frac > 0.0 && test_frac < 1.0)) throw ConfigError("test fraction must lie in (0, 1)");
  std::map<std::size_t, std::vector<std::size_t>> by_family;
  for (std::size_t i = 0; i < records.size(); ++i) by_family[records[i].family].push_back(i);

  SplitDataset out;
  out.seed = seed;
  Rng rng(seed);
  for (auto& [family, members] : by_family) {
    const std::size_t n = members.size();
    if (n < 2) {
      throw InsufficientDataError("family " + std::to_string(family) + " has " + std::to_string(n) +
                                  " sample(s); at least 2 are needed to split");
    }
    auto n_test = static_cast<std::size_t>(std::llround(test_frac * static_cast<double>(n)));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t k = 0; k < n; ++k) (k < n_test ? out.test : out.train).push_back(records[members[k]]);
  }
  return out;
}

}  // namespace opseq
