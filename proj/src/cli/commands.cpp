#include "opseq/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "opseq/cli/config.hpp"
#include "opseq/corpus/dataset.hpp"
#include "opseq/corpus/grouping.hpp"
#include "opseq/corpus/synth.hpp"
#include "opseq/corpus/vocab.hpp"
#include "opseq/error.hpp"
#include "opseq/io.hpp"
#include "opseq/train/evaluate.hpp"
#include "opseq/train/grid.hpp"
#include "opseq/train/protocol.hpp"
#include "opseq/train/report.hpp"
#include "opseq/train/trainer.hpp"
#include "opseq/zoo/checkpoint.hpp"

namespace fs = std::filesystem;

namespace opseq::cli {

namespace {

constexpr std::uint64_t kInitStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kTrainStream = 0xbf58476d1ce4e5b9ULL;

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t jobs = 1;
  std::string config_path;
  std::vector<std::string> overrides;
};

void require_dir(const fs::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string(what) + " is required");
  if (!fs::is_directory(p)) throw InputError(std::string(what) + " '" + p.string() + "' is not a directory");
}

void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string(what) + " is required");
  if (!fs::is_regular_file(p)) throw InputError(std::string(what) + " '" + p.string() + "' does not exist");
}

void require_output(const fs::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string(what) + " is required");
  if (fs::is_directory(p)) throw InputError(std::string(what) + " '" + p.string() + "' is a directory");
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw InputError("cannot create directory '" + p.string() + "'");
}

CliConfig load_config(const Globals& g) {
  CliConfig c;
  if (!g.config_path.empty()) {
    require_file(g.config_path, "--config");
    c.merge_text(read_file(g.config_path));
  }
  for (const auto& a : g.overrides) c.set_assignment(a);
  if (g.seed_given) c.train.seed = g.seed;
  return c;
}

EncodedDataset load_dataset(const fs::path& p) {
  require_file(p, "dataset");
  return EncodedDataset::from_text(read_file(p));
}

std::vector<ArchId> parse_arch_list(const std::string& text) {
  if (text == "all") return {kAllArchs.begin(), kAllArchs.end()};
  std::vector<ArchId> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(parse_arch(trim(part)));
  if (out.empty()) throw ConfigError("no architecture given; valid: " + valid_arch_names());
  return out;
}

int cmd_vocab(const CliConfig& c, std::size_t k, const fs::path& out_path, std::size_t jobs, std::ostream& out) {
  require_dir(c.corpus_dir, "corpus directory");
  require_output(out_path, "output");
  const CorpusScan scan = read_corpus_dir(c.corpus_dir, jobs);
  std::vector<std::vector<std::string>> seqs;
  seqs.reserve(scan.samples.size());
  for (const auto& s : scan.samples) seqs.push_back(s.opcodes);
  const OpcodeCounts counts = count_opcodes(seqs);
  const OpcodeVocab vocab = vocab_from_counts(counts, k);
  write_file_atomic(out_path, vocab.to_text());

  std::uint64_t total = 0;
  for (const auto& [m, n] : counts) total += n;
  std::uint64_t kept = 0;
  out << "rank\tmnemonic\tcount\n";
  for (std::size_t i = 0; i < vocab.entries().size(); ++i) {
    const auto& e = vocab.entries()[i];
    kept += e.count;
    out << (i + 1) << '\t' << e.mnemonic << '\t' << e.count << '\n';
  }
  out << "distinct opcodes: " << counts.size() << "\n";
  out << "retained share: " << format_fixed(100.0 * static_cast<double>(kept) / static_cast<double>(total), 2)
      << "%\n";
  return kExitOk;
}

int cmd_encode(const CliConfig& c, const fs::path& vocab_path, std::size_t length, const fs::path& out_path,
               std::size_t jobs, std::ostream& out, std::ostream& err) {
  require_dir(c.corpus_dir, "corpus directory");
  require_file(vocab_path, "vocab file");
  require_output(out_path, "output");
  const OpcodeVocab vocab = OpcodeVocab::from_text(read_file(vocab_path));
  const CorpusScan scan = read_corpus_dir(c.corpus_dir, jobs);
  for (const auto& s : scan.skipped) err << "warning: no opcodes in " << s << ", skipped\n";
  const EncodedDataset data = encode_corpus(scan, vocab, length);
  write_file_atomic(out_path, data.to_text());
  const auto counts = data.family_counts();
  for (std::size_t f = 0; f < data.families.size(); ++f) out << data.families[f] << '\t' << counts[f] << '\n';
  out << "records: " << data.records.size() << ", skipped: " << scan.skipped.size() << '\n';
  return kExitOk;
}

int cmd_synth(const SynthConfig& cfg, const fs::path& out_dir, std::ostream& out) {
  if (out_dir.empty()) throw ConfigError("--out is required");
  cfg.validate();
  const SynthCorpus corpus = synth_corpus(cfg);
  write_corpus_dir(corpus, out_dir);
  out << "wrote " << corpus.samples.size() << " samples in " << corpus.families.size() << " families to "
      << out_dir.string() << '\n';
  return kExitOk;
}

int cmd_train(CliConfig c, std::size_t jobs, std::ostream& out) {
  require_output(c.checkpoint, "checkpoint");
  if (c.report_dir.empty()) throw ConfigError("report directory is required");
  EncodedDataset data = load_dataset(c.dataset_file);
  if (c.is_explicit("seq_len") && c.spec.seq_len != data.seq_len) data = data.with_length(c.spec.seq_len);
  c.spec.num_classes = data.families.size();
  c.spec.seq_len = data.seq_len;
  c.spec.vocab_size = data.vocab_size();
  c.spec.validate();
  c.train.validate();
  ensure_dir(c.report_dir);

  const std::uint64_t seed = c.train.seed;
  SplitDataset parts = split(data.records, c.test_fraction, seed);
  Rng init(seed ^ kInitStream);
  ModelGraph model = build_model(c.spec, init);
  TrainConfig cfg = c.train;
  cfg.seed = seed ^ kTrainStream;
  const TrainHistory history = train_model(model, parts.train, cfg, [&](const EpochRecord& r, ModelGraph&) {
    out << "epoch " << r.epoch << " loss " << format_fixed(r.train_loss, 5) << " acc "
        << format_fixed(100.0 * r.train_accuracy, 2) << '\n';
    return false;
  });
  const Evaluation ev = evaluate(model, parts.test, data.families, jobs);

  save_checkpoint(c.checkpoint, model);
  write_file_atomic(c.report_dir / "history.csv", history_csv(history));
  write_file_atomic(c.report_dir / "confusion.csv", confusion_csv(ev.confusion));
  std::ostringstream acc;
  acc << "arch,families,train_samples,test_samples,best_epoch,test_loss,test_accuracy\n"
      << arch_name(c.spec.arch) << ',' << data.families.size() << ',' << parts.train.size() << ','
      << parts.test.size() << ',' << history.best_epoch << ',' << format_double(ev.mean_loss) << ','
      << format_double(100.0 * ev.accuracy) << '\n';
  write_file_atomic(c.report_dir / "accuracy.csv", acc.str());
  out << "test accuracy " << percent_2dp(ev.accuracy) << "% on " << parts.test.size() << " samples\n";
  return kExitOk;
}

int cmd_protocol(const CliConfig& c, const std::string& arch_list, std::size_t jobs, std::ostream& out) {
  if (c.report_dir.empty()) throw ConfigError("report directory is required");
  const std::vector<ArchId> archs = parse_arch_list(arch_list);
  const EncodedDataset data = load_dataset(c.dataset_file);
  const FamilyGrouping grouping = grouping_for(data);
  c.train.validate();
  ensure_dir(c.report_dir);

  ProtocolOptions options;
  options.runs = c.runs;
  options.test_fraction = c.test_fraction;
  options.jobs = jobs;
  std::vector<RunReport> all;
  for (ArchId arch : archs) {
    ModelSpec spec = c.spec;
    spec.arch = arch;
    for (RunReport& r : run_protocol(spec, data, grouping, c.train, options)) {
      const std::string stem = std::string(arch_name(arch)) + "_" + std::to_string(r.num_classes) + "families";
      write_file_atomic(c.report_dir / (stem + ".json"), report_json(r));
      for (std::size_t k = 0; k < r.confusions.size(); ++k) {
        write_file_atomic(c.report_dir / (stem + "_run" + std::to_string(k + 1) + "_confusion.csv"),
                          confusion_csv(r.confusions[k]));
      }
      out << arch_name(arch) << ' ' << r.num_classes << " families: mean " << percent_2dp(r.mean_accuracy)
          << "%\n";
      all.push_back(std::move(r));
    }
  }
  write_file_atomic(c.report_dir / "accuracy.csv", accuracy_csv(all));
  write_file_atomic(c.report_dir / "summary.csv", summary_csv(all));
  write_file_atomic(c.report_dir / "bar_chart.csv", bar_chart_csv(all));
  return kExitOk;
}

int cmd_grid(CliConfig c, const std::string& space_path, std::ostream& out) {
  if (c.report_dir.empty()) throw ConfigError("report directory is required");
  GridSpace space;
  if (!space_path.empty()) {
    require_file(space_path, "space file");
    space = GridSpace::from_text(read_file(space_path));
  }
  const EncodedDataset data = load_dataset(c.dataset_file);
  c.train.validate();
  ensure_dir(c.report_dir);

  const GridTrainer trainer = make_grid_trainer(c.spec, data, c.train, c.test_fraction);
  const GridSearchResult result = grid_search(space, [&](const GridPoint& p) {
    GridOutcome o = trainer(p);
    out << "L=" << p.opcode_length << " units=" << p.lstm_units << " embed=" << p.embed_dim
        << " dropout=" << format_double(p.dropout_rate) << " -> " << percent_2dp(o.accuracy) << "%\n";
    return o;
  });
  write_file_atomic(c.report_dir / "grid_results.csv", grid_csv(result.results));

  CliConfig best = c;
  best.spec = apply_point(c.spec, result.results[result.best_index].point);
  best.spec.num_classes = data.families.size();
  best.spec.vocab_size = data.vocab_size();
  best.report_dir.clear();
  write_file_atomic(c.report_dir / "best_config.txt", best.to_text());
  out << "best: " << result.best_index + 1 << " of " << result.results.size() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Opcode sequence classifiers"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Base random seed");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config_path, "key=value configuration file");
  app.add_option("--set", g.overrides, "Override a configuration key (key=value)");

  std::string corpus, vocab_path, out_path, dataset, checkpoint, report_dir, arch, space;
  std::size_t top_k = 30;
  std::size_t length = 2000;
  std::size_t runs = 0;
  std::size_t epochs = 0;

  auto* vocab = app.add_subcommand("vocab", "Rank opcodes and write the top-K vocabulary");
  vocab->add_option("--corpus", corpus, "Corpus directory");
  vocab->add_option("-k,--top-k", top_k, "Opcodes to keep");
  vocab->add_option("--out", out_path, "Vocabulary file")->required();

  auto* encode = app.add_subcommand("encode", "Encode a corpus into a fixed-length dataset");
  encode->add_option("--corpus", corpus, "Corpus directory");
  encode->add_option("--vocab", vocab_path, "Vocabulary file");
  encode->add_option("-L,--length", length, "Sequence length");
  encode->add_option("--out", out_path, "Dataset file")->required();

  SynthConfig synth_cfg;
  std::string separation = "easy";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic opcode corpus");
  synth->add_option("--families", synth_cfg.families);
  synth->add_option("--per-family", synth_cfg.per_family);
  synth->add_option("--mean-len", synth_cfg.mean_len);
  synth->add_option("--opcodes", synth_cfg.opcodes);
  synth->add_option("--core-opcodes", synth_cfg.core_opcodes);
  synth->add_option("--rare-rate", synth_cfg.rare_rate);
  synth->add_option("--separation", separation, "easy or hard");
  synth->add_option("--marker-noise", synth_cfg.marker_noise);
  synth->add_option("--motif-rate", synth_cfg.motif_rate);
  synth->add_option("--out", out_path, "Output directory")->required();

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--dataset", dataset, "Dataset file");
    sub->add_option("--report-dir", report_dir, "Report directory");
  };
  auto* train = app.add_subcommand("train", "Train one model");
  add_common(train);
  train->add_option("--arch", arch, "Architecture");
  train->add_option("--checkpoint", checkpoint, "Checkpoint output");
  train->add_option("--epochs", epochs, "Maximum epochs");

  auto* protocol = app.add_subcommand("protocol", "Repeated runs over cumulative family groups");
  add_common(protocol);
  protocol->add_option("--arch", arch, "Architecture, comma list, or 'all'")->default_val("all");
  protocol->add_option("--runs", runs, "Runs per family set");
  protocol->add_option("--epochs", epochs, "Maximum epochs");

  auto* grid = app.add_subcommand("grid", "Grid search over hyperparameters");
  add_common(grid);
  grid->add_option("--arch", arch, "Architecture");
  grid->add_option("--space", space, "Grid space file");
  grid->add_option("--epochs", epochs, "Maximum epochs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  g.seed_given = app.count("--seed") > 0;

  try {
    CliConfig c = load_config(g);
    if (!corpus.empty()) c.corpus_dir = corpus;
    if (!vocab_path.empty()) c.vocab_file = vocab_path;
    if (!dataset.empty()) c.dataset_file = dataset;
    if (!checkpoint.empty()) c.checkpoint = checkpoint;
    if (!report_dir.empty()) c.report_dir = report_dir;
    if (!arch.empty() && arch.find(',') == std::string::npos && arch != "all") c.set("arch", arch);
    if (runs > 0) c.runs = runs;
    if (epochs > 0) c.train.max_epochs = epochs;

    if (*vocab) return cmd_vocab(c, top_k, out_path, g.jobs, out);
    if (*encode) return cmd_encode(c, c.vocab_file, length, out_path, g.jobs, out, err);
    if (*synth) {
      synth_cfg.separation = parse_separation(separation);
      if (g.seed_given) synth_cfg.seed = g.seed;
      return cmd_synth(synth_cfg, out_path, out);
    }
    if (*train) return cmd_train(std::move(c), g.jobs, out);
    if (*protocol) return cmd_protocol(c, arch, g.jobs, out);
    if (*grid) return cmd_grid(std::move(c), space, out);
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace opseq::cli
