// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "opseq/corpus/dataset.hpp"
#include "opseq/corpus/grouping.hpp"
#include "opseq/corpus/synth.hpp"
#include "opseq/corpus/vocab.hpp"
#include "opseq/io.hpp"
#include "opseq/layers/conv1d.hpp"
#include "opseq/layers/lstm.hpp"
#include "opseq/train/evaluate.hpp"
#include "opseq/train/grid.hpp"
#include "opseq/train/protocol.hpp"
#include "opseq/train/report.hpp"
#include "opseq/train/trainer.hpp"
#include "opseq/zoo/checkpoint.hpp"
#include "support/gradient_suite.hpp"

using namespace opseq;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int dec = 2) { return format_fixed(v, dec); }

EncodedDataset synthetic_dataset(const SynthConfig& sc, std::size_t length, std::size_t top_k = 30) {
  const SynthCorpus c = synth_corpus(sc);
  std::vector<std::vector<std::string>> seqs;
  for (const auto& s : c.samples) seqs.push_back(s.opcodes);
  const OpcodeVocab v = build_vocab(seqs, top_k);
  EncodedDataset d;
  d.seq_len = length;
  d.top_k = v.top_k();
  for (const auto& f : c.families) d.families.push_back(f.name);
  for (const auto& s : c.samples) d.records.push_back({s.family, encode(s.opcodes, v, length)});
  return d;
}

// Criterion 5 setup, shared with criterion 8.
SynthConfig easy_config() {
  SynthConfig sc;
  sc.families = 5;
  sc.per_family = 100;
  sc.mean_len = 200;
  sc.separation = Separation::easy;
  sc.seed = 7;
  return sc;
}

TrainConfig easy_train_config() {
  TrainConfig cfg;
  cfg.max_epochs = 30;
  cfg.seed = 7;
  return cfg;
}

RunReport run_easy_benchmark() {
  const EncodedDataset d = synthetic_dataset(easy_config(), 200, 30);
  ModelSpec spec;
  spec.arch = ArchId::bilstm_embed_cnn;
  ProtocolOptions opt;
  opt.runs = 5;
  return run_repeated(spec, d, easy_train_config(), opt);
}

Verdict criterion_1() {
  const auto t0 = Clock::now();
  auto cases = testing::layer_gradient_suite(20);
  for (auto& c : testing::model_gradient_suite(20)) cases.push_back(c);
  const double secs = seconds_since(t0);
  double worst = 0.0;
  std::string worst_name;
  std::size_t min_instances = SIZE_MAX;
  for (const auto& c : cases) {
    if (c.max_error >= worst) {
      worst = c.max_error;
      worst_name = c.name;
    }
    min_instances = std::min(min_instances, c.instances);
  }
  std::ostringstream d;
  d << cases.size() << " layer/model cases, >= " << min_instances << " instances each, max rel error "
    << worst << " (" << worst_name << "), " << fmt(secs, 1) << "s";
  return {worst < 1e-4 && min_instances >= 20 && secs < 120.0, d.str()};
}

Verdict criterion_2() {
  const LstmParams zero = LstmParams::zeros(3, 1);
  const LstmState prev{Tensor::zeros({1}), Tensor::filled({1}, 1.0)};
  const double h = lstm_step(Tensor::vector({0.7, -0.2, 1.3}), prev, zero).h[0];
  const double expected = 0.5 * std::tanh(0.5);
  const bool lstm_ok = std::abs(h - expected) < 1e-9 && std::abs(h - 0.231059) < 1e-6;

  const Tensor conv = conv1d_forward(Tensor({4, 1}, {1, 2, 3, 4}), Tensor({3, 1, 1}, {1, 1, 1}), Tensor::zeros({1}));
  const Tensor pool = maxpool1d(Tensor({4, 1}, {1, 3, 2, 5}), 2);
  const bool conv_ok = conv.values() == std::vector<double>{6, 9};
  const bool pool_ok = pool.values() == std::vector<double>{3, 5};
  std::ostringstream d;
  d.precision(12);
  d << "h=" << h << " conv=[" << conv[0] << "," << conv[1] << "] pool=[" << pool[0] << "," << pool[1] << "]";
  return {lstm_ok && conv_ok && pool_ok, d.str()};
}

Verdict criterion_3() {
  ModelSpec spec;
  spec.arch = ArchId::bilstm_embed_cnn;
  spec.seq_len = 2000;
  spec.conv_kernel = 3;
  spec.pool_size = 2;
  spec.lstm_units = 16;
  Rng rng(0);
  const ModelGraph m = build_model(spec, rng);
  Shape conv, pool, classifier_in;
  for (std::size_t i = 0; i < m.layer_count(); ++i) {
    const auto kind = m.layer(i).kind();
    if (kind == "conv1d") conv = m.layer_shapes()[i];
    if (kind == "maxpool1d") pool = m.layer_shapes()[i];
    if (kind == "dense") classifier_in = m.layer_shapes()[i - 1];
  }
  const bool ok = !conv.empty() && conv[0] == 1998 && !pool.empty() && pool[0] == 999 &&
                  classifier_in == Shape{32};
  return {ok, "conv " + shape_string(conv) + ", pooled " + shape_string(pool) + ", classifier input " +
                  shape_string(classifier_in)};
}

Verdict criterion_4() {
  SynthConfig sc;
  sc.families = 4;
  sc.per_family = 2;
  sc.mean_len = 24;
  sc.seed = 4;
  const EncodedDataset d = synthetic_dataset(sc, 24, 30);
  TrainConfig cfg;
  cfg.max_epochs = 200;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.01;
  cfg.valid_fraction = 0.0;
  cfg.early_stop_patience = 0;
  cfg.seed = 4;

  bool all_ok = true;
  std::ostringstream detail;
  for (ArchId arch : kAllArchs) {
    ModelSpec spec;
    spec.arch = arch;
    spec.num_classes = d.families.size();
    spec.seq_len = d.seq_len;
    spec.vocab_size = d.vocab_size();
    Rng init(4);
    ModelGraph model = build_model(spec, init);
    std::size_t reached = 0;
    const auto t0 = Clock::now();
    train_model(model, d.records, cfg, [&](const EpochRecord& r, ModelGraph& m) {
      if (evaluate(m, d.records, d.families).accuracy == 1.0) {
        reached = r.epoch;
        return true;
      }
      return false;
    });
    const double secs = seconds_since(t0);
    const bool ok = reached > 0 && secs < 60.0;
    all_ok = all_ok && ok;
    detail << arch_name(arch) << "=" << (reached ? std::to_string(reached) : std::string("never")) << "ep/"
           << fmt(secs, 1) << "s ";
  }
  return {all_ok, detail.str()};
}

Verdict criterion_5(RunReport* keep) {
  const auto t0 = Clock::now();
  RunReport r = run_easy_benchmark();
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "mean " << percent_2dp(r.mean_accuracy) << "% runs [";
  for (std::size_t i = 0; i < r.accuracies.size(); ++i) d << (i ? " " : "") << percent_2dp(r.accuracies[i]);
  std::size_t max_epochs = 0;
  for (const auto& h : r.histories) max_epochs = std::max(max_epochs, h.epochs.size());
  d << "], <= " << max_epochs << " epochs, " << fmt(secs, 0) << "s";
  const bool ok = r.mean_accuracy >= 0.90 && max_epochs <= 30 && secs < 900.0;
  if (keep) *keep = std::move(r);
  return {ok, d.str()};
}

Verdict criterion_6() {
  SynthConfig sc;
  sc.families = 10;
  sc.per_family = 60;
  sc.mean_len = 200;
  sc.separation = Separation::hard;
  sc.seed = 7;
  const EncodedDataset d = synthetic_dataset(sc, 256, 30);
  TrainConfig cfg;
  cfg.max_epochs = 20;
  cfg.seed = 100;
  ProtocolOptions opt;
  opt.runs = 5;

  std::map<ArchId, double> mean;
  const auto t0 = Clock::now();
  for (ArchId arch : {ArchId::lstm_plain, ArchId::lstm_embed, ArchId::bilstm_embed, ArchId::bilstm_embed_cnn}) {
    ModelSpec spec;
    spec.arch = arch;
    spec.embed_dim = 32;
    spec.lstm_units = 16;
    spec.conv_filters = 32;
    mean[arch] = run_repeated(spec, d, cfg, opt).mean_accuracy;
  }
  const double gap_cnn = 100.0 * (mean[ArchId::bilstm_embed_cnn] - mean[ArchId::lstm_plain]);
  const double gap_bi = 100.0 * (mean[ArchId::bilstm_embed] - mean[ArchId::lstm_embed]);
  std::ostringstream det;
  det << "lstm_plain " << percent_2dp(mean[ArchId::lstm_plain]) << ", lstm_embed "
      << percent_2dp(mean[ArchId::lstm_embed]) << ", bilstm_embed " << percent_2dp(mean[ArchId::bilstm_embed])
      << ", bilstm_embed_cnn " << percent_2dp(mean[ArchId::bilstm_embed_cnn]) << "; cnn-plain " << fmt(gap_cnn)
      << " pts, bi-uni " << fmt(gap_bi) << " pts, " << fmt(seconds_since(t0), 0) << "s";
  return {gap_cnn >= 10.0 && gap_bi >= -1.0, det.str()};
}

Verdict criterion_7() {
  SynthConfig sc;
  sc.families = 10;
  sc.per_family = 40;
  sc.mean_len = 60;
  sc.seed = 7;
  const EncodedDataset d = synthetic_dataset(sc, 64, 30);
  TrainConfig cfg;
  cfg.max_epochs = 3;
  cfg.seed = 21;
  ProtocolOptions opt;
  opt.runs = 5;
  ModelSpec spec;
  spec.arch = ArchId::lstm_embed;
  spec.embed_dim = 16;
  spec.lstm_units = 8;
  const auto reports = run_protocol(spec, d, grouping_for(d), cfg, opt);

  bool ok = reports.size() == 2;
  std::ostringstream det;
  det << "family sets:";
  for (const auto& r : reports) {
    det << " " << r.num_classes;
    double sum = 0.0;
    for (double a : r.accuracies) sum += a;
    ok = ok && r.accuracies.size() == 5 && r.mean_accuracy == sum / 5.0;
    const auto expected_test = static_cast<std::size_t>(std::llround(0.15 * 40.0));
    for (const auto& cm : r.confusions) {
      ok = ok && cm.row_sums() == std::vector<std::size_t>(r.num_classes, expected_test);
    }
  }
  ok = ok && reports[0].num_classes == 5 && reports[1].num_classes == 10;
  det << "; means equal exact per-run averages; confusion rows sum to " << std::llround(0.15 * 40.0)
      << " test samples per family";
  return {ok, det.str()};
}

Verdict criterion_8(const RunReport* first) {
  RunReport reference;
  if (first) reference = *first;
  else reference = run_easy_benchmark();
  const RunReport again = run_easy_benchmark();
  bool same = reference.accuracies.size() == again.accuracies.size();
  for (std::size_t i = 0; same && i < again.accuracies.size(); ++i)
    same = std::memcmp(&reference.accuracies[i], &again.accuracies[i], sizeof(double)) == 0;
  same = same && std::memcmp(&reference.mean_accuracy, &again.mean_accuracy, sizeof(double)) == 0;

  const EncodedDataset d = synthetic_dataset(easy_config(), 200, 30);
  SplitDataset parts = split(d.records, 0.15, 7);
  ModelSpec spec;
  spec.num_classes = d.families.size();
  spec.seq_len = d.seq_len;
  spec.vocab_size = d.vocab_size();
  Rng init(7);
  ModelGraph model = build_model(spec, init);
  TrainConfig cfg = easy_train_config();
  cfg.max_epochs = 2;
  train_model(model, parts.train, cfg);
  const fs::path ckpt = fs::temp_directory_path() / "opseq_acceptance.ckpt";
  save_checkpoint(ckpt, model);
  ModelGraph loaded = load_checkpoint(ckpt);
  fs::remove(ckpt);
  std::size_t changed = 0;
  Rng unused(0);
  for (const auto& s : parts.test) {
    if (!(model.forward(s.ids, Mode::eval, unused) == loaded.forward(s.ids, Mode::eval, unused))) ++changed;
  }
  std::ostringstream det;
  det << "repeat accuracies " << (same ? "bit-identical" : "DIFFER") << "; checkpoint round-trip changed "
      << changed << " of " << parts.test.size() << " predictions";
  return {same && changed == 0, det.str()};
}

Verdict criterion_9() {
  const fs::path fixtures = OPSEQ_FIXTURE_DIR;
  const CorpusScan scan = read_corpus_dir(fixtures / "corpus");
  std::vector<std::vector<std::string>> seqs;
  for (const auto& s : scan.samples) seqs.push_back(s.opcodes);
  const OpcodeVocab v = build_vocab(seqs, 6);
  const EncodedDataset d = encode_corpus(scan, v, 7);
  const bool vocab_ok = v.to_text() == read_file(fixtures / "vocab_k6.txt");
  const bool data_ok = d.to_text() == read_file(fixtures / "dataset_k6_l7.txt");
  const bool ids_ok = v.id_of("<unseen>") == 7 && d.records[3].ids.back() == 0 && d.records[4].ids.size() == 7;
  return {vocab_ok && data_ok && ids_ok, std::string("vocab ") + (vocab_ok ? "match" : "MISMATCH") + ", dataset " +
                                             (data_ok ? "match" : "MISMATCH") + ", PAD=0 OTHER=K+1 " +
                                             (ids_ok ? "ok" : "WRONG")};
}

Verdict criterion_10() {
  std::size_t calls = 0;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t, double>> distinct;
  const GridSearchResult res = grid_search(GridSpace{}, [&](const GridPoint& p) {
    ++calls;
    distinct.insert({p.opcode_length, p.lstm_units, p.embed_dim, p.dropout_rate});
    return GridOutcome{0.5, 1.0};
  });
  auto r = [](double acc, double secs) {
    GridResult g;
    g.outcome = {acc, secs};
    return g;
  };
  const bool band_ok = select_best({r(0.90, 10), r(0.95, 50), r(0.947, 20), r(0.944, 5)}) == 2 &&
                       select_best({r(0.95, 30), r(0.95, 30)}) == 0 &&
                       select_best({r(0.95, 40), r(0.9451, 10), r(0.9449, 1)}) == 1;
  const bool ok = calls == 500 && distinct.size() == 500 && res.results.size() == 500 && band_ok;
  return {ok, std::to_string(calls) + " stub trainings over " + std::to_string(distinct.size()) +
                  " distinct points; tie-band selection " + (band_ok ? "ok" : "WRONG")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  auto want = [&](int n) { return wanted.empty() || wanted.count(n) > 0; };

  RunReport easy;
  bool have_easy = false;
  int failures = 0;
  auto report = [&](int n, const char* title, const std::function<Verdict()>& fn) {
    if (!want(n)) return;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("criterion %2d %s  %s: %s\n", n, v.pass ? "PASS" : "FAIL", title, v.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "gradient suite", criterion_1);
  report(2, "analytic fixtures", criterion_2);
  report(3, "shape arithmetic", criterion_3);
  report(4, "overfit check", criterion_4);
  report(5, "synthetic-easy benchmark", [&] {
    Verdict v = criterion_5(&easy);
    have_easy = true;
    return v;
  });
  report(6, "architecture ordering", criterion_6);
  report(7, "protocol mechanics", criterion_7);
  report(8, "determinism", [&] { return criterion_8(have_easy ? &easy : nullptr); });
  report(9, "vocabulary/encoding golden", criterion_9);
  report(10, "grid enumeration", criterion_10);
  return failures == 0 ? 0 : 1;
}
