#include <doctest.h>

#include <cmath>
#include <sstream>

#include "opseq/corpus/dataset.hpp"
#include "opseq/corpus/grouping.hpp"
#include "opseq/corpus/synth.hpp"
#include "opseq/corpus/vocab.hpp"
#include "opseq/error.hpp"
#include "opseq/io.hpp"
#include "opseq/train/adam.hpp"
#include "opseq/train/evaluate.hpp"
#include "opseq/train/grid.hpp"
#include "opseq/train/protocol.hpp"
#include "opseq/train/report.hpp"
#include "opseq/train/trainer.hpp"

using namespace opseq;

namespace {

EncodedDataset synthetic_dataset(std::size_t families, std::size_t per_family, std::size_t length,
                                 Separation sep = Separation::easy) {
  SynthConfig cfg;
  cfg.families = families;
  cfg.per_family = per_family;
  cfg.mean_len = length;
  cfg.separation = sep;
  const SynthCorpus c = synth_corpus(cfg);
  std::vector<std::vector<std::string>> seqs;
  for (const auto& s : c.samples) seqs.push_back(s.opcodes);
  const OpcodeVocab v = build_vocab(seqs, 30);
  EncodedDataset d;
  d.seq_len = length;
  d.top_k = v.top_k();
  for (const auto& f : c.families) d.families.push_back(f.name);
  for (const auto& s : c.samples) d.records.push_back({s.family, encode(s.opcodes, v, length)});
  return d;
}

ModelSpec tiny_spec(ArchId arch) {
  ModelSpec s;
  s.arch = arch;
  s.embed_dim = 8;
  s.lstm_units = 4;
  s.conv_filters = 8;
  s.mlp_hidden = 16;
  s.dropout_rate = 0.1;
  return s;
}

}  // namespace

TEST_CASE("adam matches a hand-rolled reference") {
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  Tensor p = Tensor::vector({1.0, -2.0, 0.5});
  Tensor g({3});
  std::vector<ParamSlot> slots{{"p", &p, &g}};
  AdamMoments mom = AdamMoments::zeros_like(slots);

  double ref[3] = {1.0, -2.0, 0.5}, m[3] = {}, v[3] = {};
  for (std::size_t t = 1; t <= 25; ++t) {
    for (int i = 0; i < 3; ++i) g[i] = 2.0 * ref[i] + std::sin(static_cast<double>(t + i));
    adam_step(slots, mom, t, cfg);
    for (int i = 0; i < 3; ++i) {
      const double gi = 2.0 * ref[i] + std::sin(static_cast<double>(t + i));
      m[i] = 0.9 * m[i] + 0.1 * gi;
      v[i] = 0.999 * v[i] + 0.001 * gi * gi;
      const double mh = m[i] / (1.0 - std::pow(0.9, static_cast<double>(t)));
      const double vh = v[i] / (1.0 - std::pow(0.999, static_cast<double>(t)));
      ref[i] -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
      CHECK(p[i] == doctest::Approx(ref[i]).epsilon(1e-13));
    }
  }
  const double first_step_size = 0.01;
  Tensor q = Tensor::vector({3.0});
  Tensor gq = Tensor::vector({-123.0});
  std::vector<ParamSlot> one{{"q", &q, &gq}};
  AdamMoments mq = AdamMoments::zeros_like(one);
  adam_step(one, mq, 1, cfg);
  CHECK(q[0] == doctest::Approx(3.0 + first_step_size).epsilon(1e-9));
}

TEST_CASE("adam refuses non-finite gradients without touching parameters") {
  TrainConfig cfg;
  Tensor p = Tensor::vector({1.0, 2.0});
  Tensor g = Tensor::vector({0.5, std::nan("")});
  std::vector<ParamSlot> slots{{"p", &p, &g}};
  AdamMoments mom = AdamMoments::zeros_like(slots);
  CHECK_THROWS_AS(adam_step(slots, mom, 1, cfg), TrainingDivergedError);
  CHECK(p[0] == 1.0);
  CHECK(mom.m[0][0] == 0.0);
}

TEST_CASE("early stopping bookkeeping") {
  EarlyStopping es(2);
  CHECK(es.observe(1, 1.0));
  CHECK_FALSE(es.observe(2, 1.5));
  CHECK_FALSE(es.should_stop());
  CHECK(es.observe(3, 0.9));
  CHECK_FALSE(es.observe(4, 0.9));
  CHECK_FALSE(es.observe(5, 2.0));
  CHECK(es.should_stop());
  CHECK(es.best_epoch() == 3);
  CHECK(es.best_loss() == 0.9);
  EarlyStopping never(0);
  for (std::size_t e = 1; e < 50; ++e) never.observe(e, static_cast<double>(e));
  CHECK_FALSE(never.should_stop());
}

TEST_CASE("train config fields and validation") {
  TrainConfig c;
  CHECK(c.batch_size == 32);
  CHECK(c.max_epochs == 100);
  CHECK(c.set_field("learning_rate", "0.005"));
  CHECK_FALSE(c.set_field("lstm_units", "3"));
  TrainConfig d;
  for (const auto& [k, v] : c.fields()) CHECK(d.set_field(k, v));
  CHECK(d.learning_rate == 0.005);
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = TrainConfig{};
  c.valid_fraction = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("training is deterministic and restores the best epoch") {
  const EncodedDataset d = synthetic_dataset(3, 20, 40);
  TrainConfig cfg;
  cfg.max_epochs = 6;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.01;
  cfg.seed = 5;
  auto run = [&] {
    Rng init(1);
    ModelGraph m = build_model([&] {
      ModelSpec s = tiny_spec(ArchId::lstm_embed);
      s.num_classes = 3;
      s.seq_len = 40;
      s.vocab_size = d.vocab_size();
      return s;
    }(), init);
    TrainHistory h = train_model(m, d.records, cfg);
    return std::make_pair(std::move(m), h);
  };
  auto [m1, h1] = run();
  auto [m2, h2] = run();
  REQUIRE(h1.epochs.size() == h2.epochs.size());
  for (std::size_t i = 0; i < h1.epochs.size(); ++i) CHECK(h1.epochs[i].train_loss == h2.epochs[i].train_loss);
  const auto p1 = m1.snapshot(), p2 = m2.snapshot();
  for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == p2[i]);
  CHECK(h1.valid_samples == 6);
  CHECK(h1.train_samples == 54);
  double best = INFINITY;
  std::size_t best_epoch = 0;
  for (const auto& e : h1.epochs)
    if (e.valid_loss < best) {
      best = e.valid_loss;
      best_epoch = e.epoch;
    }
  CHECK(h1.best_epoch == best_epoch);
}

TEST_CASE("epoch callback can stop training") {
  const EncodedDataset d = synthetic_dataset(2, 10, 20);
  ModelSpec s = tiny_spec(ArchId::mlp_only);
  s.num_classes = 2;
  s.seq_len = 20;
  s.vocab_size = d.vocab_size();
  Rng init(3);
  ModelGraph m = build_model(s, init);
  TrainConfig cfg;
  cfg.max_epochs = 50;
  std::size_t calls = 0;
  const TrainHistory h = train_model(m, d.records, cfg, [&](const EpochRecord&, ModelGraph&) { return ++calls == 3; });
  CHECK(h.epochs.size() == 3);
}

TEST_CASE("confusion matrix identities") {
  const EncodedDataset d = synthetic_dataset(4, 10, 30);
  ModelSpec s = tiny_spec(ArchId::bilstm_embed);
  s.num_classes = 4;
  s.seq_len = 30;
  s.vocab_size = d.vocab_size();
  Rng init(2);
  const ModelGraph m = build_model(s, init);
  const Evaluation e1 = evaluate(m, d.records, d.families, 1);
  const Evaluation e3 = evaluate(m, d.records, d.families, 3);
  CHECK(e1.confusion.counts == e3.confusion.counts);
  CHECK(e1.mean_loss == e3.mean_loss);
  CHECK(e1.confusion.total() == 40);
  CHECK(e1.confusion.row_sums() == std::vector<std::size_t>(4, 10));
  CHECK(e1.accuracy == static_cast<double>(e1.confusion.correct()) / 40.0);
  for (const auto& row : e1.confusion.row_percentages()) {
    double s2 = 0.0;
    for (double v : row) s2 += v;
    CHECK(s2 == doctest::Approx(100.0));
  }
  const std::string csv = confusion_csv(e1.confusion);
  CHECK(csv.rfind("true\\predicted,family_00,family_01,family_02,family_03\n", 0) == 0);
  CHECK_THROWS_AS(evaluate(m, {}, d.families), InputError);
}

TEST_CASE("protocol means, cumulative groups and confusion row sums") {
  const EncodedDataset d = synthetic_dataset(10, 14, 24);
  TrainConfig cfg;
  cfg.max_epochs = 2;
  cfg.seed = 11;
  ProtocolOptions opt;
  opt.runs = 3;
  const FamilyGrouping g = grouping_for(d);
  CHECK(g.groups.size() == 2);
  const auto reports = run_protocol(tiny_spec(ArchId::mlp_only), d, g, cfg, opt);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].num_classes == 5);
  CHECK(reports[1].num_classes == 10);
  for (const auto& r : reports) {
    REQUIRE(r.accuracies.size() == 3);
    double sum = 0.0;
    for (double a : r.accuracies) sum += a;
    CHECK(r.mean_accuracy == sum / 3.0);
    CHECK(r.seeds == std::vector<std::uint64_t>{11, 12, 13});
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(r.test_counts[k] == r.num_classes * 2);
      CHECK(r.confusions[k].row_sums() == std::vector<std::size_t>(r.num_classes, 2));
      CHECK(r.confusions[k].accuracy() == r.accuracies[k]);
    }
  }
  opt.jobs = 3;
  const auto parallel = run_protocol(tiny_spec(ArchId::mlp_only), d, g, cfg, opt);
  for (std::size_t i = 0; i < reports.size(); ++i) CHECK(parallel[i].accuracies == reports[i].accuracies);

  const std::string summary = summary_csv(reports);
  CHECK(summary.rfind("arch,families,run_1,run_2,run_3,mean\n", 0) == 0);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);
  std::istringstream bars(bar_chart_csv(reports));
  std::string line;
  std::getline(bars, line);
  for (const auto& r : reports) {
    std::getline(bars, line);
    CHECK(line == "mlp_only," + std::to_string(r.num_classes) + "," + percent_2dp(r.mean_accuracy));
  }
  CHECK(arithmetic_mean({0.9, 0.8}) == (0.9 + 0.8) / 2.0);
}

TEST_CASE("protocol rejects family counts that are not a multiple of five") {
  const EncodedDataset d = synthetic_dataset(3, 6, 10);
  CHECK_THROWS_AS(grouping_for(d), ConfigError);
}

TEST_CASE("percent formatting") {
  CHECK(percent_2dp(0.94216) == "94.22");
  CHECK(percent_2dp(1.0) == "100.00");
}

TEST_CASE("grid space enumeration") {
  const GridSpace space;
  CHECK(space.size() == 500);
  const auto pts = space.enumerate();
  REQUIRE(pts.size() == 500);
  CHECK(pts.front().opcode_length == 2000);
  CHECK(pts.front().dropout_rate == 0.1);
  CHECK(pts[1].dropout_rate == 0.2);
  CHECK(pts.back().opcode_length == 10000);
  CHECK(pts.back().embed_dim == 256);
  CHECK(GridSpace::from_text(space.to_text()).to_text() == space.to_text());
  CHECK(read_file(std::string(OPSEQ_FIXTURE_DIR) + "/../../configs/grid_space.txt") == space.to_text());
  CHECK(space.opcode_lengths == std::vector<std::size_t>{2000, 4000, 6000, 8000, 10000});
  CHECK(space.lstm_units == std::vector<std::size_t>{16, 32, 64, 128, 256});
  CHECK(space.embed_dims == std::vector<std::size_t>{16, 32, 64, 128, 256});
  CHECK(space.dropout_rates == std::vector<double>{0.1, 0.2, 0.3, 0.4});

  const GridSpace small = GridSpace::from_text("opcode_lengths=100,200\nlstm_units=4\nembed_dims=8\ndropout_rates=0.2\n");
  CHECK(small.size() == 2);
  CHECK_THROWS_AS(GridSpace::from_text("lstm_units=\n"), InputError);
  CHECK_THROWS_AS(GridSpace::from_text("colour=red\n"), InputError);
}

TEST_CASE("grid selection prefers the fastest result inside the tolerance band") {
  auto r = [](double acc, double secs) {
    GridResult g;
    g.outcome = {acc, secs};
    return g;
  };
  CHECK(select_best({r(0.90, 10), r(0.95, 50), r(0.947, 20), r(0.944, 5)}) == 2);
  CHECK(select_best({r(0.90, 10), r(0.95, 50), r(0.945, 20)}) == 2);
  CHECK(select_best({r(0.95, 30), r(0.95, 30)}) == 0);
  CHECK(select_best({r(0.95, 30), r(0.949, 30)}) == 0);
  CHECK(select_best({r(0.5, 1)}, 0.0) == 0);
  CHECK(select_best({r(0.8, 1), r(0.81, 100)}, 0.0) == 1);
  CHECK_THROWS_AS(select_best({}), InputError);

  std::size_t calls = 0;
  const GridSpace space = GridSpace::from_text("opcode_lengths=1,2\nlstm_units=3\nembed_dims=4\ndropout_rates=0.5\n");
  const GridSearchResult res = grid_search(space, [&](const GridPoint& p) {
    ++calls;
    return GridOutcome{p.opcode_length == 2 ? 0.9 : 0.8, 1.0};
  });
  CHECK(calls == 2);
  CHECK(res.results.size() == 2);
  CHECK(res.best_index == 1);
  const std::string csv = grid_csv(res.results);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("apply_point maps grid fields onto the model spec") {
  GridPoint p{4000, 64, 32, 0.4};
  const ModelSpec s = apply_point(ModelSpec{}, p);
  CHECK(s.seq_len == 4000);
  CHECK(s.lstm_units == 64);
  CHECK(s.embed_dim == 32);
  CHECK(s.dropout_rate == 0.4);
}
