#include <doctest.h>

#include <sstream>

#include "opseq/error.hpp"
#include "opseq/layers/layer.hpp"
#include "opseq/zoo/checkpoint.hpp"
#include "opseq/zoo/model.hpp"
#include "support/random.hpp"

using namespace opseq;

namespace {

ModelSpec small_spec(ArchId arch) {
  ModelSpec s;
  s.arch = arch;
  s.num_classes = 4;
  s.vocab_size = 7;
  s.seq_len = 20;
  s.embed_dim = 5;
  s.lstm_units = 3;
  s.conv_filters = 4;
  s.mlp_hidden = 6;
  return s;
}

std::vector<std::int32_t> random_sample(const ModelSpec& s, Rng& rng) {
  std::vector<std::int32_t> ids(s.seq_len);
  for (auto& id : ids) id = static_cast<std::int32_t>(rng.below(s.vocab_size));
  return ids;
}

template <class T>
T& layer_as(ModelGraph& m, std::string_view kind) {
  for (std::size_t i = 0; i < m.layer_count(); ++i)
    if (m.layer(i).kind() == kind) return dynamic_cast<T&>(m.layer(i));
  FAIL("no layer of kind " << kind);
  throw;
}

}  // namespace

TEST_CASE("parameter counts follow tensor arithmetic") {
  ModelSpec spec;
  spec.arch = ArchId::lstm_embed;
  Rng rng(1);
  const ModelGraph m = build_model(spec, rng);
  const std::size_t v = 32, e = 128, u = 16, c = 5;
  const std::size_t oracle = v * e + 4 * ((e + u) * u + u) + (u * c + c);
  CHECK(oracle == 13461);
  CHECK(count_params(m) == oracle);

  spec.arch = ArchId::bilstm_embed;
  CHECK(count_params(build_model(spec, rng)) == v * e + 2 * 4 * ((e + u) * u + u) + (2 * u * c + c));
  spec.arch = ArchId::lstm_plain;
  CHECK(count_params(build_model(spec, rng)) == 4 * ((v + u) * u + u) + (u * c + c));
}

TEST_CASE("cnn variant shapes at the selected parameters") {
  ModelSpec spec;
  Rng rng(2);
  const ModelGraph m = build_model(spec, rng);
  std::vector<std::string> kinds;
  for (std::size_t i = 0; i < m.layer_count(); ++i) kinds.emplace_back(m.layer(i).kind());
  CHECK(kinds == std::vector<std::string>{"embedding", "dropout", "conv1d", "maxpool1d", "bilstm", "dropout", "dense"});
  const auto& shapes = m.layer_shapes();
  CHECK(shapes[2] == Shape{1998, 128});
  CHECK(shapes[3] == Shape{999, 128});
  CHECK(shapes[4] == Shape{32});
  CHECK(shapes.back() == Shape{5});
}

TEST_CASE("every architecture emits a distribution") {
  Rng rng(3);
  for (ArchId arch : kAllArchs) {
    INFO(arch_name(arch));
    const ModelSpec spec = small_spec(arch);
    ModelGraph m = build_model(spec, rng);
    for (int trial = 0; trial < 5; ++trial) {
      const Tensor p = m.forward(random_sample(spec, rng), Mode::train, rng);
      REQUIRE(p.size() == 4);
      double s = 0.0;
      for (double v : p.data()) {
        CHECK(v >= 0.0);
        s += v;
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    const std::vector<std::int32_t> pad(spec.seq_len, 0);
    CHECK(m.forward(pad, Mode::eval, rng).all_finite());
    const auto x = random_sample(spec, rng);
    CHECK(m.forward(x, Mode::eval, rng) == m.forward(x, Mode::eval, rng));
    const std::vector<std::int32_t> short_ids(spec.seq_len - 1, 1);
    CHECK_THROWS_AS(m.forward(short_ids, Mode::eval, rng), DimensionError);
  }
}

TEST_CASE("construction is seed deterministic") {
  const ModelSpec spec = small_spec(ArchId::bilstm_embed_cnn);
  Rng a(5), b(5), c(6);
  const ModelGraph ma = build_model(spec, a), mb = build_model(spec, b), mc = build_model(spec, c);
  const auto pa = ma.parameters(), pb = mb.parameters(), pc = mc.parameters();
  REQUIRE(pa.size() == pc.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(*pa[i].value == *pb[i].value);
    if (pa[i].name.find("/b") == std::string::npos) CHECK_FALSE(*pa[i].value == *pc[i].value);
  }
}

TEST_CASE("bilstm with a silent backward pass reduces to lstm") {
  Rng rng(7);
  ModelSpec ls = small_spec(ArchId::lstm_embed);
  ModelSpec bs = small_spec(ArchId::bilstm_embed);
  ModelGraph lm = build_model(ls, rng);
  ModelGraph bm = build_model(bs, rng);

  layer_as<EmbeddingLayer>(bm, "embedding").table() = layer_as<EmbeddingLayer>(lm, "embedding").table();
  auto& bi = layer_as<BilstmLayer>(bm, "bilstm");
  bi.forward_params() = layer_as<LstmLayer>(lm, "lstm").lstm();
  for (Tensor* t : bi.backward_params().tensors()) t->fill(0.0);
  auto& ld = layer_as<DenseLayer>(lm, "dense");
  auto& bd = layer_as<DenseLayer>(bm, "dense");
  const std::size_t u = ls.lstm_units;
  for (std::size_t j = 0; j < ls.num_classes; ++j) {
    for (std::size_t i = 0; i < u; ++i) {
      bd.weights()(i, j) = ld.weights()(i, j);
      bd.weights()(u + i, j) = 0.0;
    }
    bd.bias()[j] = ld.bias()[j];
  }
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_sample(ls, rng);
    CHECK(opseq::testing::max_abs_diff(lm.forward(x, Mode::eval, rng), bm.forward(x, Mode::eval, rng)) < 1e-9);
  }
}

TEST_CASE("checkpoint round-trip is bit exact") {
  Rng rng(9);
  for (ArchId arch : kAllArchs) {
    INFO(arch_name(arch));
    ModelSpec spec = small_spec(arch);
    spec.dropout_rate = 0.15;
    ModelGraph m = build_model(spec, rng);
    std::stringstream buf;
    write_checkpoint(buf, m);
    const std::string bytes = buf.str();
    CHECK(bytes.rfind("opseq-ckpt v1\n", 0) == 0);
    CHECK(bytes.find("arch=" + std::string(arch_name(arch))) != std::string::npos);
    std::istringstream in(bytes);
    ModelGraph back = read_checkpoint(in);
    std::stringstream again;
    write_checkpoint(again, back);
    CHECK(again.str() == bytes);
    CHECK(back.spec().dropout_rate == 0.15);
    for (int t = 0; t < 3; ++t) {
      const auto x = random_sample(spec, rng);
      CHECK(m.forward(x, Mode::eval, rng) == back.forward(x, Mode::eval, rng));
    }
  }
}

TEST_CASE("malformed checkpoints are rejected") {
  Rng rng(4);
  const ModelGraph m = build_model(small_spec(ArchId::lstm_embed), rng);
  std::stringstream buf;
  write_checkpoint(buf, m);
  const std::string bytes = buf.str();
  {
    std::istringstream in("not a checkpoint\n");
    CHECK_THROWS_AS(read_checkpoint(in), FormatError);
  }
  {
    std::istringstream in(bytes.substr(0, bytes.size() - 9));
    CHECK_THROWS_AS(read_checkpoint(in), FormatError);
  }
}

TEST_CASE("arch names and spec fields") {
  for (ArchId a : kAllArchs) CHECK(parse_arch(arch_name(a)) == a);
  try {
    (void)parse_arch("transformer");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bilstm_embed_cnn") != std::string::npos);
  }
  ModelSpec s;
  CHECK(s.set_field("lstm_units", "64"));
  CHECK(s.set_field("dropout_rate", "0.1"));
  CHECK_FALSE(s.set_field("bogus", "1"));
  ModelSpec t;
  for (const auto& [k, v] : s.fields()) CHECK(t.set_field(k, v));
  CHECK(t.fields() == s.fields());
  s.dropout_rate = 1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("too-short sequences are rejected at build") {
  ModelSpec s = small_spec(ArchId::bilstm_embed_cnn);
  s.seq_len = 2;
  Rng rng(1);
  CHECK_THROWS_AS(build_model(s, rng), InputError);
}
