#include "opseq/layers/layer.hpp"

#include <cmath>

#include "opseq/error.hpp"
#include "opseq/layers/dropout.hpp"
#include "opseq/layers/init.hpp"

namespace opseq {

Tensor glorot_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return uniform_tensor(std::move(shape), -limit, limit, rng);
}

Tensor uniform_tensor(Shape shape, double lo, double hi, Rng& rng) {
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

void Layer::zero_grads() {
  for (auto& p : params()) p.grad->fill(0.0);
}

std::vector<std::int32_t> ids_from_tensor(const Tensor& t, std::size_t vocab_size) {
  std::vector<std::int32_t> ids(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double v = t[i];
    if (!(v >= 0 && v < static_cast<double>(vocab_size)) || v != std::floor(v)) {
      throw VocabError("token id " + std::to_string(v) + " outside vocabulary of size " + std::to_string(vocab_size));
    }
    ids[i] = static_cast<std::int32_t>(v);
  }
  return ids;
}

namespace {

void expect_rank(const Shape& s, std::size_t rank, std::string_view who) {
  if (s.size() != rank) {
    throw DimensionError(std::string(who) + " expects a rank-" + std::to_string(rank) + " input, got " +
                         shape_string(s));
  }
}

std::vector<ParamSlot> lstm_slots(const std::string& prefix, LstmParams& value, LstmParams& grad) {
  std::vector<ParamSlot> slots;
  auto v = value.tensors();
  auto g = grad.tensors();
  for (std::size_t k = 0; k < v.size(); ++k) slots.push_back({prefix + std::string(LstmParams::kNames[k]), v[k], g[k]});
  return slots;
}

LstmParams zeros_like(const LstmParams& p) { return LstmParams::zeros(p.input_dim(), p.hidden_dim()); }

void accumulate(LstmParams& into, const LstmParams& from) {
  auto a = into.tensors();
  auto b = from.tensors();
  for (std::size_t k = 0; k < a.size(); ++k) a[k]->add(*b[k]);
}

}  // namespace

// ---------------------------------------------------------------------------

ScaledIdsInput::ScaledIdsInput(std::string name, std::size_t vocab_size)
    : Layer(std::move(name)), vocab_size_(vocab_size) {
  if (vocab_size < 2) throw ConfigError("vocabulary must hold PAD plus at least one symbol");
}

Shape ScaledIdsInput::output_shape(const Shape& input) const {
  expect_rank(input, 1, "scaled id input");
  return input;
}

Tensor ScaledIdsInput::forward(const Tensor& input, Mode, Rng&) {
  ids_from_tensor(input, vocab_size_);
  Tensor x = input;
  x.scale(1.0 / static_cast<double>(vocab_size_ - 1));
  return x;
}

Tensor ScaledIdsInput::backward(const Tensor& grad_output) { return Tensor(grad_output.shape()); }

OneHotInput::OneHotInput(std::string name, std::size_t vocab_size) : Layer(std::move(name)), vocab_size_(vocab_size) {
  if (vocab_size < 2) throw ConfigError("vocabulary must hold PAD plus at least one symbol");
}

Shape OneHotInput::output_shape(const Shape& input) const {
  expect_rank(input, 1, "one-hot input");
  return {input[0], vocab_size_};
}

Tensor OneHotInput::forward(const Tensor& input, Mode, Rng&) {
  const auto ids = ids_from_tensor(input, vocab_size_);
  Tensor x({ids.size(), vocab_size_});
  for (std::size_t t = 0; t < ids.size(); ++t) x(t, static_cast<std::size_t>(ids[t])) = 1.0;
  return x;
}

Tensor OneHotInput::backward(const Tensor& grad_output) { return Tensor({grad_output.dim(0)}); }

// ---------------------------------------------------------------------------

EmbeddingLayer::EmbeddingLayer(std::string name, std::size_t vocab_size, std::size_t embed_dim, Rng& rng)
    : Layer(std::move(name)), table_(EmbeddingTable::random(vocab_size, embed_dim, rng)), grad_({vocab_size, embed_dim}) {}

Shape EmbeddingLayer::output_shape(const Shape& input) const {
  expect_rank(input, 1, "embedding");
  return {input[0], table_.embed_dim()};
}

Tensor EmbeddingLayer::forward(const Tensor& input, Mode, Rng&) {
  ids_ = ids_from_tensor(input, table_.vocab_size());
  return embedding_forward(ids_, table_);
}

Tensor EmbeddingLayer::backward(const Tensor& grad_output) {
  embedding_backward(ids_, grad_output, grad_);
  return Tensor({ids_.size()});
}

std::vector<ParamSlot> EmbeddingLayer::params() { return {{name() + "/table", &table_.matrix, &grad_}}; }

// ---------------------------------------------------------------------------

DropoutLayer::DropoutLayer(std::string name, double rate) : Layer(std::move(name)), rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
}

Tensor DropoutLayer::forward(const Tensor& input, Mode mode, Rng& rng) {
  return dropout(input, rate_, mode, rng, &mask_);
}

Tensor DropoutLayer::backward(const Tensor& grad_output) { return dropout_backward(mask_, grad_output); }

// ---------------------------------------------------------------------------

LstmLayer::LstmLayer(std::string name, std::size_t input_dim, std::size_t units, Rng& rng)
    : Layer(std::move(name)), params_(LstmParams::random(input_dim, units, rng)), grads_(zeros_like(params_)) {}

Shape LstmLayer::output_shape(const Shape& input) const {
  expect_rank(input, 2, "lstm");
  if (input[1] != params_.input_dim()) {
    throw DimensionError("lstm expects " + std::to_string(params_.input_dim()) + " features, got " +
                         shape_string(input));
  }
  return {params_.hidden_dim()};
}

Tensor LstmLayer::forward(const Tensor& input, Mode, Rng&) { return lstm_forward(input, params_, &trace_).last_h; }

Tensor LstmLayer::backward(const Tensor& grad_output) {
  LstmBackward g = lstm_backward(trace_, params_, grad_output);
  accumulate(grads_, g.grads);
  return std::move(g.d_seq);
}

std::vector<ParamSlot> LstmLayer::params() { return lstm_slots(name() + "/", params_, grads_); }

BilstmLayer::BilstmLayer(std::string name, std::size_t input_dim, std::size_t units, Rng& rng)
    : Layer(std::move(name)),
      fwd_(LstmParams::random(input_dim, units, rng)),
      bwd_(LstmParams::random(input_dim, units, rng)),
      grad_fwd_(zeros_like(fwd_)),
      grad_bwd_(zeros_like(bwd_)) {}

Shape BilstmLayer::output_shape(const Shape& input) const {
  expect_rank(input, 2, "bilstm");
  if (input[1] != fwd_.input_dim()) {
    throw DimensionError("bilstm expects " + std::to_string(fwd_.input_dim()) + " features, got " +
                         shape_string(input));
  }
  return {2 * fwd_.hidden_dim()};
}

Tensor BilstmLayer::forward(const Tensor& input, Mode, Rng&) { return bilstm_forward(input, fwd_, bwd_, &trace_); }

Tensor BilstmLayer::backward(const Tensor& grad_output) {
  BilstmBackward g = bilstm_backward(trace_, fwd_, bwd_, grad_output);
  accumulate(grad_fwd_, g.d_fwd);
  accumulate(grad_bwd_, g.d_bwd);
  return std::move(g.d_seq);
}

std::vector<ParamSlot> BilstmLayer::params() {
  auto slots = lstm_slots(name() + "/fwd/", fwd_, grad_fwd_);
  auto back = lstm_slots(name() + "/bwd/", bwd_, grad_bwd_);
  slots.insert(slots.end(), back.begin(), back.end());
  return slots;
}

// ---------------------------------------------------------------------------

Conv1dLayer::Conv1dLayer(std::string name, std::size_t in_channels, std::size_t filters, std::size_t kernel, Rng& rng)
    : Layer(std::move(name)),
      filters_(glorot_uniform({kernel, in_channels, filters}, kernel * in_channels, kernel * filters, rng)),
      bias_({filters}),
      grad_filters_({kernel, in_channels, filters}),
      grad_bias_({filters}) {}

Shape Conv1dLayer::output_shape(const Shape& input) const {
  expect_rank(input, 2, "conv1d");
  if (input[1] != filters_.dim(1)) {
    throw DimensionError("conv1d expects " + std::to_string(filters_.dim(1)) + " channels, got " +
                         shape_string(input));
  }
  return {conv1d_output_length(input[0], filters_.dim(0)), filters_.dim(2)};
}

Tensor Conv1dLayer::forward(const Tensor& input, Mode, Rng&) {
  input_ = input;
  output_ = conv1d_forward(input, filters_, bias_);
  return output_;
}

Tensor Conv1dLayer::backward(const Tensor& grad_output) {
  Conv1dBackward g = conv1d_backward(input_, filters_, output_, grad_output);
  grad_filters_.add(g.d_filters);
  grad_bias_.add(g.d_bias);
  return std::move(g.d_seq);
}

std::vector<ParamSlot> Conv1dLayer::params() {
  return {{name() + "/filters", &filters_, &grad_filters_}, {name() + "/bias", &bias_, &grad_bias_}};
}

MaxPool1dLayer::MaxPool1dLayer(std::string name, std::size_t pool) : Layer(std::move(name)), pool_(pool) {
  if (pool == 0) throw ConfigError("pool size must be positive");
}

Shape MaxPool1dLayer::output_shape(const Shape& input) const {
  expect_rank(input, 2, "maxpool1d");
  return {maxpool1d_output_length(input[0], pool_), input[1]};
}

Tensor MaxPool1dLayer::forward(const Tensor& input, Mode, Rng&) {
  cache_ = maxpool1d_forward(input, pool_);
  return cache_.pooled;
}

Tensor MaxPool1dLayer::backward(const Tensor& grad_output) { return maxpool1d_backward(cache_, grad_output); }

// ---------------------------------------------------------------------------

DenseLayer::DenseLayer(std::string name, std::size_t in, std::size_t out, Activation activation, Rng& rng)
    : Layer(std::move(name)),
      activation_(activation),
      w_(glorot_uniform({in, out}, in, out, rng)),
      b_({out}),
      grad_w_({in, out}),
      grad_b_({out}) {}

Shape DenseLayer::output_shape(const Shape& input) const {
  if (shape_volume(input) != w_.dim(0)) {
    throw DimensionError("dense expects " + std::to_string(w_.dim(0)) + " inputs, got " + shape_string(input));
  }
  return {w_.dim(1)};
}

Tensor DenseLayer::forward(const Tensor& input, Mode, Rng&) {
  input_ = input;
  output_ = dense_forward(input, w_, b_, activation_);
  return output_;
}

Tensor DenseLayer::backward(const Tensor& grad_output) {
  DenseBackward g = dense_backward(input_, w_, output_, activation_, grad_output);
  grad_w_.add(g.d_w);
  grad_b_.add(g.d_b);
  return std::move(g.d_x);
}

std::vector<ParamSlot> DenseLayer::params() {
  return {{name() + "/W", &w_, &grad_w_}, {name() + "/b", &b_, &grad_b_}};
}

}  // namespace opseq
