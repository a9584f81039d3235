#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "opseq/layers/common.hpp"
#include "opseq/layers/conv1d.hpp"
#include "opseq/layers/dense.hpp"
#include "opseq/layers/embedding.hpp"
#include "opseq/layers/lstm.hpp"
#include "opseq/ndcore/tensor.hpp"
#include "opseq/rng.hpp"

namespace opseq {

struct ParamSlot {
  std::string name;
  Tensor* value;
  Tensor* grad;
};

// A stage in a sequential model. forward() caches what backward() needs, so
// one instance handles one sample at a time. backward() accumulates into the
// parameter gradients and returns the gradient with respect to its input.
class Layer {
 public:
  explicit Layer(std::string name) : name_(std::move(name)) {}
  virtual ~Layer() = default;

  const std::string& name() const { return name_; }
  virtual std::string_view kind() const = 0;
  virtual Shape output_shape(const Shape& input) const = 0;
  virtual Tensor forward(const Tensor& input, Mode mode, Rng& rng) = 0;
  virtual Tensor backward(const Tensor& grad_output) = 0;
  virtual std::vector<ParamSlot> params() { return {}; }
  virtual std::unique_ptr<Layer> clone() const = 0;

  void zero_grads();

 protected:
  Layer(const Layer&) = default;

 private:
  std::string name_;
};

// Token ids carried in a rank-1 tensor are converted back with range checks.
std::vector<std::int32_t> ids_from_tensor(const Tensor& t, std::size_t vocab_size);

// ids / (vocab_size - 1), kept as one flat vector.
class ScaledIdsInput final : public Layer {
 public:
  ScaledIdsInput(std::string name, std::size_t vocab_size);
  std::string_view kind() const override { return "scaled_ids"; }
  Shape output_shape(const Shape& input) const override;
  Tensor forward(const Tensor& input, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& grad_output) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ScaledIdsInput>(*this); }

 private:
  std::size_t vocab_size_;
};

// One-hot row of width vocab_size per timestep.
class OneHotInput final : public Layer {
 public:
  OneHotInput(std::string name, std::size_t vocab_size);
  std::string_view kind() const override { return "one_hot"; }
  Shape output_shape(const Shape& input) const override;
  Tensor forward(const Tensor& input, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& grad_output) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<OneHotInput>(*this); }

 private:
  std::size_t vocab_size_;
};

class EmbeddingLayer final : public Layer {
 public:
  EmbeddingLayer(std::string name, std::size_t vocab_size, std::size_t embed_dim, Rng& rng);
  std::string_view kind() const override { return "embedding"; }
  Shape output_shape(const Shape& input) const override;
  Tensor forward(const Tensor& input, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<ParamSlot> params() override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<EmbeddingLayer>(*this); }

  EmbeddingTable& table() { return table_; }

 private:
  EmbeddingTable table_;
  Tensor grad_;
  std::vector<std::int32_t> ids_;
};

class DropoutLayer final : public Layer {
 public:
  DropoutLayer(std::string name, double rate);
  std::string_view kind() const override { return "dropout"; }
  Shape output_shape(const Shape& input) const override { return input; }
  Tensor forward(const Tensor& input, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& grad_output) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<DropoutLayer>(*this); }

  double rate() const { return rate_; }

 private:
  double rate_;
  Tensor mask_;
};

// Emits the last hidden state only.
class LstmLayer final : public Layer {
 public:
  LstmLayer(std::string name, std::size_t input_dim, std::size_t units, Rng& rng);
  std::string_view kind() const override { return "lstm"; }
  Shape output_shape(const Shape& input) const override;
  Tensor forward(const Tensor& input, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<ParamSlot> params() override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<LstmLayer>(*this); }

  LstmParams& lstm() { return params_; }

 private:
  LstmParams params_;
  LstmParams grads_;
  LstmTrace trace_;
};

// Concatenated final states of a forward and a reversed pass.
class BilstmLayer final : public Layer {
 public:
  BilstmLayer(std::string name, std::size_t input_dim, std::size_t units, Rng& rng);
  std::string_view kind() const override { return "bilstm"; }
  Shape output_shape(const Shape& input) const override;
  Tensor forward(const Tensor& input, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<ParamSlot> params() override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<BilstmLayer>(*this); }

  LstmParams& forward_params() { return fwd_; }
  LstmParams& backward_params() { return bwd_; }

 private:
  LstmParams fwd_, bwd_;
  LstmParams grad_fwd_, grad_bwd_;
  BilstmTrace trace_;
};

class Conv1dLayer final : public Layer {
 public:
  Conv1dLayer(std::string name, std::size_t in_channels, std::size_t filters, std::size_t kernel, Rng& rng);
  std::string_view kind() const override { return "conv1d"; }
  Shape output_shape(const Shape& input) const override;
  Tensor forward(const Tensor& input, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<ParamSlot> params() override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv1dLayer>(*this); }

 private:
  Tensor filters_, bias_;
  Tensor grad_filters_, grad_bias_;
  Tensor input_, output_;
};

class MaxPool1dLayer final : public Layer {
 public:
  MaxPool1dLayer(std::string name, std::size_t pool);
  std::string_view kind() const override { return "maxpool1d"; }
  Shape output_shape(const Shape& input) const override;
  Tensor forward(const Tensor& input, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& grad_output) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPool1dLayer>(*this); }

 private:
  std::size_t pool_;
  MaxPoolResult cache_;
};

class DenseLayer final : public Layer {
 public:
  DenseLayer(std::string name, std::size_t in, std::size_t out, Activation activation, Rng& rng);
  std::string_view kind() const override { return "dense"; }
  Shape output_shape(const Shape& input) const override;
  Tensor forward(const Tensor& input, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<ParamSlot> params() override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<DenseLayer>(*this); }

  Tensor& weights() { return w_; }
  Tensor& bias() { return b_; }
  Activation activation() const { return activation_; }

 private:
  Activation activation_;
  Tensor w_, b_;
  Tensor grad_w_, grad_b_;
  Tensor input_, output_;
};

}  // namespace opseq
