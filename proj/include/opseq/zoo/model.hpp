#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "opseq/layers/layer.hpp"
#include "opseq/ndcore/tensor.hpp"
#include "opseq/rng.hpp"

namespace opseq {

enum class ArchId { mlp_only, lstm_plain, lstm_embed, bilstm_embed, bilstm_embed_cnn };

inline constexpr std::array<ArchId, 5> kAllArchs{ArchId::mlp_only, ArchId::lstm_plain, ArchId::lstm_embed,
                                                 ArchId::bilstm_embed, ArchId::bilstm_embed_cnn};

std::string_view arch_name(ArchId arch);
// Throws ConfigError listing the valid names.
ArchId parse_arch(std::string_view name);
std::string valid_arch_names();

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct ModelSpec {
  ArchId arch = ArchId::bilstm_embed_cnn;
  std::size_t num_classes = 5;
  std::size_t vocab_size = 32;  // PAD + 30 opcodes + OTHER
  std::size_t seq_len = 2000;
  std::size_t embed_dim = 128;
  std::size_t lstm_units = 16;
  std::size_t conv_filters = 128;
  std::size_t conv_kernel = 3;
  std::size_t pool_size = 2;
  double dropout_rate = 0.3;
  std::size_t mlp_hidden = 128;

  void validate() const;

  // Stable key=value rendering used by checkpoints and config files.
  KeyValues fields() const;
  // Applies one key; returns false for keys this struct does not own.
  bool set_field(std::string_view key, std::string_view value);
};

struct NamedTensor {
  std::string name;
  const Tensor* value;
};

// Ordered stack of layers ending in a softmax over num_classes.
class ModelGraph {
 public:
  ModelGraph(ModelSpec spec, std::vector<std::unique_ptr<Layer>> layers);
  ModelGraph(const ModelGraph& other);
  ModelGraph& operator=(const ModelGraph& other);
  ModelGraph(ModelGraph&&) noexcept = default;
  ModelGraph& operator=(ModelGraph&&) noexcept = default;

  const ModelSpec& spec() const { return spec_; }
  ArchId arch() const { return spec_.arch; }
  std::size_t layer_count() const { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  // Output shape of every layer for a {seq_len} input.
  const std::vector<Shape>& layer_shapes() const { return shapes_; }

  std::vector<ParamSlot> params();
  std::vector<NamedTensor> parameters() const;

  Tensor forward(std::span<const std::int32_t> ids, Mode mode, Rng& rng);

  // Forward + backward for one labelled sample. Gradients of weight * loss are
  // added to the parameter gradients. Returns the unweighted loss.
  double accumulate_gradients(std::span<const std::int32_t> ids, std::size_t label, Mode mode, Rng& rng,
                              double weight = 1.0, Tensor* probs = nullptr);

  void zero_grads();
  std::vector<Tensor> snapshot() const;
  void restore(const std::vector<Tensor>& values);

 private:
  ModelSpec spec_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<Shape> shapes_;
};

ModelGraph build_model(const ModelSpec& spec, Rng& rng);
Tensor forward(ModelGraph& model, std::span<const std::int32_t> ids, Mode mode, Rng& rng);
std::size_t count_params(const ModelGraph& model);

}  // namespace opseq
