#include "opseq/zoo/model.hpp"

#include "opseq/error.hpp"
#include "opseq/io.hpp"
#include "opseq/ndcore/ops.hpp"

namespace opseq {

std::string_view arch_name(ArchId arch) {
  switch (arch) {
    case ArchId::mlp_only: return "mlp_only";
    case ArchId::lstm_plain: return "lstm_plain";
    case ArchId::lstm_embed: return "lstm_embed";
    case ArchId::bilstm_embed: return "bilstm_embed";
    case ArchId::bilstm_embed_cnn: return "bilstm_embed_cnn";
  }
  return "unknown";
}

std::string valid_arch_names() {
  std::string names;
  for (ArchId a : kAllArchs) {
    if (!names.empty()) names += ", ";
    names += arch_name(a);
  }
  return names;
}

ArchId parse_arch(std::string_view name) {
  for (ArchId a : kAllArchs) {
    if (arch_name(a) == name) return a;
  }
  throw ConfigError("unknown architecture '" + std::string(name) + "'; valid: " + valid_arch_names());
}

void ModelSpec::validate() const {
  auto positive = [](std::size_t v, const char* what) {
    if (v == 0) throw ConfigError(std::string(what) + " must be positive");
  };
  if (num_classes < 2) throw ConfigError("num_classes must be at least 2");
  if (vocab_size < 2) throw ConfigError("vocab_size must hold PAD plus at least one symbol");
  positive(seq_len, "seq_len");
  positive(embed_dim, "embed_dim");
  positive(lstm_units, "lstm_units");
  positive(conv_filters, "conv_filters");
  positive(conv_kernel, "conv_kernel");
  positive(pool_size, "pool_size");
  positive(mlp_hidden, "mlp_hidden");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout_rate must lie in [0, 1)");
}

KeyValues ModelSpec::fields() const {
  return {
      {"arch", std::string(arch_name(arch))},
      {"num_classes", std::to_string(num_classes)},
      {"vocab_size", std::to_string(vocab_size)},
      {"seq_len", std::to_string(seq_len)},
      {"embed_dim", std::to_string(embed_dim)},
      {"lstm_units", std::to_string(lstm_units)},
      {"conv_filters", std::to_string(conv_filters)},
      {"conv_kernel", std::to_string(conv_kernel)},
      {"pool_size", std::to_string(pool_size)},
      {"dropout_rate", format_double(dropout_rate)},
      {"mlp_hidden", std::to_string(mlp_hidden)},
  };
}

bool ModelSpec::set_field(std::string_view key, std::string_view value) {
  if (key == "arch") arch = parse_arch(trim(value));
  else if (key == "num_classes") num_classes = parse_size(value, key);
  else if (key == "vocab_size") vocab_size = parse_size(value, key);
  else if (key == "seq_len") seq_len = parse_size(value, key);
  else if (key == "embed_dim") embed_dim = parse_size(value, key);
  else if (key == "lstm_units") lstm_units = parse_size(value, key);
  else if (key == "conv_filters") conv_filters = parse_size(value, key);
  else if (key == "conv_kernel") conv_kernel = parse_size(value, key);
  else if (key == "pool_size") pool_size = parse_size(value, key);
  else if (key == "dropout_rate") dropout_rate = parse_double(value, key);
  else if (key == "mlp_hidden") mlp_hidden = parse_size(value, key);
  else return false;
  return true;
}

// ---------------------------------------------------------------------------

ModelGraph::ModelGraph(ModelSpec spec, std::vector<std::unique_ptr<Layer>> layers)
    : spec_(std::move(spec)), layers_(std::move(layers)) {
  Shape shape{spec_.seq_len};
  for (const auto& layer : layers_) {
    shape = layer->output_shape(shape);
    shapes_.push_back(shape);
  }
  if (layers_.empty() || shapes_.back() != Shape{spec_.num_classes}) {
    throw DimensionError("model must end in a " + std::to_string(spec_.num_classes) + "-way output");
  }
}

ModelGraph::ModelGraph(const ModelGraph& other) : spec_(other.spec_), shapes_(other.shapes_) {
  layers_.reserve(other.layers_.size());
  for (const auto& layer : other.layers_) layers_.push_back(layer->clone());
}

ModelGraph& ModelGraph::operator=(const ModelGraph& other) {
  if (this != &other) *this = ModelGraph(other);
  return *this;
}

std::vector<ParamSlot> ModelGraph::params() {
  std::vector<ParamSlot> all;
  for (auto& layer : layers_) {
    auto p = layer->params();
    all.insert(all.end(), p.begin(), p.end());
  }
  return all;
}

std::vector<NamedTensor> ModelGraph::parameters() const {
  std::vector<NamedTensor> out;
  // Layer::params() hands out mutable slots; only the values are read here.
  for (const auto& slot : const_cast<ModelGraph*>(this)->params()) out.push_back({slot.name, slot.value});
  return out;
}

Tensor ModelGraph::forward(std::span<const std::int32_t> ids, Mode mode, Rng& rng) {
  if (ids.size() != spec_.seq_len) {
    throw DimensionError("sample length " + std::to_string(ids.size()) + " does not match model seq_len " +
                         std::to_string(spec_.seq_len));
  }
  Tensor x({ids.size()});
  for (std::size_t i = 0; i < ids.size(); ++i) x[i] = static_cast<double>(ids[i]);
  for (auto& layer : layers_) x = layer->forward(x, mode, rng);
  return x;
}

double ModelGraph::accumulate_gradients(std::span<const std::int32_t> ids, std::size_t label, Mode mode, Rng& rng,
                                        double weight, Tensor* probs) {
  Tensor out = forward(ids, mode, rng);
  const double loss = cross_entropy(out, label);
  Tensor grad = cross_entropy_grad(out, label);
  grad.scale(weight);
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) grad = (*it)->backward(grad);
  if (probs) *probs = std::move(out);
  return loss;
}

void ModelGraph::zero_grads() {
  for (auto& layer : layers_) layer->zero_grads();
}

std::vector<Tensor> ModelGraph::snapshot() const {
  std::vector<Tensor> values;
  for (const auto& p : parameters()) values.push_back(*p.value);
  return values;
}

void ModelGraph::restore(const std::vector<Tensor>& values) {
  auto slots = params();
  if (slots.size() != values.size()) throw DimensionError("snapshot does not match model parameters");
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].value->shape() != values[i].shape()) {
      throw DimensionError("snapshot tensor " + slots[i].name + " has shape " + shape_string(values[i].shape()));
    }
    *slots[i].value = values[i];
  }
}

// ---------------------------------------------------------------------------

ModelGraph build_model(const ModelSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<std::unique_ptr<Layer>> layers;
  const std::size_t classes = spec.num_classes;

  switch (spec.arch) {
    case ArchId::mlp_only:
      layers.push_back(std::make_unique<ScaledIdsInput>("input", spec.vocab_size));
      layers.push_back(std::make_unique<DenseLayer>("dense_0", spec.seq_len, spec.mlp_hidden, Activation::relu, rng));
      layers.push_back(std::make_unique<DropoutLayer>("dropout_0", spec.dropout_rate));
      layers.push_back(std::make_unique<DenseLayer>("dense_1", spec.mlp_hidden, classes, Activation::softmax, rng));
      break;
    case ArchId::lstm_plain:
      layers.push_back(std::make_unique<OneHotInput>("input", spec.vocab_size));
      layers.push_back(std::make_unique<DropoutLayer>("dropout_0", spec.dropout_rate));
      layers.push_back(std::make_unique<LstmLayer>("lstm", spec.vocab_size, spec.lstm_units, rng));
      layers.push_back(std::make_unique<DropoutLayer>("dropout_1", spec.dropout_rate));
      layers.push_back(std::make_unique<DenseLayer>("dense", spec.lstm_units, classes, Activation::softmax, rng));
      break;
    case ArchId::lstm_embed:
      layers.push_back(std::make_unique<EmbeddingLayer>("embedding", spec.vocab_size, spec.embed_dim, rng));
      layers.push_back(std::make_unique<DropoutLayer>("dropout_0", spec.dropout_rate));
      layers.push_back(std::make_unique<LstmLayer>("lstm", spec.embed_dim, spec.lstm_units, rng));
      layers.push_back(std::make_unique<DropoutLayer>("dropout_1", spec.dropout_rate));
      layers.push_back(std::make_unique<DenseLayer>("dense", spec.lstm_units, classes, Activation::softmax, rng));
      break;
    case ArchId::bilstm_embed:
      layers.push_back(std::make_unique<EmbeddingLayer>("embedding", spec.vocab_size, spec.embed_dim, rng));
      layers.push_back(std::make_unique<DropoutLayer>("dropout_0", spec.dropout_rate));
      layers.push_back(std::make_unique<BilstmLayer>("bilstm", spec.embed_dim, spec.lstm_units, rng));
      layers.push_back(std::make_unique<DropoutLayer>("dropout_1", spec.dropout_rate));
      layers.push_back(std::make_unique<DenseLayer>("dense", 2 * spec.lstm_units, classes, Activation::softmax, rng));
      break;
    case ArchId::bilstm_embed_cnn:
      layers.push_back(std::make_unique<EmbeddingLayer>("embedding", spec.vocab_size, spec.embed_dim, rng));
      layers.push_back(std::make_unique<DropoutLayer>("dropout_0", spec.dropout_rate));
      layers.push_back(
          std::make_unique<Conv1dLayer>("conv1d", spec.embed_dim, spec.conv_filters, spec.conv_kernel, rng));
      layers.push_back(std::make_unique<MaxPool1dLayer>("maxpool1d", spec.pool_size));
      layers.push_back(std::make_unique<BilstmLayer>("bilstm", spec.conv_filters, spec.lstm_units, rng));
      layers.push_back(std::make_unique<DropoutLayer>("dropout_1", spec.dropout_rate));
      layers.push_back(std::make_unique<DenseLayer>("dense", 2 * spec.lstm_units, classes, Activation::softmax, rng));
      break;
  }
  return ModelGraph(spec, std::move(layers));
}

Tensor forward(ModelGraph& model, std::span<const std::int32_t> ids, Mode mode, Rng& rng) {
  return model.forward(ids, mode, rng);
}

std::size_t count_params(const ModelGraph& model) {
  std::size_t total = 0;
  for (const auto& p : model.parameters()) total += p.value->size();
  return total;
}

}  // namespace opseq
