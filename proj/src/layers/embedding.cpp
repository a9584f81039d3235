#include "opseq/layers/embedding.hpp"

#include <string>

#include "opseq/error.hpp"
#include "opseq/layers/init.hpp"
#include "opseq/ndcore/kernels.hpp"

namespace opseq {

EmbeddingTable EmbeddingTable::random(std::size_t vocab_size, std::size_t embed_dim, Rng& rng) {
  EmbeddingTable t{uniform_tensor({vocab_size, embed_dim}, -0.05, 0.05, rng)};
  t.validate();
  return t;
}

void EmbeddingTable::validate() const {
  if (matrix.rank() != 2) throw DimensionError("embedding table must be a matrix, got " + shape_string(matrix.shape()));
  if (matrix.dim(0) < 2) throw ConfigError("embedding vocabulary needs PAD plus at least one symbol");
}

namespace {

std::size_t checked_id(std::int32_t id, std::size_t vocab_size) {
  if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
    throw VocabError("token id " + std::to_string(id) + " outside vocabulary of size " + std::to_string(vocab_size));
  }
  return static_cast<std::size_t>(id);
}

}  // namespace

Tensor embedding_forward(std::span<const std::int32_t> ids, const EmbeddingTable& table) {
  if (ids.empty()) throw EmptyInputError("embedding lookup of an empty sequence");
  const std::size_t dim = table.embed_dim();
  Tensor out({ids.size(), dim});
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const auto src = table.matrix.row(checked_id(ids[t], table.vocab_size()));
    std::copy(src.begin(), src.end(), out.row(t).begin());
  }
  return out;
}

void embedding_backward(std::span<const std::int32_t> ids, const Tensor& grad_out, Tensor& grad_table) {
  if (grad_out.rank() != 2 || grad_out.dim(0) != ids.size() || grad_out.dim(1) != grad_table.dim(1)) {
    throw DimensionError("embedding gradient " + shape_string(grad_out.shape()) + " does not match " +
                         std::to_string(ids.size()) + " ids into table " + shape_string(grad_table.shape()));
  }
  const std::size_t dim = grad_table.dim(1);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const std::size_t row = checked_id(ids[t], grad_table.dim(0));
    kernels::axpy(1.0, grad_out.row(t).data(), grad_table.row(row).data(), dim);
  }
}

}  // namespace opseq
