#pragma once

#include <cstdint>
#include <span>

#include "opseq/ndcore/tensor.hpp"
#include "opseq/rng.hpp"

namespace opseq {

// Lookup table mapping token ids to dense rows; id 0 (PAD) is an ordinary row.
struct EmbeddingTable {
  Tensor matrix;  // vocab_size x embed_dim

  std::size_t vocab_size() const { return matrix.dim(0); }
  std::size_t embed_dim() const { return matrix.dim(1); }

  // Rows drawn uniformly from [-0.05, 0.05].
  static EmbeddingTable random(std::size_t vocab_size, std::size_t embed_dim, Rng& rng);
  void validate() const;
};

// Output row t is table.matrix[ids[t]]. Throws VocabError for an id outside
// [0, vocab_size).
Tensor embedding_forward(std::span<const std::int32_t> ids, const EmbeddingTable& table);

// Scatter-adds grad_out rows into grad_table; repeated ids accumulate.
void embedding_backward(std::span<const std::int32_t> ids, const Tensor& grad_out, Tensor& grad_table);

}  // namespace opseq
