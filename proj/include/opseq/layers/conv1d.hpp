#pragma once

#include <vector>

#include "opseq/ndcore/tensor.hpp"

namespace opseq {

// Valid (unpadded) cross-correlation followed by ReLU.
//   seq: L x in_ch, filters: kernel x in_ch x out_ch, bias: out_ch
//   result: (L - kernel + 1) x out_ch
Tensor conv1d_forward(const Tensor& seq, const Tensor& filters, const Tensor& bias);

struct Conv1dBackward {
  Tensor d_seq;
  Tensor d_filters;
  Tensor d_bias;
};

// `output` is the post-ReLU result of conv1d_forward.
Conv1dBackward conv1d_backward(const Tensor& seq, const Tensor& filters, const Tensor& output, const Tensor& d_out);

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel);

struct MaxPoolResult {
  Tensor pooled;                   // floor(L / pool) x ch
  std::vector<std::size_t> argmax; // flat source index per pooled element
  Shape input_shape;
};

// Non-overlapping windows; trailing remainder dropped; ties pick the first index.
MaxPoolResult maxpool1d_forward(const Tensor& seq, std::size_t pool);
Tensor maxpool1d(const Tensor& seq, std::size_t pool);
Tensor maxpool1d_backward(const MaxPoolResult& forward, const Tensor& d_out);

std::size_t maxpool1d_output_length(std::size_t length, std::size_t pool);

}  // namespace opseq
