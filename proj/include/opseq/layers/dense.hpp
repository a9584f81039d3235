#pragma once

#include <string_view>

#include "opseq/ndcore/tensor.hpp"

namespace opseq {

enum class Activation { none, relu, softmax };

std::string_view activation_name(Activation a);

// activation(x W + b); x is read flattened, so any shape with `in` elements works.
Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b, Activation activation);

struct DenseBackward {
  Tensor d_x;  // same shape as x
  Tensor d_w;
  Tensor d_b;
};

DenseBackward dense_backward(const Tensor& x, const Tensor& w, const Tensor& output, Activation activation,
                             const Tensor& d_out);

}  // namespace opseq
