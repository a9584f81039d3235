#pragma once

#include "opseq/layers/common.hpp"
#include "opseq/ndcore/tensor.hpp"
#include "opseq/rng.hpp"

namespace opseq {

// Inverted dropout. In train mode each element is zeroed with probability
// `rate` and survivors are scaled by 1 / (1 - rate); eval mode is the
// identity. When `mask` is given it receives the per-element multiplier.
Tensor dropout(const Tensor& x, double rate, Mode mode, Rng& rng, Tensor* mask = nullptr);

Tensor dropout_backward(const Tensor& mask, const Tensor& d_out);

}  // namespace opseq
