#pragma once

#include "opseq/ndcore/tensor.hpp"
#include "opseq/rng.hpp"

namespace opseq {

// Uniform in (-limit, limit) with limit = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng);
Tensor uniform_tensor(Shape shape, double lo, double hi, Rng& rng);

}  // namespace opseq
