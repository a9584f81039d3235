#pragma once

#include <cstddef>

#include "opseq/ndcore/tensor.hpp"

namespace opseq {

// Matrix product of rank-2 tensors. Throws DimensionError naming both shapes.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& m);

Tensor sigmoid(const Tensor& x);
Tensor tanh_act(const Tensor& x);
Tensor relu(const Tensor& x);

double sigmoid(double x);

// Numerically stable softmax over all elements (max-subtracted).
Tensor softmax(const Tensor& logits);

inline constexpr double kProbabilityFloor = 1e-12;

// -ln(probs[label]) with the probability clamped to kProbabilityFloor.
double cross_entropy(const Tensor& probs, std::size_t label);
// Gradient of cross_entropy with respect to probs.
Tensor cross_entropy_grad(const Tensor& probs, std::size_t label);

// Lowest index among maximal entries.
std::size_t argmax(const Tensor& x);

Tensor concat(const Tensor& a, const Tensor& b);

}  // namespace opseq
