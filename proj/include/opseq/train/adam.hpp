#pragma once

#include <vector>

#include "opseq/layers/layer.hpp"
#include "opseq/train/config.hpp"

namespace opseq {

struct AdamMoments {
  std::vector<Tensor> m;
  std::vector<Tensor> v;

  static AdamMoments zeros_like(const std::vector<ParamSlot>& slots);
};

// One bias-corrected Adam update at step t (t >= 1):
//   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2
//   p -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
// Throws TrainingDivergedError on a non-finite gradient, before touching anything.
void adam_step(const std::vector<ParamSlot>& slots, AdamMoments& moments, std::size_t t, const TrainConfig& cfg);

}  // namespace opseq
