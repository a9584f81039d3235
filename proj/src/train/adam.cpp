#include "opseq/train/adam.hpp"

#include <cmath>

#include "opseq/error.hpp"

namespace opseq {

AdamMoments AdamMoments::zeros_like(const std::vector<ParamSlot>& slots) {
  AdamMoments m;
  for (const auto& s : slots) {
    m.m.emplace_back(s.value->shape());
    m.v.emplace_back(s.value->shape());
  }
  return m;
}

void adam_step(const std::vector<ParamSlot>& slots, AdamMoments& moments, std::size_t t, const TrainConfig& cfg) {
  if (t < 1) throw ConfigError("Adam step index starts at 1");
  if (moments.m.size() != slots.size() || moments.v.size() != slots.size()) {
    throw DimensionError("Adam moments do not match the parameter list");
  }
  for (const auto& s : slots) {
    if (!s.grad->all_finite()) throw TrainingDivergedError("non-finite gradient in " + s.name);
  }

  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
  for (std::size_t k = 0; k < slots.size(); ++k) {
    auto p = slots[k].value->data();
    auto g = slots[k].grad->data();
    auto m = moments.m[k].data();
    auto v = moments.v[k].data();
    if (p.size() != m.size()) throw DimensionError("Adam moment shape mismatch for " + slots[k].name);
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
  }
}

}  // namespace opseq
