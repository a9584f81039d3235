#pragma once

#include <cstdint>
#include <string_view>

#include "opseq/zoo/model.hpp"

namespace opseq {

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t early_stop_patience = 10;  // 0 disables early stopping
  double valid_fraction = 0.1;           // 0 trains on everything, no early stopping
  std::uint64_t seed = 0;

  void validate() const;
  KeyValues fields() const;
  bool set_field(std::string_view key, std::string_view value);
};

}  // namespace opseq
