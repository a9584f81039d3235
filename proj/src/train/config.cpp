#include "opseq/train/config.hpp"

#include "opseq/error.hpp"
#include "opseq/io.hpp"

namespace opseq {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw ConfigError("adam_beta1 must lie in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw ConfigError("adam_beta2 must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be positive");
  if (!(valid_fraction >= 0.0 && valid_fraction < 1.0)) throw ConfigError("valid_fraction must lie in [0, 1)");
}

KeyValues TrainConfig::fields() const {
  return {
      {"batch_size", std::to_string(batch_size)},
      {"max_epochs", std::to_string(max_epochs)},
      {"learning_rate", format_double(learning_rate)},
      {"adam_beta1", format_double(adam_beta1)},
      {"adam_beta2", format_double(adam_beta2)},
      {"adam_eps", format_double(adam_eps)},
      {"early_stop_patience", std::to_string(early_stop_patience)},
      {"valid_fraction", format_double(valid_fraction)},
      {"seed", std::to_string(seed)},
  };
}

bool TrainConfig::set_field(std::string_view key, std::string_view value) {
  if (key == "batch_size") batch_size = parse_size(value, key);
  else if (key == "max_epochs") max_epochs = parse_size(value, key);
  else if (key == "learning_rate") learning_rate = parse_double(value, key);
  else if (key == "adam_beta1") adam_beta1 = parse_double(value, key);
  else if (key == "adam_beta2") adam_beta2 = parse_double(value, key);
  else if (key == "adam_eps") adam_eps = parse_double(value, key);
  else if (key == "early_stop_patience") early_stop_patience = parse_size(value, key);
  else if (key == "valid_fraction") valid_fraction = parse_double(value, key);
  else if (key == "seed") seed = parse_u64(value, key);
  else return false;
  return true;
}

}  // namespace opseq
