#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "opseq/corpus/dataset.hpp"
#include "opseq/train/config.hpp"
#include "opseq/zoo/model.hpp"

namespace opseq {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double valid_loss = std::numeric_limits<double>::quiet_NaN();
  double valid_accuracy = std::numeric_limits<double>::quiet_NaN();
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // epoch whose parameters were kept
  bool early_stopped = false;
  std::size_t train_samples = 0;
  std::size_t valid_samples = 0;
};

// Tracks the best validation loss; signals a stop after `patience` epochs
// without strict improvement. Patience 0 never stops.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  // Returns true when `loss` improves on every earlier observation.
  bool observe(std::size_t epoch, double loss);
  bool should_stop() const { return patience_ > 0 && since_best_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  std::size_t patience_;
  std::size_t best_epoch_ = 0;
  std::size_t since_best_ = 0;
  double best_loss_ = std::numeric_limits<double>::infinity();
};

// Called after every epoch; returning true ends training early.
using EpochCallback = std::function<bool(const EpochRecord&, ModelGraph&)>;

TrainHistory train_model(ModelGraph& model, const std::vector<SampleRecord>& train_set, const TrainConfig& cfg,
                         const EpochCallback& on_epoch = {});

}  // namespace opseq
