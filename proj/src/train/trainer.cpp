#include "opseq/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "opseq/error.hpp"
#include "opseq/ndcore/ops.hpp"
#include "opseq/train/adam.hpp"
#include "opseq/train/evaluate.hpp"

namespace opseq {

bool EarlyStopping::observe(std::size_t epoch, double loss) {
  if (loss < best_loss_) {
    best_loss_ = loss;
    best_epoch_ = epoch;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

namespace {

std::vector<std::string> class_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  return names;
}

}  // namespace

TrainHistory train_model(ModelGraph& model, const std::vector<SampleRecord>& train_set, const TrainConfig& cfg,
                         const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.empty()) throw EmptyInputError("training set is empty");
  const std::size_t classes = model.spec().num_classes;
  for (const auto& r : train_set) {
    if (r.ids.size() != model.spec().seq_len) {
      throw DimensionError("training record of length " + std::to_string(r.ids.size()) + " for model seq_len " +
                           std::to_string(model.spec().seq_len));
    }
    if (r.family >= classes) throw IndexError("training label " + std::to_string(r.family) + " out of range");
  }

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<SampleRecord> valid;
  if (cfg.valid_fraction > 0.0 && train_set.size() >= 2) {
    rng.shuffle(std::span<std::size_t>(order));
    auto n_valid = static_cast<std::size_t>(std::llround(cfg.valid_fraction * static_cast<double>(order.size())));
    n_valid = std::clamp<std::size_t>(n_valid, 1, order.size() - 1);
    for (std::size_t k = 0; k < n_valid; ++k) valid.push_back(train_set[order[k]]);
    order.erase(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_valid));
    std::sort(order.begin(), order.end());
  }

  TrainHistory history;
  history.train_samples = order.size();
  history.valid_samples = valid.size();

  auto slots = model.params();
  AdamMoments moments = AdamMoments::zeros_like(slots);
  EarlyStopping stopper(cfg.early_stop_patience);
  std::vector<Tensor> best_params;
  std::size_t step = 0;
  const auto names = class_names(classes);

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double weight = 1.0 / static_cast<double>(end - start);
      model.zero_grads();
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const SampleRecord& r = train_set[order[k]];
        Tensor probs;
        batch_loss += model.accumulate_gradients(r.ids, r.family, Mode::train, rng, weight, &probs);
        if (argmax(probs) == r.family) ++correct;
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingDivergedError("loss became non-finite at epoch " + std::to_string(epoch) + ", batch " +
                                    std::to_string(batch_index));
      }
      try {
        adam_step(slots, moments, ++step, cfg);
      } catch (const TrainingDivergedError& e) {
        throw TrainingDivergedError(std::string(e.what()) + " at epoch " + std::to_string(epoch) + ", batch " +
                                    std::to_string(batch_index));
      }
      loss_sum += batch_loss;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    bool stop = false;
    if (!valid.empty()) {
      const Evaluation ev = evaluate(model, valid, names);
      rec.valid_loss = ev.mean_loss;
      rec.valid_accuracy = ev.accuracy;
      if (stopper.observe(epoch, ev.mean_loss)) best_params = model.snapshot();
      stop = stopper.should_stop();
    }
    history.epochs.push_back(rec);
    if (on_epoch && on_epoch(rec, model)) stop = true;
    if (stop) {
      history.early_stopped = stopper.should_stop();
      break;
    }
  }

  if (!valid.empty() && !best_params.empty()) {
    model.restore(best_params);
    history.best_epoch = stopper.best_epoch();
  } else {
    history.best_epoch = history.epochs.back().epoch;
  }
  return history;
}

}  // namespace opseq
