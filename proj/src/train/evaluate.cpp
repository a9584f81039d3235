#include "opseq/train/evaluate.hpp"

#include <algorithm>
#include <thread>

#include "opseq/error.hpp"
#include "opseq/ndcore/ops.hpp"

namespace opseq {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> names)
    : families(std::move(names)), counts(families.size(), std::vector<std::size_t>(families.size(), 0)) {}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts)
    for (auto c : row) n += c;
  return n;
}

std::size_t ConfusionMatrix::correct() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) n += counts[i][i];
  return n;
}

double ConfusionMatrix::accuracy() const {
  const std::size_t n = total();
  return n == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(n);
}

std::vector<std::size_t> ConfusionMatrix::row_sums() const {
  std::vector<std::size_t> sums;
  for (const auto& row : counts) {
    std::size_t s = 0;
    for (auto c : row) s += c;
    sums.push_back(s);
  }
  return sums;
}

std::vector<std::vector<double>> ConfusionMatrix::row_percentages() const {
  std::vector<std::vector<double>> out;
  const auto sums = row_sums();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::vector<double> row(counts[i].size(), 0.0);
    if (sums[i] > 0) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        row[j] = 100.0 * static_cast<double>(counts[i][j]) / static_cast<double>(sums[i]);
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

Evaluation evaluate(const ModelGraph& model, const std::vector<SampleRecord>& samples,
                    const std::vector<std::string>& families, std::size_t jobs) {
  if (samples.empty()) throw EmptyInputError("cannot evaluate on an empty set");
  if (families.size() != model.spec().num_classes) {
    throw DimensionError(std::to_string(families.size()) + " family names for a " +
                         std::to_string(model.spec().num_classes) + "-class model");
  }

  std::vector<std::size_t> predictions(samples.size());
  std::vector<double> losses(samples.size());
  auto work = [&](std::size_t first, std::size_t stride) {
    ModelGraph local = model;
    Rng unused(0);
    for (std::size_t i = first; i < samples.size(); i += stride) {
      const Tensor probs = local.forward(samples[i].ids, Mode::eval, unused);
      predictions[i] = argmax(probs);
      losses[i] = cross_entropy(probs, samples[i].family);
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, samples.size());
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
    for (auto& t : pool) t.join();
  }

  Evaluation ev{0.0, 0.0, ConfusionMatrix(families)};
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ++ev.confusion.counts.at(samples[i].family).at(predictions[i]);
    loss_sum += losses[i];
  }
  ev.accuracy = ev.confusion.accuracy();
  ev.mean_loss = loss_sum / static_cast<double>(samples.size());
  return ev;
}

}  // namespace opseq
