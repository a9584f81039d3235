#pragma once

#include <string>
#include <vector>

#include "opseq/corpus/dataset.hpp"
#include "opseq/zoo/model.hpp"

namespace opseq {

// Rows are true families, columns predictions.
struct ConfusionMatrix {
  std::vector<std::string> families;
  std::vector<std::vector<std::size_t>> counts;

  explicit ConfusionMatrix(std::vector<std::string> names = {});

  std::size_t total() const;
  std::size_t correct() const;
  double accuracy() const;
  std::vector<std::size_t> row_sums() const;
  // Percent of each true family's samples per predicted family; empty rows stay 0.
  std::vector<std::vector<double>> row_percentages() const;
};

struct Evaluation {
  double accuracy = 0.0;
  double mean_loss = 0.0;
  ConfusionMatrix confusion;
};

// Eval-mode prediction per sample; ties go to the lowest class index.
// `jobs` > 1 evaluates on model copies in parallel with identical results.
Evaluation evaluate(const ModelGraph& model, const std::vector<SampleRecord>& samples,
                    const std::vector<std::string>& families, std::size_t jobs = 1);

}  // namespace opseq
