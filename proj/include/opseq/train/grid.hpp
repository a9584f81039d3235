#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "opseq/corpus/dataset.hpp"
#include "opseq/train/config.hpp"
#include "opseq/zoo/model.hpp"

namespace opseq {

struct GridPoint {
  std::size_t opcode_length = 2000;
  std::size_t lstm_units = 16;
  std::size_t embed_dim = 128;
  double dropout_rate = 0.3;
};

// Candidate values per hyperparameter; defaults are the full tested grid.
struct GridSpace {
  std::vector<std::size_t> opcode_lengths{2000, 4000, 6000, 8000, 10000};
  std::vector<std::size_t> lstm_units{16, 32, 64, 128, 256};
  std::vector<std::size_t> embed_dims{16, 32, 64, 128, 256};
  std::vector<double> dropout_rates{0.1, 0.2, 0.3, 0.4};

  std::size_t size() const;
  // Lexicographic order: opcode length outermost, dropout innermost.
  std::vector<GridPoint> enumerate() const;

  // "key=v1,v2,..." lines; '#' comments allowed.
  std::string to_text() const;
  static GridSpace from_text(std::string_view text);
};

struct GridOutcome {
  double accuracy = 0.0;  // fraction
  double train_seconds = 0.0;
};

struct GridResult {
  GridPoint point;
  GridOutcome outcome;
};

struct GridSearchResult {
  std::vector<GridResult> results;
  std::size_t best_index = 0;
};

using GridTrainer = std::function<GridOutcome(const GridPoint&)>;

// Highest accuracy wins, except that any result within `tolerance` (a
// fraction; 0.005 is half a percentage point) of the best is eligible and the
// fastest eligible one is chosen. Remaining ties go to enumeration order.
std::size_t select_best(const std::vector<GridResult>& results, double tolerance = 0.005);

GridSearchResult grid_search(const GridSpace& space, const GridTrainer& trainer, double tolerance = 0.005);

ModelSpec apply_point(ModelSpec spec, const GridPoint& point);

// Trains one model per point on a single seeded split and times training.
GridTrainer make_grid_trainer(const ModelSpec& base, const EncodedDataset& data, const TrainConfig& cfg,
                              double test_fraction = 0.15);

}  // namespace opseq
