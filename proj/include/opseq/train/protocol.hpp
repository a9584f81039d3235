#pragma once

#include <cstdint>
#include <vector>

#include "opseq/corpus/dataset.hpp"
#include "opseq/corpus/grouping.hpp"
#include "opseq/train/config.hpp"
#include "opseq/train/evaluate.hpp"
#include "opseq/train/trainer.hpp"
#include "opseq/zoo/model.hpp"

namespace opseq {

struct RunReport {
  ArchId arch = ArchId::bilstm_embed_cnn;
  std::size_t num_classes = 0;
  std::vector<std::string> families;
  std::vector<double> accuracies;  // fractions, one per run
  double mean_accuracy = 0.0;
  std::vector<ConfusionMatrix> confusions;
  std::vector<TrainHistory> histories;
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> train_counts;
  std::vector<std::size_t> test_counts;
  ModelSpec spec;
  TrainConfig config;
};

struct ProtocolOptions {
  std::size_t runs = 5;
  double test_fraction = 0.15;
  std::size_t jobs = 1;  // independent runs in parallel; results do not depend on it
};

// Run r uses seed cfg.seed + r for its split, initialization and training.
RunReport run_repeated(const ModelSpec& spec, const EncodedDataset& data, const TrainConfig& cfg,
                       const ProtocolOptions& options);

// One RunReport per cumulative family set: groups {1}, {1,2}, ... .
std::vector<RunReport> run_protocol(const ModelSpec& spec, const EncodedDataset& data, const FamilyGrouping& grouping,
                                    const TrainConfig& cfg, const ProtocolOptions& options = {});

FamilyGrouping grouping_for(const EncodedDataset& data, std::size_t group_size = 5);

double arithmetic_mean(const std::vector<double>& values);

}  // namespace opseq
