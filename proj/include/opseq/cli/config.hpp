#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>

#include "opseq/train/config.hpp"
#include "opseq/zoo/model.hpp"

namespace opseq::cli {

// Flat key=value configuration with '#' comments. Holds every ModelSpec and
// TrainConfig field plus paths and protocol settings. Unknown keys are rejected.
struct CliConfig {
  ModelSpec spec;
  TrainConfig train;
  std::filesystem::path corpus_dir;
  std::filesystem::path vocab_file;
  std::filesystem::path dataset_file;
  std::filesystem::path checkpoint;
  std::filesystem::path report_dir;
  std::size_t runs = 5;
  double test_fraction = 0.15;

  // Keys that were assigned explicitly, from a file or the command line.
  std::set<std::string, std::less<>> explicit_keys;

  void set(std::string_view key, std::string_view value);
  // "key=value" form, as accepted by --set.
  void set_assignment(std::string_view assignment);
  bool is_explicit(std::string_view key) const { return explicit_keys.count(key) > 0; }

  void merge_text(std::string_view text);
  static CliConfig from_text(std::string_view text);
  std::string to_text() const;
};

}  // namespace opseq::cli
