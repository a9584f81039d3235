#pragma once

#include <string>
#include <vector>

#include "opseq/train/evaluate.hpp"
#include "opseq/train/grid.hpp"
#include "opseq/train/protocol.hpp"
#include "opseq/train/trainer.hpp"

namespace opseq {

// arch,families,run,accuracy,mean (percentages)
std::string accuracy_csv(const std::vector<RunReport>& reports);
// arch,families,run_1..run_n,mean, one row per report (percentages, 2 decimals)
std::string summary_csv(const std::vector<RunReport>& reports);
// arch,families,mean_accuracy (same rounding as summary_csv)
std::string bar_chart_csv(const std::vector<RunReport>& reports);
std::string report_json(const RunReport& report);
// Row-normalized percentages rounded to 2 decimals, with family headers.
std::string confusion_csv(const ConfusionMatrix& matrix);
std::string history_csv(const TrainHistory& history);
std::string grid_csv(const std::vector<GridResult>& results);

std::string percent_2dp(double fraction);

}  // namespace opseq
