#include "opseq/train/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "opseq/io.hpp"

namespace opseq {

std::string percent_2dp(double fraction) { return format_fixed(100.0 * fraction, 2); }

std::string accuracy_csv(const std::vector<RunReport>& reports) {
  std::ostringstream out;
  out << "arch,families,run,accuracy,mean\n";
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < r.accuracies.size(); ++k) {
      out << arch_name(r.arch) << ',' << r.num_classes << ',' << (k + 1) << ',' << format_double(100.0 * r.accuracies[k])
          << ',' << format_double(100.0 * r.mean_accuracy) << '\n';
    }
  }
  return out.str();
}

std::string summary_csv(const std::vector<RunReport>& reports) {
  std::size_t runs = 0;
  for (const auto& r : reports) runs = std::max(runs, r.accuracies.size());
  std::ostringstream out;
  out << "arch,families";
  for (std::size_t k = 1; k <= runs; ++k) out << ",run_" << k;
  out << ",mean\n";
  for (const auto& r : reports) {
    out << arch_name(r.arch) << ',' << r.num_classes;
    for (std::size_t k = 0; k < runs; ++k) out << ',' << (k < r.accuracies.size() ? percent_2dp(r.accuracies[k]) : "");
    out << ',' << percent_2dp(r.mean_accuracy) << '\n';
  }
  return out.str();
}

std::string bar_chart_csv(const std::vector<RunReport>& reports) {
  std::ostringstream out;
  out << "arch,families,mean_accuracy\n";
  for (const auto& r : reports) out << arch_name(r.arch) << ',' << r.num_classes << ',' << percent_2dp(r.mean_accuracy) << '\n';
  return out.str();
}

std::string report_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["arch"] = arch_name(r.arch);
  j["num_classes"] = r.num_classes;
  j["families"] = r.families;
  j["accuracies"] = r.accuracies;
  j["mean_accuracy"] = r.mean_accuracy;
  j["seeds"] = r.seeds;
  j["train_counts"] = r.train_counts;
  j["test_counts"] = r.test_counts;
  auto& confusions = j["confusion_matrices"] = nlohmann::ordered_json::array();
  for (const auto& c : r.confusions) confusions.push_back(c.counts);
  auto& spec = j["model"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.spec.fields()) spec[k] = v;
  auto& cfg = j["train"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config.fields()) cfg[k] = v;
  return j.dump(2) + "\n";
}

std::string confusion_csv(const ConfusionMatrix& m) {
  std::ostringstream out;
  out << "true\\predicted";
  for (const auto& f : m.families) out << ',' << f;
  out << '\n';
  const auto pct = m.row_percentages();
  for (std::size_t i = 0; i < pct.size(); ++i) {
    out << m.families[i];
    for (double v : pct[i]) out << ',' << format_fixed(v, 2);
    out << '\n';
  }
  return out.str();
}

std::string history_csv(const TrainHistory& h) {
  auto num = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  std::ostringstream out;
  out << "epoch,train_loss,train_accuracy,valid_loss,valid_accuracy\n";
  for (const auto& e : h.epochs) {
    out << e.epoch << ',' << num(e.train_loss) << ',' << num(e.train_accuracy) << ',' << num(e.valid_loss) << ','
        << num(e.valid_accuracy) << '\n';
  }
  return out.str();
}

std::string grid_csv(const std::vector<GridResult>& results) {
  std::ostringstream out;
  out << "opcode_length,lstm_units,embed_dim,dropout_rate,accuracy,train_seconds\n";
  for (const auto& r : results) {
    out << r.point.opcode_length << ',' << r.point.lstm_units << ',' << r.point.embed_dim << ','
        << format_double(r.point.dropout_rate) << ',' << format_double(100.0 * r.outcome.accuracy) << ','
        << format_fixed(r.outcome.train_seconds, 3) << '\n';
  }
  return out.str();
}

}  // namespace opseq
