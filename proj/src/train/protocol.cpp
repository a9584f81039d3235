#include "opseq/train/protocol.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <thread>

#include "opseq/error.hpp"

namespace opseq {

namespace {

struct RunOutcome {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  TrainHistory history;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
};

// Sub-streams for one run, all derived from its run seed.
constexpr std::uint64_t kInitStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kTrainStream = 0xbf58476d1ce4e5b9ULL;

RunOutcome one_run(const ModelSpec& spec, const EncodedDataset& data, const TrainConfig& cfg, double test_fraction,
                   std::uint64_t run_seed) {
  SplitDataset parts = split(data.records, test_fraction, run_seed);
  Rng init(run_seed ^ kInitStream);
  ModelGraph model = build_model(spec, init);
  TrainConfig run_cfg = cfg;
  run_cfg.seed = run_seed ^ kTrainStream;
  RunOutcome out;
  out.history = train_model(model, parts.train, run_cfg);
  Evaluation ev = evaluate(model, parts.test, data.families);
  out.accuracy = ev.accuracy;
  out.confusion = std::move(ev.confusion);
  out.train_count = parts.train.size();
  out.test_count = parts.test.size();
  return out;
}

}  // namespace

double arithmetic_mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

RunReport run_repeated(const ModelSpec& base, const EncodedDataset& data, const TrainConfig& cfg,
                       const ProtocolOptions& options) {
  if (options.runs < 1) throw ConfigError("runs must be at least 1");
  cfg.validate();
  ModelSpec spec = base;
  spec.num_classes = data.families.size();
  spec.seq_len = data.seq_len;
  spec.vocab_size = data.vocab_size();
  spec.validate();

  std::vector<RunOutcome> outcomes(options.runs);
  std::vector<std::exception_ptr> errors(options.runs);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t r = first; r < options.runs; r += stride) {
      try {
        outcomes[r] = one_run(spec, data, cfg, options.test_fraction, cfg.seed + r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, options.runs);
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  RunReport report;
  report.arch = spec.arch;
  report.num_classes = spec.num_classes;
  report.families = data.families;
  report.spec = spec;
  report.config = cfg;
  for (std::size_t r = 0; r < options.runs; ++r) {
    report.accuracies.push_back(outcomes[r].accuracy);
    report.confusions.push_back(std::move(outcomes[r].confusion));
    report.histories.push_back(std::move(outcomes[r].history));
    report.seeds.push_back(cfg.seed + r);
    report.train_counts.push_back(outcomes[r].train_count);
    report.test_counts.push_back(outcomes[r].test_count);
  }
  report.mean_accuracy = arithmetic_mean(report.accuracies);
  return report;
}

std::vector<RunReport> run_protocol(const ModelSpec& spec, const EncodedDataset& data, const FamilyGrouping& grouping,
                                    const TrainConfig& cfg, const ProtocolOptions& options) {
  if (grouping.groups.empty()) throw ConfigError("family grouping is empty");
  std::vector<RunReport> reports;
  for (std::size_t g = 1; g <= grouping.groups.size(); ++g) {
    reports.push_back(run_repeated(spec, data.subset(grouping.cumulative(g)), cfg, options));
  }
  return reports;
}

FamilyGrouping grouping_for(const EncodedDataset& data, std::size_t group_size) {
  std::map<std::string, std::size_t> counts;
  const auto per_family = data.family_counts();
  for (std::size_t i = 0; i < data.families.size(); ++i) counts[data.families[i]] = per_family[i];
  return group_families(counts, group_size);
}

}  // namespace opseq
