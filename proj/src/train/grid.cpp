#include "opseq/train/grid.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "opseq/error.hpp"
#include "opseq/io.hpp"
#include "opseq/train/evaluate.hpp"
#include "opseq/train/trainer.hpp"

namespace opseq {

std::size_t GridSpace::size() const {
  return opcode_lengths.size() * lstm_units.size() * embed_dims.size() * dropout_rates.size();
}

std::vector<GridPoint> GridSpace::enumerate() const {
  std::vector<GridPoint> points;
  points.reserve(size());
  for (auto len : opcode_lengths)
    for (auto units : lstm_units)
      for (auto dim : embed_dims)
        for (auto rate : dropout_rates) points.push_back({len, units, dim, rate});
  return points;
}

namespace {

template <typename T, typename F>
std::string join(const std::vector<T>& values, F fmt) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + fmt(values[i]);
  return s;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = s.find(',', start);
    out.emplace_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

}  // namespace

std::string GridSpace::to_text() const {
  auto size_fmt = [](std::size_t v) { return std::to_string(v); };
  std::ostringstream out;
  out << "opcode_lengths=" << join(opcode_lengths, size_fmt) << '\n';
  out << "lstm_units=" << join(lstm_units, size_fmt) << '\n';
  out << "embed_dims=" << join(embed_dims, size_fmt) << '\n';
  out << "dropout_rates=" << join(dropout_rates, [](double v) { return format_double(v); }) << '\n';
  return out.str();
}

GridSpace GridSpace::from_text(std::string_view text) {
  GridSpace space;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw FormatError("malformed grid space line '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    const auto items = split_list(line.substr(eq + 1));
    try {
      if (key == "opcode_lengths" || key == "lstm_units" || key == "embed_dims") {
        std::vector<std::size_t> v;
        for (const auto& item : items) v.push_back(parse_size(item, key));
        if (key == "opcode_lengths") space.opcode_lengths = v;
        else if (key == "lstm_units") space.lstm_units = v;
        else space.embed_dims = v;
      } else if (key == "dropout_rates") {
        space.dropout_rates.clear();
        for (const auto& item : items) space.dropout_rates.push_back(parse_double(item, key));
      } else {
        throw FormatError("unknown grid space key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw FormatError(e.what());
    }
  }
  if (space.size() == 0) throw FormatError("grid space has an empty parameter list");
  return space;
}

std::size_t select_best(const std::vector<GridResult>& results, double tolerance) {
  if (results.empty()) throw EmptyInputError("no grid results to choose from");
  double top = results.front().outcome.accuracy;
  for (const auto& r : results) top = std::max(top, r.outcome.accuracy);
  std::size_t best = results.size();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].outcome.accuracy < top - tolerance) continue;
    if (best == results.size() || results[i].outcome.train_seconds < results[best].outcome.train_seconds) best = i;
  }
  return best;
}

GridSearchResult grid_search(const GridSpace& space, const GridTrainer& trainer, double tolerance) {
  if (space.size() == 0) throw ConfigError("grid space is empty");
  GridSearchResult out;
  for (const auto& point : space.enumerate()) out.results.push_back({point, trainer(point)});
  out.best_index = select_best(out.results, tolerance);
  return out;
}

ModelSpec apply_point(ModelSpec spec, const GridPoint& point) {
  spec.seq_len = point.opcode_length;
  spec.lstm_units = point.lstm_units;
  spec.embed_dim = point.embed_dim;
  spec.dropout_rate = point.dropout_rate;
  return spec;
}

GridTrainer make_grid_trainer(const ModelSpec& base, const EncodedDataset& data, const TrainConfig& cfg,
                              double test_fraction) {
  return [=](const GridPoint& point) {
    const EncodedDataset fitted = data.with_length(point.opcode_length);
    ModelSpec spec = apply_point(base, point);
    spec.num_classes = fitted.families.size();
    spec.vocab_size = fitted.vocab_size();
    SplitDataset parts = split(fitted.records, test_fraction, cfg.seed);
    Rng init(cfg.seed);
    ModelGraph model = build_model(spec, init);
    const auto start = std::chrono::steady_clock::now();
    train_model(model, parts.train, cfg);
    const auto stop = std::chrono::steady_clock::now();
    GridOutcome outcome;
    outcome.accuracy = evaluate(model, parts.test, fitted.families).accuracy;
    outcome.train_seconds = std::chrono::duration<double>(stop - start).count();
    return outcome;
  };
}

}  // namespace opseq
