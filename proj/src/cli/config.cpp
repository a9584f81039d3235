#include "opseq/cli/config.hpp"

#include <sstream>

#include "opseq/error.hpp"
#include "opseq/io.hpp"

namespace opseq::cli {

void CliConfig::set(std::string_view raw_key, std::string_view raw_value) {
  const std::string key(trim(raw_key));
  const std::string value(trim(raw_value));
  bool known = spec.set_field(key, value) || train.set_field(key, value);
  if (!known) {
    known = true;
    if (key == "corpus_dir") corpus_dir = value;
    else if (key == "vocab_file") vocab_file = value;
    else if (key == "dataset_file") dataset_file = value;
    else if (key == "checkpoint") checkpoint = value;
    else if (key == "report_dir") report_dir = value;
    else if (key == "runs") runs = parse_size(value, key);
    else if (key == "test_fraction") test_fraction = parse_double(value, key);
    else known = false;
  }
  if (!known) throw ConfigError("unknown configuration key '" + key + "'");
  explicit_keys.insert(key);
}

void CliConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void CliConfig::merge_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    try {
      set_assignment(line);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

CliConfig CliConfig::from_text(std::string_view text) {
  CliConfig c;
  c.merge_text(text);
  return c;
}

std::string CliConfig::to_text() const {
  std::ostringstream out;
  out << "# model\n";
  for (const auto& [k, v] : spec.fields()) out << k << '=' << v << '\n';
  out << "# training\n";
  for (const auto& [k, v] : train.fields()) out << k << '=' << v << '\n';
  out << "runs=" << runs << '\n';
  out << "test_fraction=" << format_double(test_fraction) << '\n';
  auto path_line = [&](const char* key, const std::filesystem::path& p) {
    if (!p.empty()) out << key << '=' << p.string() << '\n';
  };
  path_line("corpus_dir", corpus_dir);
  path_line("vocab_file", vocab_file);
  path_line("dataset_file", dataset_file);
  path_line("checkpoint", checkpoint);
  path_line("report_dir", report_dir);
  return out.str();
}

}  // namespace opseq::cli
