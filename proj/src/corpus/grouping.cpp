#include "opseq/corpus/grouping.hpp"

#include <algorithm>

#include "opseq/error.hpp"

namespace opseq {

std::vector<std::string> FamilyGrouping::cumulative(std::size_t count) const {
  if (count > groups.size()) throw ConfigError("only " + std::to_string(groups.size()) + " groups available");
  std::vector<std::string> out;
  for (std::size_t g = 0; g < count; ++g) out.insert(out.end(), groups[g].begin(), groups[g].end());
  return out;
}

FamilyGrouping group_families(const std::map<std::string, std::size_t>& counts, std::size_t group_size) {
  if (group_size == 0) throw ConfigError("group size must be positive");
  if (counts.empty() || counts.size() % group_size != 0) {
    throw ConfigError("family count " + std::to_string(counts.size()) + " is not a positive multiple of " +
                      std::to_string(group_size));
  }
  std::vector<std::pair<std::string, std::size_t>> order(counts.begin(), counts.end());
  // std::map iteration is already lexicographic, so a stable sort on count
  // alone breaks ties by name.
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  FamilyGrouping grouping;
  for (std::size_t i = 0; i < order.size(); i += group_size) {
    std::vector<std::string> group;
    for (std::size_t j = i; j < i + group_size; ++j) group.push_back(order[j].first);
    grouping.groups.push_back(std::move(group));
  }
  return grouping;
}

}  // namespace opseq
