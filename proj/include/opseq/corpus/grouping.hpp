#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace opseq {

// Families ordered by descending sample count (ties lexicographic) and cut
// into consecutive groups.
struct FamilyGrouping {
  std::vector<std::vector<std::string>> groups;

  // Families of groups [0, count), in group order.
  std::vector<std::string> cumulative(std::size_t count) const;
};

FamilyGrouping group_families(const std::map<std::string, std::size_t>& counts, std::size_t group_size = 5);

}  // namespace opseq
