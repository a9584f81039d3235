#pragma once

#include <filesystem>
#include <iosfwd>

#include "opseq/zoo/model.hpp"

namespace opseq {

// Layout:
//   opseq-ckpt v1
//   arch=<arch_id>
//   <spec key>=<value>            (one per ModelSpec field)
//   tensors=<count>
//   then per tensor: "<name> <rank> <extent>...\n" followed by the raw
//   little-endian 64-bit floats.
void write_checkpoint(std::ostream& out, const ModelGraph& model);
ModelGraph read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const ModelGraph& model);
ModelGraph load_checkpoint(const std::filesystem::path& path);

}  // namespace opseq
