#include "opseq/zoo/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "opseq/error.hpp"
#include "opseq/io.hpp"

namespace opseq {

namespace {

constexpr std::string_view kMagic = "opseq-ckpt v1";

void put_le(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

double get_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw FormatError("checkpoint truncated inside tensor data");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::string next_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("checkpoint truncated");
  return line;
}

}  // namespace

void write_checkpoint(std::ostream& out, const ModelGraph& model) {
  out << kMagic << '\n';
  for (const auto& [key, value] : model.spec().fields()) out << key << '=' << value << '\n';
  const auto params = model.parameters();
  out << "tensors=" << params.size() << '\n';
  for (const auto& p : params) {
    const Shape& shape = p.value->shape();
    out << p.name << ' ' << shape.size();
    for (auto e : shape) out << ' ' << e;
    out << '\n';
    for (double v : p.value->data()) put_le(out, v);
  }
}

ModelGraph read_checkpoint(std::istream& in) {
  if (next_line(in) != kMagic) throw FormatError("not an opseq checkpoint (bad header)");
  ModelSpec spec;
  std::size_t tensor_count = 0;
  for (;;) {
    const std::string line = next_line(in);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("malformed checkpoint header line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "tensors") {
      tensor_count = parse_size(value, key);
      break;
    }
    if (!spec.set_field(key, value)) throw FormatError("unknown checkpoint key '" + key + "'");
  }

  Rng scratch(0);
  ModelGraph model = build_model(spec, scratch);
  std::map<std::string, Tensor*> by_name;
  for (auto& slot : model.params()) by_name[slot.name] = slot.value;
  if (by_name.size() != tensor_count) {
    throw FormatError("checkpoint holds " + std::to_string(tensor_count) + " tensors, model expects " +
                      std::to_string(by_name.size()));
  }

  for (std::size_t n = 0; n < tensor_count; ++n) {
    std::istringstream header(next_line(in));
    std::string name;
    std::size_t rank = 0;
    header >> name >> rank;
    Shape shape(rank);
    for (auto& e : shape) header >> e;
    if (!header) throw FormatError("malformed tensor record header for '" + name + "'");
    auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError("checkpoint tensor '" + name + "' not present in model");
    if (it->second->shape() != shape) {
      throw FormatError("checkpoint tensor '" + name + "' has shape " + shape_string(shape) + ", model expects " +
                        shape_string(it->second->shape()));
    }
    for (auto& v : it->second->data()) v = get_le(in);
  }
  return model;
}

void save_checkpoint(const std::filesystem::path& path, const ModelGraph& model) {
  std::ostringstream buf(std::ios::binary);
  write_checkpoint(buf, model);
  write_file_atomic(path, buf.str());
}

ModelGraph load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace opseq
