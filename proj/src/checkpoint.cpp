#include "dga/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "dga/errors.hpp"

namespace dga {

namespace {

constexpr char kMagic[4] = {'D', 'G', 'A', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is, const char* what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw CheckpointError(std::string("truncated checkpoint while reading ") + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& is, const char* what) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8))
    throw CheckpointError(std::string("truncated checkpoint while reading ") + what);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw CheckpointError("cannot open checkpoint for writing: " + path);
  os.write(kMagic, 4);
  write_u32(os, kCheckpointVersion);
  write_u32(os, static_cast<std::uint32_t>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = params[i];
    write_u32(os, static_cast<std::uint32_t>(p.name.size()));
    os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    write_u32(os, static_cast<std::uint32_t>(p.value.rows));
    write_u32(os, static_cast<std::uint32_t>(p.value.cols));
    for (real v : p.value.data) write_f64(os, static_cast<double>(v));
  }
  if (!os) throw CheckpointError("write failure: " + path);
}

void load_checkpoint(const std::string& path, ModelParams& params) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open checkpoint: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw CheckpointError("bad checkpoint magic in " + path);
  const std::uint32_t version = read_u32(is, "version");
  if (version != kCheckpointVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t count = read_u32(is, "parameter count");
  if (count != params.size())
    throw CheckpointError("checkpoint has " + std::to_string(count) + " parameters, model expects " +
                          std::to_string(params.size()));
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = read_u32(is, "name length");
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len)) throw CheckpointError("truncated checkpoint while reading name");
    const std::uint32_t rows = read_u32(is, "rows");
    const std::uint32_t cols = read_u32(is, "cols");
    const std::ptrdiff_t idx = params.find(name);
    if (idx < 0) throw CheckpointError("checkpoint parameter '" + name + "' not in model");
    Parameter& p = params[static_cast<std::size_t>(idx)];
    if (p.value.rows != rows || p.value.cols != cols)
      throw CheckpointError("shape mismatch for '" + name + "': checkpoint " + std::to_string(rows) + "x" +
                            std::to_string(cols) + ", model " + std::to_string(p.value.rows) + "x" +
                            std::to_string(p.value.cols));
    for (real& v : p.value.data) v = static_cast<real>(read_f64(is, name.c_str()));
  }
}

}  // namespace dga
