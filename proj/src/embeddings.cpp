#include "dga/embeddings.hpp"

#include <cstring>
#include <fstream>

#include "dga/errors.hpp"

namespace dga {

namespace {

std::uint32_t read_u32_le(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw FormatError("truncated embedding file: " + path);
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

Matrix load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open embedding file: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "EMB1", 4) != 0)
    throw FormatError("bad embedding magic in " + path);
  const std::uint32_t count = read_u32_le(in, path);
  const std::uint32_t dim = read_u32_le(in, path);
  if (count == 0 || dim == 0) throw FormatError("empty embedding file: " + path);

  Matrix m(count, dim);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
      throw FormatError("truncated embedding file: " + path);
    std::uint32_t bits = std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 |
                         std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
    float f;
    std::memcpy(&f, &bits, 4);
    m.data[i] = static_cast<real>(f);
  }
  return m;
}

void save_embeddings(const std::string& path, const Matrix& vectors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write embedding file: " + path);
  out.write("EMB1", 4);
  write_u32_le(out, static_cast<std::uint32_t>(vectors.rows));
  write_u32_le(out, static_cast<std::uint32_t>(vectors.cols));
  for (real v : vectors.data) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    write_u32_le(out, bits);
  }
  if (!out) throw FormatError("write failed: " + path);
}

}  // namespace dga
