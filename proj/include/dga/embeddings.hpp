#pragma once

#include <string>

#include "dga/matrix.hpp"

namespace dga {

// Per-token vector file: magic "EMB1", u32 token count, u32 dim, then
// count*dim little-endian f32 values row-major, one row per token in
// sequence order.
Matrix load_embeddings(const std::string& path);
void save_embeddings(const std::string& path, const Matrix& vectors);

}  // namespace dga
