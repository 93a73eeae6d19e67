#pragma once

#include <string>

#include "dga/params.hpp"

namespace dga {

// Checkpoint layout, all integers little-endian:
//   "DGA1" | version u32 | parameter count u32
//   per parameter: name length u32 | UTF-8 name | rows u32 | cols u32 |
//                  rows*cols f64 values, row-major, little-endian
// Values round-trip bit-exactly.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const ModelParams& params);

// Loads into an existing registry. Every stored parameter must exist with
// the same shape and the counts must match; otherwise CheckpointError.
void load_checkpoint(const std::string& path, ModelParams& params);

}  // namespace dga
