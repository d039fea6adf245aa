#pragma once

#include <string>
#include <utility>
#include <vector>

#include "echoslam/nn/layers.hpp"

namespace echoslam::nn {

// Binary checkpoint format, little-endian:
//   magic "EGST" | u32 version (=1) | u32 tensor count
//   per tensor: u32 name length | name bytes | u32 rank | u32 dims... |
//               f32 payload, row-major
// Values are stored as f32; loading widens back to the engine precision.
// Save/load of the same parameters round-trips to identical bytes.

void save_checkpoint(const ParameterSet& params, const std::string& path);

// Strict load: tensor names and shapes must match the registered set
// exactly, otherwise FormatError.
void load_checkpoint(ParameterSet& params, const std::string& path);

// Raw contents in file order, for inspection.
std::vector<std::pair<std::string, Tensor>> read_checkpoint(
    const std::string& path);

}  // namespace echoslam::nn
