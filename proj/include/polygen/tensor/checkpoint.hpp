#pragma once

#include <string>
#include <vector>

#include "polygen/tensor/tensor.hpp"

namespace polygen {

// Checkpoint container: a JSON manifest next to one binary blob of
// little-endian 32-bit floats concatenated in manifest order.
//
// manifest: { "format_version": 1, "blob": "<name>.bin",
//             "tensors": [ {"name", "shape": [n,c,h,w], "offset_bytes"} ] }
void save_checkpoint(const std::string& manifest_path,
                     const std::vector<NamedTensor>& tensors);

// Loads all tensors from a container. Throws DataError on malformed input.
std::vector<NamedTensor> load_checkpoint(const std::string& manifest_path);

// Copies checkpoint values into an existing named parameter set; every
// parameter must be present with an identical shape.
void restore_into(const std::string& manifest_path,
                  std::vector<NamedTensor>& params);

}  // namespace polygen
