#pragma once

#include <map>
#include <string>
#include <vector>

#include "bfly/enhancer.hpp"
#include "bfly/param.hpp"

namespace bfly {

// Checkpoint layout (little-endian):
//   magic "BFLY", version u32 = 1, tensor count u32;
//   per tensor: name length u16, UTF-8 name, dtype u8 (0 = binary64,
//   1 = binary32), rank u8, dims as u64, raw values.
void save_checkpoint(const std::string& path, const std::vector<const ParamTensor*>& tensors);

struct LoadedTensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

// Throws std::runtime_error with the byte offset on bad magic, version, or
// truncation; nothing is partially loaded.
std::map<std::string, LoadedTensor> load_checkpoint(const std::string& path);

// Model checkpoints carry every parameter plus a "meta" tensor {n, hop, d}
// so a model can be rebuilt from the file alone.
void save_model_checkpoint(const std::string& path, EnhancerModel& model);
EnhancerModel model_from_checkpoint(const std::string& path);

}  // namespace bfly
