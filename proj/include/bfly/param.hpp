#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bfly {

// A named block of trainable values with a matching gradient buffer.
// Frozen tensors (trainable == false) never receive gradient writes and are
// skipped by the optimizer, so their values stay bit-identical under training.
struct ParamTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;
  std::vector<double> grad;
  bool trainable = true;

  ParamTensor() = default;
  ParamTensor(std::string name_, std::vector<std::size_t> shape_, double fill = 0.0);

  std::size_t size() const { return values.size(); }
  void zero_grad();
};

std::size_t shape_product(const std::vector<std::size_t>& shape);

}  // namespace bfly
