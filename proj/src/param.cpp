#include "bfly/param.hpp"

#include <algorithm>

namespace bfly {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t p = 1;
  for (std::size_t d : shape) p *= d;
  return p;
}

ParamTensor::ParamTensor(std::string name_, std::vector<std::size_t> shape_, double fill)
    : name(std::move(name_)), shape(std::move(shape_)) {
  const std::size_t n = shape_product(shape);
  values.assign(n, fill);
  grad.assign(n, 0.0);
}

void ParamTensor::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

}  // namespace bfly
