#pragma once

#include <cstddef>
#include <vector>

namespace bfly {

// Complex data as two parallel real arrays. All complex arithmetic in the
// library is written out over these components.
struct SplitComplexBuffer {
  std::vector<double> re;
  std::vector<double> im;

  SplitComplexBuffer() = default;
  explicit SplitComplexBuffer(std::size_t n) : re(n, 0.0), im(n, 0.0) {}
  SplitComplexBuffer(std::vector<double> re_, std::vector<double> im_);

  std::size_t size() const { return re.size(); }
};

bool all_finite(const std::vector<double>& v);
bool all_finite(const SplitComplexBuffer& x);

// max_i |a_i - b_i| over both components; buffers must have equal length.
double max_abs_diff(const SplitComplexBuffer& a, const SplitComplexBuffer& b);

}  // namespace bfly
