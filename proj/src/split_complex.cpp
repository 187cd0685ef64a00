#include "bfly/split_complex.hpp"

#include <cmath>
#include <stdexcept>

namespace bfly {

SplitComplexBuffer::SplitComplexBuffer(std::vector<double> re_, std::vector<double> im_)
    : re(std::move(re_)), im(std::move(im_)) {
  if (re.size() != im.size())
    throw std::invalid_argument("SplitComplexBuffer: re/im length mismatch");
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const SplitComplexBuffer& x) {
  return all_finite(x.re) && all_finite(x.im);
}

double max_abs_diff(const SplitComplexBuffer& a, const SplitComplexBuffer& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("max_abs_diff: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.re[i] - b.re[i]));
    m = std::max(m, std::abs(a.im[i] - b.im[i]));
  }
  return m;
}

}  // namespace bfly
