#include "bfly/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace bfly {

GradCheckReport finite_diff_check(const std::function<double()>& f,
                                  const std::vector<ParamTensor*>& params, double eps,
                                  double denom_floor, std::size_t max_coords_per_tensor,
                                  std::uint64_t sample_seed) {
  GradCheckReport report;
  std::mt19937_64 rng(sample_seed);

  for (ParamTensor* p : params) {
    std::vector<std::size_t> coords(p->size());
    std::iota(coords.begin(), coords.end(), 0);
    if (max_coords_per_tensor > 0 && coords.size() > max_coords_per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(max_coords_per_tensor);
    }
    for (std::size_t i : coords) {
      const double saved = p->values[i];
      p->values[i] = saved + eps;
      const double f_plus = f();
      p->values[i] = saved - eps;
      const double f_minus = f();
      p->values[i] = saved;  // restore original bits

      const double numeric = (f_plus - f_minus) / (2.0 * eps);
      const double analytic = p->grad[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), denom_floor});
      const double err = std::abs(analytic - numeric) / denom;
      ++report.coords_checked;
      if (err > report.max_err) {
        report.max_err = err;
        report.worst_param = p->name;
        report.worst_coord = i;
        report.analytic = analytic;
        report.numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace bfly
