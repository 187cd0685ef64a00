#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bfly/param.hpp"

namespace bfly {

struct GradCheckReport {
  double max_err = 0.0;  // |analytic - numeric| / max(|analytic|, |numeric|, denom_floor)
  std::string worst_param;
  std::size_t worst_coord = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coords_checked = 0;
};

// Central finite differences (f(t+eps) - f(t-eps)) / 2eps against the
// analytic gradients already stored in each tensor's grad buffer. f must be a
// deterministic forward-only evaluation; values are restored bit-exactly.
//
// denom_floor = abs_floor / rel_tol folds the absolute floor for near-zero
// gradients into a single relative metric: max_err <= rel_tol iff every
// coordinate satisfies |a - n| <= max(rel_tol * max(|a|,|n|), abs_floor).
//
// max_coords_per_tensor > 0 checks a seeded random subset per tensor.
GradCheckReport finite_diff_check(const std::function<double()>& f,
                                  const std::vector<ParamTensor*>& params, double eps = 1e-6,
                                  double denom_floor = 1e-3,
                                  std::size_t max_coords_per_tensor = 0,
                                  std::uint64_t sample_seed = 0);

}  // namespace bfly
