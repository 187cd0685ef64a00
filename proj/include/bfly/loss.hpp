#pragma once

#include <vector>

#include "bfly/split_complex.hpp"
#include "bfly/tape.hpp"

namespace bfly {

struct LossConfig {
  double alpha = 0.3;    // compression exponent, in (0, 1]
  double lambda = 0.1;   // weight of the complex term
  double epsilon = 1e-8; // magnitude floor; keeps |Y|^alpha differentiable at 0
};

// |Y|^(alpha-1) * (re, im) with m = sqrt(re^2 + im^2 + eps^2): compressed
// magnitude, phase preserved.
SplitComplexBuffer complex_compress(const SplitComplexBuffer& y, double alpha, double epsilon);

// Mean over all bins and frames of
//   (|Yh|^a - |Y|^a)^2 + lambda * |Yh^a - Y^a|^2.
double loss_value(const std::vector<SplitComplexBuffer>& y_hat,
                  const std::vector<SplitComplexBuffer>& y, const LossConfig& cfg);

// Same quantity as a differentiable scalar node; y is the constant target.
NodePtr loss_taped(const std::vector<CNode>& y_hat, const std::vector<SplitComplexBuffer>& y,
                   const LossConfig& cfg, Tape* tape);

}  // namespace bfly
