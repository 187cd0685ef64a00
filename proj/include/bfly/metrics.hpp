#pragma once

#include <cstddef>
#include <vector>

#include "bfly/stft.hpp"

namespace bfly {

// Segmental SNR convention pinned for this repo: 256-sample frames at hop
// 128, per-frame dB clipped to [-10, 35], frames with clean energy below
// 1e-10 skipped. Absolute values are comparable only under this convention.
struct SsnrConfig {
  std::size_t frame_len = 256;
  std::size_t hop = 128;
  double floor_db = -10.0;
  double ceil_db = 35.0;
};

// Mean over voiced frames of clip(10 log10(sum c^2 / (sum (c-e)^2 + 1e-20))).
double ssnr(const std::vector<double>& clean, const std::vector<double>& estimate,
            const SsnrConfig& cfg = {});

// Per-bin mean log magnitude (1e-8 floor) under a reference analysis.
std::vector<double> spectral_diag(const std::vector<double>& signal, FrontEnd& reference,
                                  std::size_t hop);

}  // namespace bfly
