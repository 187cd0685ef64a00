#include "bfly/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bfly {

double ssnr(const std::vector<double>& clean, const std::vector<double>& estimate,
            const SsnrConfig& cfg) {
  if (clean.size() != estimate.size())
    throw std::invalid_argument("ssnr: length mismatch");
  if (clean.size() < cfg.frame_len)
    throw std::invalid_argument("ssnr: signal shorter than one frame");
  if (cfg.floor_db >= cfg.ceil_db || cfg.frame_len == 0 || cfg.hop == 0)
    throw std::invalid_argument("ssnr: bad config");

  const std::size_t count = (clean.size() - cfg.frame_len) / cfg.hop + 1;
  double sum = 0.0;
  std::size_t voiced = 0;
  for (std::size_t f = 0; f < count; ++f) {
    const std::size_t base = f * cfg.hop;
    double sig = 0.0, err = 0.0;
    for (std::size_t i = 0; i < cfg.frame_len; ++i) {
      const double c = clean[base + i];
      const double d = c - estimate[base + i];
      sig += c * c;
      err += d * d;
    }
    if (sig < 1e-10) continue;  // silent frame
    const double db = 10.0 * std::log10(sig / (err + 1e-20));
    sum += std::clamp(db, cfg.floor_db, cfg.ceil_db);
    ++voiced;
  }
  if (voiced == 0)
    throw std::runtime_error("ssnr: undefined, no frames with clean energy");
  return sum / static_cast<double>(voiced);
}

std::vector<double> spectral_diag(const std::vector<double>& signal, FrontEnd& reference,
                                  std::size_t hop) {
  auto coeffs = analyze_buffers(reference, frame_signal(signal, reference.n, hop));
  std::vector<double> out(reference.n, 0.0);
  for (const auto& c : coeffs)
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double mag = std::sqrt(c.re[i] * c.re[i] + c.im[i] * c.im[i]);
      out[i] += std::log(std::max(mag, 1e-8));
    }
  for (double& v : out) v /= static_cast<double>(coeffs.size());
  return out;
}

}  // namespace bfly
