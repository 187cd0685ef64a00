#include "bfly/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace bfly {

namespace {
double magnitude(double re, double im, double eps) {
  return std::sqrt(re * re + im * im + eps * eps);
}

}  // namespace

SplitComplexBuffer complex_compress(const SplitComplexBuffer& y, double alpha, double epsilon) {
  if (!all_finite(y)) throw std::runtime_error("complex_compress: non-finite input");
  SplitComplexBuffer out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double s = std::pow(magnitude(y.re[i], y.im[i], epsilon), alpha - 1.0);
    out.re[i] = s * y.re[i];
    out.im[i] = s * y.im[i];
  }
  return out;
}

double loss_value(const std::vector<SplitComplexBuffer>& y_hat,
                  const std::vector<SplitComplexBuffer>& y, const LossConfig& cfg) {
  if (y_hat.size() != y.size())
    throw std::invalid_argument("loss: frame count mismatch");
  double mag_sq = 0.0, cplx_sq = 0.0;
  std::size_t total = 0;
  for (std::size_t f = 0; f < y.size(); ++f) {
    if (y_hat[f].size() != y[f].size())
      throw std::invalid_argument("loss: bin count mismatch at frame " + std::to_string(f));
    if (!all_finite(y_hat[f]) || !all_finite(y[f]))
      throw std::runtime_error("loss: non-finite input at frame " + std::to_string(f));
    for (std::size_t i = 0; i < y[f].size(); ++i) {
      const double mh = std::pow(magnitude(y_hat[f].re[i], y_hat[f].im[i], cfg.epsilon), cfg.alpha);
      const double mt = std::pow(magnitude(y[f].re[i], y[f].im[i], cfg.epsilon), cfg.alpha);
      const double dm = mh - mt;
      mag_sq += dm * dm;

      const double sh =
          std::pow(magnitude(y_hat[f].re[i], y_hat[f].im[i], cfg.epsilon), cfg.alpha - 1.0);
      const double st = std::pow(magnitude(y[f].re[i], y[f].im[i], cfg.epsilon), cfg.alpha - 1.0);
      const double dre = sh * y_hat[f].re[i] - st * y[f].re[i];
      const double dim = sh * y_hat[f].im[i] - st * y[f].im[i];
      cplx_sq += dre * dre + dim * dim;
    }
    total += y[f].size();
  }
  if (total == 0) throw std::invalid_argument("loss: empty input");
  return (mag_sq + cfg.lambda * cplx_sq) / static_cast<double>(total);
}

NodePtr loss_taped(const std::vector<CNode>& y_hat, const std::vector<SplitComplexBuffer>& y,
                   const LossConfig& cfg, Tape* tape) {
  if (y_hat.size() != y.size())
    throw std::invalid_argument("loss: frame count mismatch");
  if (y_hat.empty()) throw std::invalid_argument("loss: empty input");

  std::vector<NodePtr> mag_diffs;
  std::vector<NodePtr> cplx_diffs;
  std::size_t total = 0;
  for (std::size_t f = 0; f < y.size(); ++f) {
    if (y_hat[f].size() != y[f].size())
      throw std::invalid_argument("loss: bin count mismatch at frame " + std::to_string(f));
    if (!all_finite(y_hat[f].re->val) || !all_finite(y_hat[f].im->val))
      throw std::runtime_error("loss: non-finite estimate at frame " + std::to_string(f));

    auto mh = magnitude_compress(y_hat[f], cfg.alpha, cfg.epsilon, tape);
    SplitComplexBuffer target(y[f]);
    SplitComplexBuffer ct = complex_compress(target, cfg.alpha, cfg.epsilon);
    std::vector<double> mt(target.size());
    for (std::size_t i = 0; i < target.size(); ++i)
      mt[i] = std::pow(magnitude(target.re[i], target.im[i], cfg.epsilon), cfg.alpha);

    mag_diffs.push_back(sub_const(mh, mt, tape));
    auto ch = complex_compress_taped(y_hat[f], cfg.alpha, cfg.epsilon, tape);
    cplx_diffs.push_back(sub_const(ch.re, ct.re, tape));
    cplx_diffs.push_back(sub_const(ch.im, ct.im, tape));
    total += y[f].size();
  }
  auto ss_mag = sum_squares(mag_diffs, tape);
  auto ss_cplx = sum_squares(cplx_diffs, tape);
  const double inv = 1.0 / static_cast<double>(total);
  return scalar_combine(ss_mag, ss_cplx, inv, cfg.lambda * inv, tape);
}

}  // namespace bfly
