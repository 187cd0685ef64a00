#include "bfly/enhancer.hpp"

#include <stdexcept>

namespace bfly {

std::vector<ParamTensor*> EnhancerModel::parameters() {
  std::vector<ParamTensor*> out;
  out.push_back(&front.analysis_window.w);
  for (auto* p : front.forward_fft.parameters()) out.push_back(p);
  out.push_back(&back.synthesis_window.w);
  for (auto* p : back.inverse_fft.parameters()) out.push_back(p);
  for (auto* p : masknet.parameters()) out.push_back(p);
  return out;
}

std::vector<ParamTensor*> EnhancerModel::trainable_parameters() {
  std::vector<ParamTensor*> out;
  for (auto* p : parameters())
    if (p->trainable) out.push_back(p);
  return out;
}

void EnhancerModel::set_trainable(const TrainableFlags& flags) {
  front.analysis_window.w.trainable = flags.window_analysis;
  front.forward_fft.set_trainable(flags.fft_forward);
  back.synthesis_window.w.trainable = flags.window_synthesis;
  back.inverse_fft.set_trainable(flags.fft_inverse);
  for (auto* p : masknet.parameters()) p->trainable = true;
}

EnhancerModel make_enhancer(std::size_t n, std::size_t hop, std::size_t d, std::uint64_t seed) {
  if (hop == 0 || hop > n) throw std::invalid_argument("make_enhancer: need 1 <= hop <= n");
  EnhancerModel m;
  m.n = n;
  m.hop = hop;
  m.d = d;
  m.front = make_frontend(n);
  m.back = make_backend(n);
  m.masknet = init_masknet(n, d, seed);
  return m;
}

NodePtr enhance_forward(EnhancerModel& model, const std::vector<double>& x, Tape* tape,
                        double* imag_residual) {
  FrameMatrix frames = frame_signal(x, model.n, model.hop);
  std::vector<CNode> coeffs = analyze(model.front, frames, tape);
  std::vector<MaskPair> masks = masknet_forward(model.masknet, coeffs, tape);
  std::vector<CNode> masked;
  masked.reserve(coeffs.size());
  for (std::size_t f = 0; f < coeffs.size(); ++f)
    masked.push_back(apply_masks(coeffs[f], masks[f], tape));
  return synthesize(model.back, masked, model.hop, x.size(), tape, imag_residual);
}

std::vector<double> enhance_signal(EnhancerModel& model, const std::vector<double>& x) {
  return enhance_forward(model, x, nullptr)->val;
}

}  // namespace bfly
