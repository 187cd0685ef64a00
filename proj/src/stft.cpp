#include "bfly/stft.hpp"

#include <cmath>
#include <stdexcept>

namespace bfly {

std::size_t frame_count(std::size_t source_length, std::size_t n, std::size_t hop) {
  if (source_length < n) return 0;
  return (source_length - n) / hop + 1;
}

FrameMatrix frame_signal(const std::vector<double>& x, std::size_t n, std::size_t hop) {
  if (n == 0 || hop == 0 || hop > n)
    throw std::invalid_argument("frame_signal: need 1 <= hop <= n");
  if (x.size() < n)
    throw std::invalid_argument("frame_signal: signal length " + std::to_string(x.size()) +
                                " shorter than frame length " + std::to_string(n));
  FrameMatrix fm;
  fm.n = n;
  fm.hop = hop;
  fm.source_length = x.size();
  const std::size_t count = frame_count(x.size(), n, hop);
  fm.frames.reserve(count);
  for (std::size_t f = 0; f < count; ++f)
    fm.frames.emplace_back(x.begin() + f * hop, x.begin() + f * hop + n);
  return fm;
}

std::vector<double> periodic_hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n)));
  return w;
}

TrainableWindow make_hann_window(std::size_t n, const std::string& name) {
  TrainableWindow win;
  win.n = n;
  win.w = ParamTensor(name, {n});
  win.w.values = periodic_hann(n);
  return win;
}

FrontEnd make_frontend(std::size_t n) {
  FrontEnd fe;
  fe.n = n;
  fe.analysis_window = make_hann_window(n, "window_analysis");
  fe.forward_fft = build_butterfly_stack(n, "fft_forward");
  return fe;
}

BackEnd make_backend(std::size_t n) {
  BackEnd be;
  be.n = n;
  be.synthesis_window = make_hann_window(n, "window_synthesis");
  be.inverse_fft = build_butterfly_stack(n, "fft_inverse");
  return be;
}

FrontEnd make_reference_frontend(std::size_t n) {
  FrontEnd fe;
  fe.n = n;
  fe.analysis_window = make_hann_window(n, "reference/window");
  fe.analysis_window.w.trainable = false;
  fe.forward_fft = build_butterfly_stack(n, "reference/fft");
  fe.forward_fft.set_trainable(false);
  return fe;
}

std::vector<CNode> analyze(FrontEnd& front, const FrameMatrix& frames, Tape* tape) {
  if (frames.n != front.n)
    throw std::invalid_argument("analyze: frame length " + std::to_string(frames.n) +
                                " != transform size " + std::to_string(front.n));
  std::vector<CNode> out;
  out.reserve(frames.count());
  for (const auto& frame : frames.frames) {
    auto windowed = window_forward(front.analysis_window.w, make_node(frame), tape);
    out.push_back(
        stack_forward(front.forward_fft, CNode{windowed, make_zero_node(front.n)}, tape));
  }
  return out;
}

NodePtr synthesize(BackEnd& back, const std::vector<CNode>& coeffs, std::size_t hop,
                   std::size_t out_length, Tape* tape, double* imag_residual) {
  double residual_sq = 0.0;
  std::vector<NodePtr> windowed;
  windowed.reserve(coeffs.size());
  for (const auto& c : coeffs) {
    if (c.size() != back.n)
      throw std::invalid_argument("synthesize: coefficient length " + std::to_string(c.size()) +
                                  " != transform size " + std::to_string(back.n));
    CNode t = stack_inverse(back.inverse_fft, c, tape);
    if (imag_residual)
      for (double v : t.im->val) residual_sq += v * v;
    windowed.push_back(window_forward(back.synthesis_window.w, t.re, tape));
  }
  if (imag_residual) *imag_residual = std::sqrt(residual_sq);
  return overlap_add(windowed, hop, out_length, tape);
}

std::vector<SplitComplexBuffer> analyze_buffers(FrontEnd& front, const FrameMatrix& frames) {
  std::vector<SplitComplexBuffer> out;
  auto nodes = analyze(front, frames, nullptr);
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(cnode_values(n));
  return out;
}

}  // namespace bfly
