#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bfly/butterfly.hpp"
#include "bfly/tape.hpp"

namespace bfly {

// Overlapping frames of length n at stride hop. Frame f covers samples
// [f*hop, f*hop + n); trailing samples shorter than a frame are dropped.
struct FrameMatrix {
  std::size_t n = 0;
  std::size_t hop = 0;
  std::size_t source_length = 0;
  std::vector<std::vector<double>> frames;

  std::size_t count() const { return frames.size(); }
};

std::size_t frame_count(std::size_t source_length, std::size_t n, std::size_t hop);
FrameMatrix frame_signal(const std::vector<double>& x, std::size_t n, std::size_t hop);

std::vector<double> periodic_hann(std::size_t n);

// Diagonal windowing layer; starts as a periodic Hann window and trains with
// no sign or overlap-add constraint.
struct TrainableWindow {
  std::size_t n = 0;
  ParamTensor w;
};
TrainableWindow make_hann_window(std::size_t n, const std::string& name);

struct FrontEnd {
  std::size_t n = 0;
  TrainableWindow analysis_window;
  ButterflyStack forward_fft;
};

struct BackEnd {
  std::size_t n = 0;
  TrainableWindow synthesis_window;
  ButterflyStack inverse_fft;  // parameters disjoint from the forward stack
};

FrontEnd make_frontend(std::size_t n);
BackEnd make_backend(std::size_t n);
// Fixed Hann + exact-FFT analysis used for loss targets; never trainable.
FrontEnd make_reference_frontend(std::size_t n);

// Window each frame, then run it through the trainable forward transform.
std::vector<CNode> analyze(FrontEnd& front, const FrameMatrix& frames, Tape* tape);

// Inverse-transform each coefficient frame, keep the real part, apply the
// synthesis window, and overlap-add at stride hop into a buffer of out_length.
// The inverse's imaginary residue is dropped; pass imag_residual to read its
// l2 norm.
NodePtr synthesize(BackEnd& back, const std::vector<CNode>& coeffs, std::size_t hop,
                   std::size_t out_length, Tape* tape, double* imag_residual = nullptr);

// Convenience: pure analysis producing plain buffers (no tape).
std::vector<SplitComplexBuffer> analyze_buffers(FrontEnd& front, const FrameMatrix& frames);

}  // namespace bfly
