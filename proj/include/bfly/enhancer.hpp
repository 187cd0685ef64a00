#pragma once

#include <cstdint>
#include <vector>

#include "bfly/masknet.hpp"
#include "bfly/stft.hpp"

namespace bfly {

// Which parameter groups train. The masking network always trains; these
// flags select the four front-end arms (fixed/trainable window x FFT).
struct TrainableFlags {
  bool window_analysis = false;
  bool window_synthesis = false;
  bool fft_forward = false;
  bool fft_inverse = false;
};

// The full model: trainable analysis window + forward transform, masking
// network, trainable inverse transform + synthesis window, overlap-add.
struct EnhancerModel {
  std::size_t n = 0, hop = 0, d = 0;
  FrontEnd front;
  BackEnd back;
  MaskNetParams masknet;

  std::vector<ParamTensor*> parameters();
  std::vector<ParamTensor*> trainable_parameters();
  void set_trainable(const TrainableFlags& flags);
};

EnhancerModel make_enhancer(std::size_t n, std::size_t hop, std::size_t d, std::uint64_t seed);

// frame -> window -> forward FFT -> masks -> inverse FFT -> window ->
// overlap-add, truncated to the input length. Causal over frames: frame t
// only sees GRU state from frames before it. imag_residual, when given,
// receives the l2 norm of the discarded inverse imaginary part.
NodePtr enhance_forward(EnhancerModel& model, const std::vector<double>& x, Tape* tape,
                        double* imag_residual = nullptr);

// Inference wrapper returning plain samples.
std::vector<double> enhance_signal(EnhancerModel& model, const std::vector<double>& x);

}  // namespace bfly
