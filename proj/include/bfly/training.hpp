#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "bfly/audio_io.hpp"
#include "bfly/enhancer.hpp"
#include "bfly/loss.hpp"

namespace bfly {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t batch_size = 1;
  std::size_t max_steps = 2000;
  std::uint64_t seed = 7;
  TrainableFlags trainable;
  std::size_t n = 256;
  std::size_t hop = 128;
  std::size_t d = 60;
  LossConfig loss;
  std::vector<double> snr_list{0.0};
  double crop_seconds = 1.0;
};

// noisy = speech + g * noise with g chosen so the mean-square power ratio
// equals snr_db exactly.
std::vector<double> mix_at_snr(const std::vector<double>& speech,
                               const std::vector<double>& noise, double snr_db);

// Fixed-reference analysis (Hann window + exact FFT) of a time-domain signal.
// Both the training target Y and the estimate Y_hat go through this same
// reference so the trainable transform cannot shrink the loss by collapsing.
std::vector<SplitComplexBuffer> compute_targets(const std::vector<double>& clean,
                                                FrontEnd& reference, std::size_t hop);

struct AdamState {
  std::vector<double> m, v;
  std::uint64_t t = 0;
};

// Standard Adam with bias correction; frozen tensors are never touched.
class Adam {
 public:
  Adam(double lr, double beta1, double beta2, double epsilon)
      : lr_(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

  void step(const std::vector<ParamTensor*>& params);

 private:
  double lr_, beta1_, beta2_, epsilon_;
  std::unordered_map<ParamTensor*, AdamState> state_;
};

struct TrainResult {
  std::vector<double> loss_curve;  // one entry per step (batch mean)
};

// Runs the mix -> enhance -> reference-analysis -> loss -> Adam loop on the
// model in place. Deterministic for a given config and dataset; throws with
// the step index if the loss goes non-finite.
TrainResult train(EnhancerModel& model, const TrainConfig& cfg, const Dataset& dataset);

}  // namespace bfly
