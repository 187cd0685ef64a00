#include "bfly/training.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace bfly {

std::vector<double> mix_at_snr(const std::vector<double>& speech,
                               const std::vector<double>& noise, double snr_db) {
  if (speech.size() != noise.size())
    throw std::invalid_argument("mix_at_snr: length mismatch");
  if (speech.empty()) throw std::invalid_argument("mix_at_snr: empty input");
  double p_speech = 0.0, p_noise = 0.0;
  for (std::size_t i = 0; i < speech.size(); ++i) {
    p_speech += speech[i] * speech[i];
    p_noise += noise[i] * noise[i];
  }
  p_speech /= static_cast<double>(speech.size());
  p_noise /= static_cast<double>(noise.size());
  if (p_speech <= 0.0 || p_noise <= 0.0)
    throw std::invalid_argument("mix_at_snr: degenerate zero-power signal");

  const double g = std::sqrt(p_speech / (p_noise * std::pow(10.0, snr_db / 10.0)));
  std::vector<double> noisy(speech.size());
  for (std::size_t i = 0; i < speech.size(); ++i) noisy[i] = speech[i] + g * noise[i];
  return noisy;
}

std::vector<SplitComplexBuffer> compute_targets(const std::vector<double>& clean,
                                                FrontEnd& reference, std::size_t hop) {
  return analyze_buffers(reference, frame_signal(clean, reference.n, hop));
}

void Adam::step(const std::vector<ParamTensor*>& params) {
  for (ParamTensor* p : params) {
    if (!p->trainable) continue;
    AdamState& s = state_[p];
    if (s.m.empty()) {
      s.m.assign(p->size(), 0.0);
      s.v.assign(p->size(), 0.0);
    }
    ++s.t;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(s.t));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(s.t));
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double g = p->grad[i];
      s.m[i] = beta1_ * s.m[i] + (1.0 - beta1_) * g;
      s.v[i] = beta2_ * s.v[i] + (1.0 - beta2_) * g * g;
      const double m_hat = s.m[i] / bc1;
      const double v_hat = s.v[i] / bc2;
      p->values[i] -= lr_ * m_hat / (std::sqrt(v_hat) + epsilon_);
    }
  }
}

TrainResult train(EnhancerModel& model, const TrainConfig& cfg, const Dataset& dataset) {
  if (dataset.clean.empty()) throw std::invalid_argument("train: empty dataset");
  model.set_trainable(cfg.trainable);

  FrontEnd reference = make_reference_frontend(model.n);
  Adam adam(cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_epsilon);
  auto params = model.parameters();

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick_clip(0, dataset.clean.size() - 1);

  const std::size_t crop =
      static_cast<std::size_t>(cfg.crop_seconds * static_cast<double>(dataset.sample_rate));

  TrainResult result;
  result.loss_curve.reserve(cfg.max_steps);
  for (std::size_t step = 0; step < cfg.max_steps; ++step) {
    for (ParamTensor* p : params) p->zero_grad();

    double batch_loss = 0.0;
    for (std::size_t b = 0; b < cfg.batch_size; ++b) {
      const std::size_t idx = pick_clip(rng);
      const std::vector<double>& clean_full = dataset.clean[idx];
      const std::vector<double>& paired_full = dataset.paired[idx];

      const std::size_t len = std::min({crop, clean_full.size(), paired_full.size()});
      if (len < model.n)
        throw std::invalid_argument("train: clip " + std::to_string(idx) +
                                    " shorter than one frame");
      std::size_t offset = 0;
      if (clean_full.size() > len) {
        std::uniform_int_distribution<std::size_t> pick_off(0, clean_full.size() - len);
        offset = pick_off(rng);
      }
      std::vector<double> clean(clean_full.begin() + offset, clean_full.begin() + offset + len);
      std::vector<double> paired(paired_full.begin() + offset,
                                 paired_full.begin() + offset + len);

      std::vector<double> noisy;
      if (dataset.mode == DatasetManifest::Mode::kMixOnTheFly) {
        std::uniform_int_distribution<std::size_t> pick_snr(0, cfg.snr_list.size() - 1);
        noisy = mix_at_snr(clean, paired, cfg.snr_list[pick_snr(rng)]);
      } else {
        noisy = std::move(paired);
      }

      Tape tape;
      NodePtr out = enhance_forward(model, noisy, &tape);
      FrameMatrix out_frames = frame_signal(out->val, model.n, model.hop);
      // re-analyze the estimate through the fixed reference, with gradient
      std::vector<CNode> y_hat;
      y_hat.reserve(out_frames.count());
      for (std::size_t f = 0; f < out_frames.count(); ++f) {
        std::vector<std::size_t> idxs(model.n);
        for (std::size_t i = 0; i < model.n; ++i) idxs[i] = f * model.hop + i;
        auto frame = gather(out, idxs, &tape);
        auto windowed = window_forward(reference.analysis_window.w, frame, &tape);
        y_hat.push_back(stack_forward(reference.forward_fft,
                                      CNode{windowed, make_zero_node(model.n)}, &tape));
      }
      auto y = compute_targets(clean, reference, model.hop);
      NodePtr loss_node = loss_taped(y_hat, y, cfg.loss, &tape);
      const double loss = loss_node->val[0];
      if (!std::isfinite(loss))
        throw std::runtime_error("train: non-finite loss at step " + std::to_string(step));
      batch_loss += loss;
      backward_scalar(loss_node, tape);
    }
    adam.step(params);
    result.loss_curve.push_back(batch_loss / static_cast<double>(cfg.batch_size));
  }
  return result;
}

}  // namespace bfly
