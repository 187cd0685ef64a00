// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one pass/fail line per criterion. Exit 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bfly/audio_io.hpp"
#include "bfly/checkpoint.hpp"
#include "bfly/config.hpp"
#include "bfly/enhancer.hpp"
#include "bfly/grad_check.hpp"
#include "bfly/metrics.hpp"
#include "bfly/training.hpp"

#ifndef BFLY_CONFIGS_DIR
#define BFLY_CONFIGS_DIR "configs"
#endif

using namespace bfly;

namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

SplitComplexBuffer random_buffer(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SplitComplexBuffer x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x.re[i] = dist(rng);
    x.im[i] = dist(rng);
  }
  return x;
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

// ---- shared fixtures for criteria 8-10 -------------------------------------

struct ToyFixture {
  fs::path dir;
  Dataset train_set;
  Dataset eval_set;

  void build() {
    dir = fs::temp_directory_path() / "bfly_acceptance_data";
    fs::remove_all(dir);
    auto train_manifest = generate_toy_dataset((dir / "train").string(), 7, 20);
    auto eval_manifest = generate_toy_dataset((dir / "eval").string(), 1234, 10);
    train_set = load_dataset(train_manifest);
    eval_set = load_dataset(eval_manifest);
  }
};

TrainConfig arm_config(bool trainable_windows, bool trainable_ffts) {
  TrainConfig cfg;  // defaults: n 256, hop 128, d 60, lr 1e-3, 2000 steps, seed 7
  cfg.snr_list = {0.0};
  cfg.trainable.window_analysis = trainable_windows;
  cfg.trainable.window_synthesis = trainable_windows;
  cfg.trainable.fft_forward = trainable_ffts;
  cfg.trainable.fft_inverse = trainable_ffts;
  return cfg;
}

struct EvalStats {
  double mean_improvement = 0.0;
  int improved_clips = 0;
  int clips = 0;
};

EvalStats eval_improvement(EnhancerModel& model, const Dataset& eval_set) {
  EvalStats stats;
  for (std::size_t i = 0; i < eval_set.clean.size(); ++i) {
    auto noisy = mix_at_snr(eval_set.clean[i], eval_set.paired[i], 0.0);
    auto out = enhance_signal(model, noisy);
    const double in_db = ssnr(eval_set.clean[i], noisy);
    const double out_db = ssnr(eval_set.clean[i], out);
    stats.mean_improvement += out_db - in_db;
    if (out_db > in_db) ++stats.improved_clips;
    ++stats.clips;
  }
  stats.mean_improvement /= static_cast<double>(stats.clips);
  return stats;
}

// ---- criteria --------------------------------------------------------------

Outcome criterion_oracle_equivalence() {
  const auto t0 = clock_type::now();
  double max_err = 0.0;
  std::mt19937_64 rng(101);
  for (std::size_t n = 2; n <= 1024; n *= 2) {
    auto stack = build_butterfly_stack(n);
    for (int rep = 0; rep < 100; ++rep) {
      auto x = random_buffer(n, rng);
      max_err = std::max(max_err, max_abs_diff(apply_forward(stack, x), naive_dft(x)));
    }
  }
  const double elapsed = seconds_since(t0);
  return {max_err <= 1e-10 && elapsed < 30.0,
          fmt("max abs err %.3e (tol 1e-10), %.1f s (limit 30 s)", max_err, elapsed)};
}

Outcome criterion_inverse_exactness() {
  double max_err = 0.0;
  std::mt19937_64 rng(102);
  for (std::size_t n = 2; n <= 1024; n *= 2) {
    auto stack = build_butterfly_stack(n);
    for (int rep = 0; rep < 100; ++rep) {
      auto x = random_buffer(n, rng);
      max_err =
          std::max(max_err, max_abs_diff(apply_inverse(stack, apply_forward(stack, x)), x));
    }
  }
  return {max_err <= 1e-10, fmt("max roundtrip err %.3e (tol 1e-10)", max_err)};
}

Outcome criterion_four_point_example() {
  // the worked 4-point factors, entry for entry
  const double w1_re[4][4] = {{1, 1, 0, 0}, {1, -1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, -1}};
  const double w2_re[4][4] = {{1, 0, 1, 0}, {0, 1, 0, 0}, {1, 0, -1, 0}, {0, 1, 0, 0}};
  const double w2_im[4][4] = {{0, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 0, 0}, {0, 0, 0, 1}};

  auto d1 = stage_to_dense(build_stage_matrix(4, 1));
  auto d2 = stage_to_dense(build_stage_matrix(4, 2));
  bool exact = true;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) {
      exact = exact && d1.at_re(r, c) == w1_re[r][c] && d1.at_im(r, c) == 0.0;
      exact = exact && d2.at_re(r, c) == w2_re[r][c] && d2.at_im(r, c) == w2_im[r][c];
    }

  auto product = to_dense(build_butterfly_stack(4));
  auto dft = dft_matrix(4);
  double prod_err = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    prod_err = std::max(prod_err, std::abs(product.re[i] - dft.re[i]));
    prod_err = std::max(prod_err, std::abs(product.im[i] - dft.im[i]));
  }
  return {exact && prod_err <= 1e-12,
          fmt("stage matrices exact: %s; |W2 W1 P4 - DFT4| = %.3e (tol 1e-12)",
              exact ? "yes" : "NO", prod_err)};
}

Outcome criterion_parameter_economy() {
  const std::size_t butterfly = count_parameters(build_butterfly_stack(512));
  const std::size_t dense = dense_parameter_count(512);
  bool ok = butterfly == 18432 && dense == 524288 && dense / butterfly >= 28;

  bool macs_ok = true;
  for (std::size_t n = 2; n <= 1024; n *= 2) {
    auto stack = build_butterfly_stack(n);
    SplitComplexBuffer x(n);
    x.re[0] = 1.0;
    MacCounter macs;
    apply_forward(stack, x, &macs);
    macs_ok = macs_ok && macs.complex_macs == 2ull * n * log2_exact(n);
  }
  return {ok && macs_ok,
          fmt("n=512: %zu vs dense %zu (%.1fx); MACs == 2 n log2 n up to 1024: %s", butterfly,
              dense, double(dense) / double(butterfly), macs_ok ? "yes" : "NO")};
}

Outcome criterion_gradient_correctness() {
  const auto t0 = clock_type::now();
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double worst = 0.0;
  std::string worst_part = "none";
  auto track = [&](const char* part, double err) {
    if (err > worst) {
      worst = err;
      worst_part = part;
    }
  };

  {  // (a) one sparse butterfly layer
    auto layer = build_stage_matrix(8, 2);
    for (auto& v : layer.vals.values) v = dist(rng);
    SplitComplexBuffer xv(8);
    for (std::size_t i = 0; i < 8; ++i) {
      xv.re[i] = dist(rng);
      xv.im[i] = dist(rng);
    }
    std::vector<double> wr(8), wi(8);
    for (auto& v : wr) v = dist(rng);
    for (auto& v : wi) v = dist(rng);
    auto eval = [&]() {
      auto y = sparse_stage_forward(layer, make_cnode(xv), nullptr);
      double s = 0.0;
      for (std::size_t i = 0; i < 8; ++i) s += wr[i] * y.re->val[i] + wi[i] * y.im->val[i];
      return s;
    };
    layer.vals.zero_grad();
    Tape tape;
    auto y = sparse_stage_forward(layer, make_cnode(xv), &tape);
    for (std::size_t i = 0; i < 8; ++i) {
      y.re->grad[i] = wr[i];
      y.im->grad[i] = wi[i];
    }
    tape.backward();
    track("sparse layer", finite_diff_check(eval, {&layer.vals}).max_err);
  }

  {  // (b) the window layer
    auto win = make_hann_window(16, "w");
    std::vector<double> frame(16), probe(16);
    for (auto& v : frame) v = dist(rng);
    for (auto& v : probe) v = dist(rng);
    auto eval = [&]() {
      auto out = window_forward(win.w, make_node(frame), nullptr);
      double s = 0.0;
      for (std::size_t i = 0; i < 16; ++i) s += probe[i] * out->val[i];
      return s;
    };
    win.w.zero_grad();
    Tape tape;
    auto out = window_forward(win.w, make_node(frame), &tape);
    out->grad = probe;
    tape.backward();
    track("window layer", finite_diff_check(eval, {&win.w}).max_err);
  }

  {  // (c) the GRU over 3 steps
    auto p = init_masknet(4, 3, 17);
    std::vector<std::vector<double>> xs(3, std::vector<double>(3));
    for (auto& x : xs)
      for (auto& v : x) v = dist(rng);
    std::vector<double> probe(3);
    for (auto& v : probe) v = dist(rng);
    std::vector<ParamTensor*> gru = {&p.wz, &p.uz, &p.bz, &p.wr, &p.ur,
                                     &p.br, &p.wh, &p.uh, &p.bh};
    auto eval = [&]() {
      auto h = make_gru_state(3).h;
      for (const auto& x : xs) h = gru_step(p, make_node(x), h, nullptr);
      double s = 0.0;
      for (std::size_t i = 0; i < 3; ++i) s += probe[i] * h->val[i];
      return s;
    };
    for (auto* t : gru) t->zero_grad();
    Tape tape;
    auto h = make_gru_state(3).h;
    for (const auto& x : xs) h = gru_step(p, make_node(x), h, &tape);
    for (std::size_t i = 0; i < 3; ++i) h->grad[i] = probe[i];
    tape.backward();
    track("gru 3 steps", finite_diff_check(eval, gru).max_err);
  }

  {  // (d) the full pipeline plus the compressed loss, n = 8, 3 frames
    const std::size_t n = 8, hop = 4;
    auto model = make_enhancer(n, hop, 4, 19);
    model.set_trainable(TrainableFlags{true, true, true, true});
    std::vector<double> x(n + 2 * hop);
    for (auto& v : x) v = dist(rng);
    FrontEnd reference = make_reference_frontend(n);
    LossConfig lc;
    std::vector<double> clean(x.size());
    for (auto& v : clean) v = dist(rng);
    auto target = compute_targets(clean, reference, hop);

    auto eval = [&]() {
      auto out = enhance_forward(model, x, nullptr);
      return loss_value(analyze_buffers(reference, frame_signal(out->val, n, hop)), target, lc);
    };
    auto params = model.trainable_parameters();
    for (auto* p : params) p->zero_grad();
    Tape tape;
    auto out = enhance_forward(model, x, &tape);
    FrameMatrix of = frame_signal(out->val, n, hop);
    std::vector<CNode> y_hat;
    for (std::size_t f = 0; f < of.count(); ++f) {
      std::vector<std::size_t> idxs(n);
      for (std::size_t i = 0; i < n; ++i) idxs[i] = f * hop + i;
      auto frame = gather(out, idxs, &tape);
      auto win = window_forward(reference.analysis_window.w, frame, &tape);
      y_hat.push_back(stack_forward(reference.forward_fft, CNode{win, make_zero_node(n)}, &tape));
    }
    backward_scalar(loss_taped(y_hat, target, lc, &tape), tape);
    track("full pipeline + loss", finite_diff_check(eval, params).max_err);
  }

  const double elapsed = seconds_since(t0);
  return {worst <= 1e-5 && elapsed < 60.0,
          fmt("worst rel err %.3e in %s (tol 1e-5), %.1f s (limit 60 s)", worst,
              worst_part.c_str(), elapsed)};
}

Outcome criterion_reconstruction() {
  const std::size_t n = 256, hop = 128;
  auto front = make_frontend(n);  // Hann analysis
  auto back = make_backend(n);
  std::fill(back.synthesis_window.w.values.begin(), back.synthesis_window.w.values.end(), 1.0);

  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> dist(-0.9, 0.9);
  std::vector<double> x(16000);
  for (auto& v : x) v = dist(rng);

  // masks == 1: coefficients pass through untouched
  auto coeffs = analyze(front, frame_signal(x, n, hop), nullptr);
  auto y = synthesize(back, coeffs, hop, x.size(), nullptr);
  double max_err = 0.0;
  for (std::size_t i = n; i + n < x.size(); ++i)
    max_err = std::max(max_err, std::abs(y->val[i] - x[i]));
  return {max_err <= 1e-9, fmt("interior max abs err %.3e (tol 1e-9)", max_err)};
}

Outcome criterion_loss_sanity() {
  std::mt19937_64 rng(105);
  LossConfig cfg;  // alpha 0.3, lambda 0.1

  auto spectrum = random_buffer(16, rng);
  const bool self_zero = loss_value({spectrum}, {spectrum}, cfg) == 0.0;

  bool nonneg = true;
  for (int rep = 0; rep < 1000; ++rep) {
    auto a = random_buffer(8, rng);
    auto b = random_buffer(8, rng);
    nonneg = nonneg && loss_value({a}, {b}, cfg) >= 0.0;
  }

  // zero-magnitude bins: finite value and finite gradients
  SplitComplexBuffer zeros(8);
  auto target = random_buffer(8, rng);
  const double at_zero = loss_value({zeros}, {target}, cfg);
  Tape tape;
  auto yh = make_cnode(zeros);
  auto node = loss_taped({yh}, {target}, cfg, &tape);
  backward_scalar(node, tape);
  bool grads_finite = std::isfinite(at_zero) && std::isfinite(node->val[0]);
  for (std::size_t i = 0; i < 8; ++i)
    grads_finite = grads_finite && std::isfinite(yh.re->grad[i]) && std::isfinite(yh.im->grad[i]);

  return {self_zero && nonneg && grads_finite,
          fmt("loss(Y,Y)==0: %s; 1000 random pairs >= 0: %s; zero-bin value/grads finite: %s",
              self_zero ? "yes" : "NO", nonneg ? "yes" : "NO", grads_finite ? "yes" : "NO")};
}

struct TrainingArtifacts {
  std::vector<double> arm4_curve;
  EvalStats arm4_eval;
  std::vector<double> arm1_curve;
  EvalStats arm1_eval;
  double elapsed = 0.0;
};

TrainingArtifacts run_training_effect(const ToyFixture& toy) {
  TrainingArtifacts art;
  const auto t0 = clock_type::now();

  auto cfg4 = arm_config(true, true);
  auto model4 = make_enhancer(cfg4.n, cfg4.hop, cfg4.d, cfg4.seed);
  art.arm4_curve = train(model4, cfg4, toy.train_set).loss_curve;
  art.arm4_eval = eval_improvement(model4, toy.eval_set);

  auto cfg1 = arm_config(false, false);
  auto model1 = make_enhancer(cfg1.n, cfg1.hop, cfg1.d, cfg1.seed);
  art.arm1_curve = train(model1, cfg1, toy.train_set).loss_curve;
  art.arm1_eval = eval_improvement(model1, toy.eval_set);

  art.elapsed = seconds_since(t0);
  return art;
}

Outcome criterion_training_effect(const TrainingArtifacts& art) {
  const double initial4 = art.arm4_curve.front();
  const double final4 = art.arm4_curve.back();
  const bool halved = final4 <= 0.5 * initial4;
  const bool improved_mean = art.arm4_eval.mean_improvement >= 2.0;
  const bool improved_most =
      art.arm4_eval.improved_clips * 5 >= art.arm4_eval.clips * 4;  // >= 80% of clips

  const bool arm1_improves = art.arm1_curve.back() < art.arm1_curve.front() &&
                             art.arm1_eval.mean_improvement > 0.0;
  const bool in_time = art.elapsed < 900.0;

  return {halved && improved_mean && improved_most && arm1_improves && in_time,
          fmt("arm4 loss %.3e -> %.3e (%.1f%%); ssnr %+0.2f dB on %d/%d clips; "
              "arm1 %.3e -> %.3e, %+0.2f dB; %.0f s (limit 900 s)",
              initial4, final4, 100.0 * final4 / initial4, art.arm4_eval.mean_improvement,
              art.arm4_eval.improved_clips, art.arm4_eval.clips, art.arm1_curve.front(),
              art.arm1_curve.back(), art.arm1_eval.mean_improvement, art.elapsed)};
}

Outcome criterion_ablation_plumbing(const ToyFixture& toy) {
  const fs::path configs(BFLY_CONFIGS_DIR);
  const char* files[4] = {"arm1_fixed_window_fixed_fft.cfg", "arm2_trainable_window_fixed_fft.cfg",
                          "arm3_fixed_window_trainable_fft.cfg",
                          "arm4_trainable_window_trainable_fft.cfg"};
  std::string detail;
  bool all_ok = true;
  for (int arm = 0; arm < 4; ++arm) {
    RunConfig cfg = parse_config_file((configs / files[arm]).string());
    cfg.train.max_steps = 25;  // short runs; the frozen-parameter contract is the point

    auto model = make_enhancer(cfg.train.n, cfg.train.hop, cfg.train.d, cfg.train.seed);
    model.set_trainable(cfg.train.trainable);
    std::vector<std::vector<double>> frozen_before;
    std::vector<std::string> frozen_names;
    for (auto* p : model.parameters())
      if (!p->trainable) {
        frozen_before.push_back(p->values);
        frozen_names.push_back(p->name);
      }
    const auto masknet_before = model.masknet.l2_w.values;

    train(model, cfg.train, toy.train_set);

    bool frozen_ok = true;
    std::size_t idx = 0;
    for (auto* p : model.parameters())
      if (!p->trainable) frozen_ok = frozen_ok && p->values == frozen_before[idx++];
    const bool masknet_moved = model.masknet.l2_w.values != masknet_before;
    all_ok = all_ok && frozen_ok && masknet_moved;
    detail += fmt("arm%d frozen=%zu ok=%s%s", arm + 1, frozen_before.size(),
                  frozen_ok && masknet_moved ? "yes" : "NO", arm < 3 ? "; " : "");
  }
  return {all_ok, detail};
}

Outcome criterion_determinism(const ToyFixture& toy, const TrainingArtifacts& art) {
  auto cfg4 = arm_config(true, true);
  auto model = make_enhancer(cfg4.n, cfg4.hop, cfg4.d, cfg4.seed);
  auto rerun = train(model, cfg4, toy.train_set).loss_curve;
  const bool identical = rerun == art.arm4_curve;  // bit-level
  return {identical, fmt("rerun of the 2000-step curve bit-exact: %s", identical ? "yes" : "NO")};
}

}  // namespace

int main() {
  ToyFixture toy;
  toy.build();

  TrainingArtifacts art;  // criteria 8 and 10 share the trained curves

  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  const Entry entries[] = {
      {"oracle equivalence (n=2..1024, 100 vectors each)", criterion_oracle_equivalence},
      {"inverse exactness over the same sweep", criterion_inverse_exactness},
      {"4-point worked example, exact stages", criterion_four_point_example},
      {"parameter economy and MAC counts", criterion_parameter_economy},
      {"gradient correctness (layer/window/GRU/pipeline)", criterion_gradient_correctness},
      {"perfect reconstruction at initialization", criterion_reconstruction},
      {"loss sanity at alpha=0.3, lambda=0.1", criterion_loss_sanity},
      {"desk-scale training effect (2000 Adam steps)",
       [&]() {
         art = run_training_effect(toy);
         return criterion_training_effect(art);
       }},
      {"ablation plumbing from the four committed configs",
       [&]() { return criterion_ablation_plumbing(toy); }},
      {"bit-exact determinism of the training curve",
       [&]() { return criterion_determinism(toy, art); }},
  };

  int passed = 0;
  const int total = 10;
  for (int i = 0; i < total; ++i) {
    Outcome out;
    try {
      out = entries[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%2d/10] %s  %s — %s\n", i + 1, out.pass ? "PASS" : "FAIL", entries[i].name,
                out.detail.c_str());
    std::fflush(stdout);
    if (out.pass) ++passed;
  }
  std::printf("ACCEPTANCE: %d/%d criteria passed\n", passed, total);
  return passed == total ? 0 : 1;
}
