// bfly: trainable butterfly-FFT front-end for speech enhancement.
// Subcommands: verify, bench, gen-data, train, enhance, evaluate.
// Exit codes: 0 success, 1 check/metric failure, 2 usage/config error.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "bfly/audio_io.hpp"
#include "bfly/checkpoint.hpp"
#include "bfly/config.hpp"
#include "bfly/enhancer.hpp"
#include "bfly/metrics.hpp"
#include "bfly/training.hpp"

namespace {

using namespace bfly;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

SplitComplexBuffer random_buffer(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SplitComplexBuffer x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x.re[i] = dist(rng);
    x.im[i] = dist(rng);
  }
  return x;
}

// --- verify ---------------------------------------------------------------

struct VerifyReport {
  double oracle_err = 0.0;
  double inverse_err = 0.0;
  double parseval_rel = 0.0;
  bool sparsity_ok = true;
};

VerifyReport verify_stack(ButterflyStack& stack, std::size_t vectors, std::uint64_t seed) {
  VerifyReport rep;
  std::mt19937_64 rng(seed);
  const std::size_t n = stack.n;
  for (std::size_t v = 0; v < vectors; ++v) {
    auto x = random_buffer(n, rng);
    auto fast = apply_forward(stack, x);
    rep.oracle_err = std::max(rep.oracle_err, max_abs_diff(fast, naive_dft(x)));
    rep.inverse_err = std::max(rep.inverse_err, max_abs_diff(apply_inverse(stack, fast), x));

    double ex = 0.0, eX = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ex += x.re[i] * x.re[i] + x.im[i] * x.im[i];
      eX += fast.re[i] * fast.re[i] + fast.im[i] * fast.im[i];
    }
    rep.parseval_rel = std::max(rep.parseval_rel, std::abs(eX - n * ex) / (n * ex));
  }
  for (const auto& f : stack.factors) {
    auto es = f.entries();
    if (es.size() != 2 * n) rep.sparsity_ok = false;
    std::vector<int> rows(n, 0), cols(n, 0);
    for (const auto& e : es) {
      ++rows[e.row];
      ++cols[e.col];
    }
    for (std::size_t i = 0; i < n; ++i)
      if (rows[i] != 2 || cols[i] != 2) rep.sparsity_ok = false;
  }
  return rep;
}

int cmd_verify(std::size_t n, bool all, const std::string& dump_dense, double perturb) {
  std::vector<std::size_t> sizes;
  if (all)
    for (std::size_t s = 2; s <= 1024; s *= 2) sizes.push_back(s);
  else
    sizes.push_back(n);

  bool ok = true;
  for (std::size_t size : sizes) {
    auto stack = build_butterfly_stack(size);
    if (perturb != 0.0) stack.factors.back().vals.values[2] += perturb;  // fault injection
    auto rep = verify_stack(stack, 100, 1000 + size);
    const bool pass = rep.oracle_err <= 1e-10 && rep.inverse_err <= 1e-10 &&
                      rep.parseval_rel <= 1e-9 && rep.sparsity_ok;
    ok = ok && pass;
    std::printf("n=%-5zu oracle=%.3e inverse=%.3e parseval=%.3e sparsity=%s  %s\n", size,
                rep.oracle_err, rep.inverse_err, rep.parseval_rel,
                rep.sparsity_ok ? "ok" : "BROKEN", pass ? "pass" : "FAIL");
    if (!pass) {
      if (rep.oracle_err > 1e-10) std::printf("  failing check: oracle equivalence\n");
      if (rep.inverse_err > 1e-10) std::printf("  failing check: inverse roundtrip\n");
      if (rep.parseval_rel > 1e-9) std::printf("  failing check: parseval\n");
      if (!rep.sparsity_ok) std::printf("  failing check: sparsity structure\n");
    }
    if (!dump_dense.empty() && sizes.size() == 1) {
      std::ofstream f(dump_dense, std::ios::trunc);
      f << dense_to_csv(to_dense(stack));
      std::printf("dense matrix written to %s\n", dump_dense.c_str());
    }
  }
  return ok ? kExitOk : kExitCheckFailure;
}

// --- bench ----------------------------------------------------------------

int cmd_bench(std::size_t n, std::size_t iters) {
  auto stack = build_butterfly_stack(n);
  auto dense = to_dense(stack);
  std::mt19937_64 rng(9);
  auto x = random_buffer(n, rng);

  using clock = std::chrono::steady_clock;
  MacCounter bmacs, dmacs;
  volatile double sink = 0.0;

  auto t0 = clock::now();
  for (std::size_t i = 0; i < iters; ++i) {
    auto y = apply_forward(stack, x, i == 0 ? &bmacs : nullptr);
    sink = sink + y.re[0];
  }
  auto t1 = clock::now();
  for (std::size_t i = 0; i < iters; ++i) {
    auto y = dense_matvec(dense, x, i == 0 ? &dmacs : nullptr);
    sink = sink + y.re[0];
  }
  auto t2 = clock::now();

  const double butterfly_us =
      std::chrono::duration<double, std::micro>(t1 - t0).count() / double(iters);
  const double dense_us =
      std::chrono::duration<double, std::micro>(t2 - t1).count() / double(iters);

  std::printf("metric,butterfly,dense\n");
  std::printf("parameters,%zu,%zu\n", count_parameters(stack), dense_parameter_count(n));
  std::printf("complex_macs,%llu,%llu\n", bmacs.complex_macs, dmacs.complex_macs);
  std::printf("apply_us,%.3f,%.3f\n", butterfly_us, dense_us);
  std::printf("speedup,%.2f,1.00\n", dense_us / butterfly_us);
  return kExitOk;
}

// --- data/just train ------------------------------------------------------

int cmd_gen_data(const std::string& dir, std::uint64_t seed, std::size_t count) {
  auto manifest = generate_toy_dataset(dir, seed, count);
  std::printf("wrote %zu pairs under %s (manifest.tsv)\n", manifest.pairs.size(), dir.c_str());
  return kExitOk;
}

RunConfig load_run_config(const std::string& config_path, const std::string& manifest_override,
                          long max_steps_override, long seed_override,
                          const std::string& checkpoint_override,
                          const std::string& loss_csv_override) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : parse_config_file(config_path);
  if (!manifest_override.empty()) cfg.manifest = manifest_override;
  if (max_steps_override >= 0) cfg.train.max_steps = static_cast<std::size_t>(max_steps_override);
  if (seed_override >= 0) cfg.train.seed = static_cast<std::uint64_t>(seed_override);
  if (!checkpoint_override.empty()) cfg.checkpoint_out = checkpoint_override;
  if (!loss_csv_override.empty()) cfg.loss_csv_out = loss_csv_override;
  if (cfg.manifest.empty())
    throw std::invalid_argument("train: no manifest given (config key 'manifest' or --manifest)");
  return cfg;
}

int cmd_train(const RunConfig& cfg) {
  auto manifest = load_manifest(cfg.manifest);
  manifest.mode =
      cfg.premixed ? DatasetManifest::Mode::kPreMixed : DatasetManifest::Mode::kMixOnTheFly;
  auto dataset = load_dataset(manifest);

  auto model = make_enhancer(cfg.train.n, cfg.train.hop, cfg.train.d, cfg.train.seed);
  auto result = train(model, cfg.train, dataset);

  std::ofstream csv(cfg.loss_csv_out, std::ios::trunc);
  if (!csv) throw std::runtime_error("train: cannot write " + cfg.loss_csv_out);
  csv << "step,loss\n";
  for (std::size_t i = 0; i < result.loss_curve.size(); ++i)
    csv << i << "," << std::scientific << result.loss_curve[i] << "\n";
  csv.close();

  save_model_checkpoint(cfg.checkpoint_out, model);
  std::printf("checkpoint: %s\nloss curve: %s (%zu steps)\n", cfg.checkpoint_out.c_str(),
              cfg.loss_csv_out.c_str(), result.loss_curve.size());
  if (!result.loss_curve.empty())
    std::printf("loss: %.6e -> %.6e\n", result.loss_curve.front(), result.loss_curve.back());
  return kExitOk;
}

int cmd_enhance(const std::string& checkpoint, const std::string& in_path,
                const std::string& out_path) {
  auto model = model_from_checkpoint(checkpoint);
  auto clip = read_wav(in_path);
  if (clip.samples.size() < model.n)
    throw std::invalid_argument("enhance: input shorter than one frame");

  double residual = 0.0;
  auto out = enhance_forward(model, clip.samples, nullptr, &residual);
  write_wav(out_path, AudioClip{out->val, clip.sample_rate});
  std::printf("enhanced %s -> %s (%zu samples, inverse imag residual %.3e)\n", in_path.c_str(),
              out_path.c_str(), out->val.size(), residual);
  return kExitOk;
}

int cmd_evaluate(const std::vector<std::string>& checkpoints, const std::string& manifest_path,
                 bool premixed, double snr_db, const std::string& out_csv,
                 const SsnrConfig& ssnr_cfg) {
  auto manifest = load_manifest(manifest_path);
  manifest.mode =
      premixed ? DatasetManifest::Mode::kPreMixed : DatasetManifest::Mode::kMixOnTheFly;
  auto dataset = load_dataset(manifest);

  std::ofstream csv(out_csv, std::ios::trunc);
  if (!csv) throw std::runtime_error("evaluate: cannot write " + out_csv);
  csv << "clip_id,ssnr_in,ssnr_out,loss\n";

  LossConfig loss_cfg;
  for (const auto& ckpt : checkpoints) {
    auto model = model_from_checkpoint(ckpt);
    FrontEnd reference = make_reference_frontend(model.n);
    const std::string arm = std::filesystem::path(ckpt).stem().string();

    double mean_in = 0.0, mean_out = 0.0;
    for (std::size_t i = 0; i < dataset.clean.size(); ++i) {
      const auto& clean = dataset.clean[i];
      std::vector<double> noisy = dataset.mode == DatasetManifest::Mode::kPreMixed
                                      ? dataset.paired[i]
                                      : mix_at_snr(clean, dataset.paired[i], snr_db);
      auto out = enhance_signal(model, noisy);
      const double in_db = ssnr(clean, noisy, ssnr_cfg);
      const double out_db = ssnr(clean, out, ssnr_cfg);
      const double l = loss_value(analyze_buffers(reference, frame_signal(out, model.n, model.hop)),
                                  compute_targets(clean, reference, model.hop), loss_cfg);
      const std::string clip_id =
          (checkpoints.size() > 1 ? arm + "/" : std::string()) +
          std::filesystem::path(manifest.pairs[i].first).stem().string();
      csv << clip_id << "," << in_db << "," << out_db << "," << std::scientific << l << "\n";
      mean_in += in_db;
      mean_out += out_db;
    }
    mean_in /= double(dataset.clean.size());
    mean_out /= double(dataset.clean.size());
    std::printf("%s: mean ssnr_in %.3f dB, mean ssnr_out %.3f dB, improvement %+.3f dB\n",
                arm.c_str(), mean_in, mean_out, mean_out - mean_in);
  }
  std::printf("metrics written to %s\n", out_csv.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trainable butterfly-FFT STFT front-end and speech enhancer"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand("verify", "Check the transform against its oracles");
  std::size_t verify_n = 256;
  bool verify_all = false;
  std::string dump_dense;
  double verify_perturb = 0.0;
  verify->add_option("--n", verify_n, "Transform size (power of two)");
  verify->add_flag("--all", verify_all, "Sweep all n in 2..1024");
  verify->add_option("--dump-dense", dump_dense, "Write the densified transform as CSV");
  verify->add_option("--perturb", verify_perturb,
                     "Inject a value fault of this size before checking");

  // bench
  auto* bench = app.add_subcommand("bench", "Time butterfly apply vs dense matvec");
  std::size_t bench_n = 512, bench_iters = 2000;
  bench->add_option("--n", bench_n, "Transform size (power of two)");
  bench->add_option("--iters", bench_iters, "Iterations per timing loop");

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic toy dataset");
  std::string gen_dir = "data/toy";
  std::uint64_t gen_seed = 7;
  std::size_t gen_count = 20;
  gen->add_option("--dir", gen_dir, "Output directory");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--count", gen_count, "Number of clean/noise pairs");

  // train
  auto* tr = app.add_subcommand("train", "Train a model from a config file");
  std::string train_config, train_manifest, train_ckpt, train_csv;
  long train_steps = -1, train_seed = -1;
  tr->add_option("--config", train_config, "Config file (key = value lines)");
  tr->add_option("--manifest", train_manifest, "Override the config's manifest path");
  tr->add_option("--max-steps", train_steps, "Override max_steps");
  tr->add_option("--seed", train_seed, "Override seed");
  tr->add_option("--checkpoint-out", train_ckpt, "Override checkpoint path");
  tr->add_option("--loss-csv", train_csv, "Override loss curve path");

  // enhance
  auto* enh = app.add_subcommand("enhance", "Run a checkpoint over a WAV file");
  std::string enh_ckpt, enh_in, enh_out;
  enh->add_option("--checkpoint", enh_ckpt, "Model checkpoint")->required();
  enh->add_option("--in", enh_in, "Input WAV (PCM16 mono)")->required();
  enh->add_option("--out", enh_out, "Output WAV")->required();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Evaluate checkpoints on a manifest");
  std::vector<std::string> ev_ckpts;
  std::string ev_manifest, ev_csv = "metrics.csv";
  bool ev_premixed = false;
  double ev_snr = 0.0;
  ev->add_option("--checkpoint", ev_ckpts, "Checkpoint(s), repeatable")->required();
  ev->add_option("--manifest", ev_manifest, "Dataset manifest")->required();
  ev->add_option("--out", ev_csv, "Metrics CSV path");
  ev->add_flag("--premixed", ev_premixed, "Second manifest column is pre-mixed noisy audio");
  ev->add_option("--snr", ev_snr, "Mixing SNR in dB (mix-on-the-fly mode)");

  try {
    app.parse(argc, argv);

    if (verify->parsed()) {
      if (!verify_all && (verify_n < 2 || !is_power_of_two(verify_n))) {
        std::fprintf(stderr, "verify: invalid size %zu (need a power of two >= 2)\n", verify_n);
        return kExitUsage;
      }
      return cmd_verify(verify_n, verify_all, dump_dense, verify_perturb);
    }
    if (bench->parsed()) {
      if (bench_n < 2 || !is_power_of_two(bench_n) || bench_n > 4096) {
        std::fprintf(stderr, "bench: invalid size %zu\n", bench_n);
        return kExitUsage;
      }
      return cmd_bench(bench_n, bench_iters);
    }
    if (gen->parsed()) return cmd_gen_data(gen_dir, gen_seed, gen_count);
    if (tr->parsed())
      return cmd_train(load_run_config(train_config, train_manifest, train_steps, train_seed,
                                       train_ckpt, train_csv));
    if (enh->parsed()) return cmd_enhance(enh_ckpt, enh_in, enh_out);
    if (ev->parsed()) {
      RunConfig defaults;
      return cmd_evaluate(ev_ckpts, ev_manifest, ev_premixed, ev_snr, ev_csv, defaults.ssnr);
    }
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}
