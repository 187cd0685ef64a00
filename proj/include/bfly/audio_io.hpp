#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bfly {

// Mono audio in [-1, 1]; ingestion scales 16-bit PCM by 1/32768.
struct AudioClip {
  std::vector<double> samples;
  std::uint32_t sample_rate = 16000;
};

// Reads RIFF/WAVE, PCM 16-bit, mono. Anything else is rejected with the
// offending chunk named.
AudioClip read_wav(const std::string& path);

// Writes 16-bit PCM mono, saturating at +/-1.
void write_wav(const std::string& path, const AudioClip& clip);

struct DatasetManifest {
  enum class Mode { kMixOnTheFly, kPreMixed };
  Mode mode = Mode::kMixOnTheFly;
  // (clean, noise) in mix-on-the-fly mode; (clean, noisy) when pre-mixed.
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<double> snr_list{0.0};
};

// Line format: "clean_path<TAB>noise_path"; relative paths resolve against
// the manifest's directory.
DatasetManifest load_manifest(const std::string& path);

// All referenced files must exist and share one sample rate.
void validate_manifest(const DatasetManifest& manifest);

// Clips preloaded for training/evaluation.
struct Dataset {
  std::vector<std::vector<double>> clean;
  std::vector<std::vector<double>> paired;  // noise or noisy, per manifest mode
  std::uint32_t sample_rate = 16000;
  DatasetManifest::Mode mode = DatasetManifest::Mode::kMixOnTheFly;
};
Dataset load_dataset(const DatasetManifest& manifest);

// Writes `count` 1-second 16 kHz pairs under dir: clean_###.wav holds 2-4
// enveloped harmonic tones, noise_###.wav seeded white or pink noise, plus
// manifest.tsv. Byte-identical for a given seed.
DatasetManifest generate_toy_dataset(const std::string& dir, std::uint64_t seed,
                                     std::size_t count);

}  // namespace bfly
