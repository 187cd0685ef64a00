#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "bfly/audio_io.hpp"

using namespace bfly;

namespace {

namespace fs = std::filesystem;

std::string temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / name;
  fs::create_directories(p);
  return p.string();
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void le16(std::string& s, std::uint16_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char(v >> 8));
}
void le32(std::string& s, std::uint32_t v) {
  le16(s, v & 0xffff);
  le16(s, v >> 16);
}

std::string wav_bytes(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                      std::uint16_t bits, const std::vector<std::int16_t>& samples) {
  std::string s;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  s += "RIFF";
  le32(s, 36 + data_bytes);
  s += "WAVE";
  s += "fmt ";
  le32(s, 16);
  le16(s, format);
  le16(s, channels);
  le32(s, rate);
  le32(s, rate * channels * bits / 8);
  le16(s, channels * bits / 8);
  le16(s, bits);
  s += "data";
  le32(s, data_bytes);
  for (std::int16_t v : samples) le16(s, static_cast<std::uint16_t>(v));
  return s;
}

}  // namespace

TEST_SUITE("audio_io") {

TEST_CASE("read_wav scales 16-bit PCM by 1/32768") {
  const auto dir = temp_dir("bfly_wav_tests");
  const auto path = dir + "/scale.wav";
  write_bytes(path, wav_bytes(1, 1, 16000, 16, {0, 16384, -32768}));
  auto clip = read_wav(path);
  CHECK(clip.sample_rate == 16000);
  REQUIRE(clip.samples.size() == 3);
  CHECK(clip.samples[0] == 0.0);
  CHECK(clip.samples[1] == 0.5);
  CHECK(clip.samples[2] == -1.0);
}

TEST_CASE("write/read roundtrip within one quantization step, then bit-exact") {
  const auto dir = temp_dir("bfly_wav_tests");
  const auto path = dir + "/round.wav";
  AudioClip clip;
  clip.sample_rate = 16000;
  for (int i = 0; i < 256; ++i) clip.samples.push_back(std::sin(0.1 * i) * 0.8);
  write_wav(path, clip);
  auto back = read_wav(path);
  REQUIRE(back.samples.size() == clip.samples.size());
  for (std::size_t i = 0; i < clip.samples.size(); ++i)
    CHECK(std::abs(back.samples[i] - clip.samples[i]) <= 1.0 / 32768.0);

  // second roundtrip is exact: quantization is idempotent
  const auto path2 = dir + "/round2.wav";
  write_wav(path2, back);
  auto again = read_wav(path2);
  CHECK(again.samples == back.samples);
}

TEST_CASE("unsupported formats are named") {
  const auto dir = temp_dir("bfly_wav_tests");
  const auto stereo = dir + "/stereo.wav";
  write_bytes(stereo, wav_bytes(1, 2, 16000, 16, {0, 0}));
  CHECK_THROWS_WITH_AS((void)read_wav(stereo), doctest::Contains("channel"), std::runtime_error);

  const auto floatwav = dir + "/float.wav";
  write_bytes(floatwav, wav_bytes(3, 1, 16000, 16, {0}));
  CHECK_THROWS_WITH_AS((void)read_wav(floatwav), doctest::Contains("PCM"), std::runtime_error);

  const auto garbage = dir + "/garbage.wav";
  write_bytes(garbage, "not a wav at all");
  CHECK_THROWS_AS((void)read_wav(garbage), std::runtime_error);
}

TEST_CASE("write_wav saturates and sizes the data chunk") {
  const auto dir = temp_dir("bfly_wav_tests");
  const auto path = dir + "/sat.wav";
  AudioClip clip;
  clip.samples = {2.0, -2.0, 0.0};
  write_wav(path, clip);

  std::ifstream f(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  REQUIRE(bytes.size() == 44 + 6);
  // data chunk size field == 2 * sample count
  const auto size = std::uint32_t(std::uint8_t(bytes[40])) |
                    (std::uint32_t(std::uint8_t(bytes[41])) << 8) |
                    (std::uint32_t(std::uint8_t(bytes[42])) << 16) |
                    (std::uint32_t(std::uint8_t(bytes[43])) << 24);
  CHECK(size == 6);

  auto back = read_wav(path);
  CHECK(back.samples[0] == doctest::Approx(32767.0 / 32768.0));
  CHECK(back.samples[1] == -1.0);

  // silence: all-zero payload
  const auto silent_path = dir + "/silent.wav";
  write_wav(silent_path, AudioClip{std::vector<double>(8, 0.0), 16000});
  auto silent = read_wav(silent_path);
  for (double v : silent.samples) CHECK(v == 0.0);
}

TEST_CASE("toy dataset is deterministic, zero-mean, and paired") {
  const auto dir_a = temp_dir("bfly_toy_a");
  const auto dir_b = temp_dir("bfly_toy_b");
  auto ma = generate_toy_dataset(dir_a, 123, 4);
  auto mb = generate_toy_dataset(dir_b, 123, 4);
  CHECK(ma.pairs.size() == 4);

  for (std::size_t i = 0; i < 4; ++i) {
    std::ifstream fa(ma.pairs[i].first, std::ios::binary);
    std::ifstream fb(mb.pairs[i].first, std::ios::binary);
    std::string ba((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string bb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    CHECK(ba == bb);  // byte-identical across runs with the same seed
  }

  for (const auto& [clean_path, noise_path] : ma.pairs) {
    auto clip = read_wav(clean_path);
    CHECK(clip.samples.size() == 16000);
    double mean = 0.0;
    for (double v : clip.samples) mean += v;
    mean /= static_cast<double>(clip.samples.size());
    CHECK(std::abs(mean) < 1e-3);
    CHECK(fs::exists(noise_path));
  }

  // manifest loads and validates
  auto manifest = load_manifest(dir_a + "/manifest.tsv");
  CHECK(manifest.pairs.size() == 4);
  validate_manifest(manifest);
  auto ds = load_dataset(manifest);
  CHECK(ds.clean.size() == 4);
  CHECK(ds.sample_rate == 16000);
}

TEST_CASE("manifest validation rejects mixed sample rates") {
  const auto dir = temp_dir("bfly_mixed_rate");
  write_wav(dir + "/a.wav", AudioClip{std::vector<double>(16, 0.1), 16000});
  write_wav(dir + "/b.wav", AudioClip{std::vector<double>(16, 0.1), 8000});
  std::ofstream mf(dir + "/manifest.tsv", std::ios::trunc);
  mf << "a.wav\tb.wav\n";
  mf.close();
  auto manifest = load_manifest(dir + "/manifest.tsv");
  CHECK_THROWS_WITH_AS(validate_manifest(manifest), doctest::Contains("sample rates"),
                       std::runtime_error);

  std::ofstream mf2(dir + "/missing.tsv", std::ios::trunc);
  mf2 << "a.wav\tnope.wav\n";
  mf2.close();
  CHECK_THROWS_WITH_AS(validate_manifest(load_manifest(dir + "/missing.tsv")),
                       doctest::Contains("missing"), std::runtime_error);
}

}  // TEST_SUITE
