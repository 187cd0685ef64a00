#include "bfly/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

namespace bfly {

namespace {

namespace fs = std::filesystem;

std::uint32_t read_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}
std::uint16_t read_u16(const unsigned char* p) {
  return std::uint16_t(p[0] | (p[1] << 8));
}

void put_u32(std::string& s, std::uint32_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char((v >> 8) & 0xff));
  s.push_back(char((v >> 16) & 0xff));
  s.push_back(char((v >> 24) & 0xff));
}
void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char((v >> 8) & 0xff));
}

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_wav: cannot open " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error("read_wav: " + path + ": not a RIFF/WAVE file");

  AudioClip clip;
  bool have_fmt = false, have_data = false;
  std::uint16_t channels = 0, bits = 0, format = 0;
  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const std::string chunk(reinterpret_cast<const char*>(data.data() + pos), 4);
    const std::uint32_t size = read_u32(data.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > data.size())
      throw std::runtime_error("read_wav: " + path + ": truncated chunk '" + chunk + "'");
    if (chunk == "fmt ") {
      if (size < 16) throw std::runtime_error("read_wav: " + path + ": short 'fmt ' chunk");
      format = read_u16(data.data() + body);
      channels = read_u16(data.data() + body + 2);
      clip.sample_rate = read_u32(data.data() + body + 4);
      bits = read_u16(data.data() + body + 14);
      have_fmt = true;
    } else if (chunk == "data") {
      if (!have_fmt)
        throw std::runtime_error("read_wav: " + path + ": 'data' chunk before 'fmt '");
      if (format != 1)
        throw std::runtime_error("read_wav: " + path +
                                 ": unsupported format in 'fmt ' chunk (PCM required)");
      if (channels != 1)
        throw std::runtime_error("read_wav: " + path +
                                 ": unsupported channel count in 'fmt ' chunk (mono required)");
      if (bits != 16)
        throw std::runtime_error("read_wav: " + path +
                                 ": unsupported bit depth in 'fmt ' chunk (16-bit required)");
      const std::size_t count = size / 2;
      clip.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const std::int16_t v =
            static_cast<std::int16_t>(read_u16(data.data() + body + 2 * i));
        clip.samples[i] = static_cast<double>(v) / 32768.0;
      }
      have_data = true;
    }
    pos = body + size + (size & 1);  // chunks are word-aligned
  }
  if (!have_fmt) throw std::runtime_error("read_wav: " + path + ": missing 'fmt ' chunk");
  if (!have_data) throw std::runtime_error("read_wav: " + path + ": missing 'data' chunk");
  return clip;
}

void write_wav(const std::string& path, const AudioClip& clip) {
  for (double s : clip.samples)
    if (!std::isfinite(s)) throw std::invalid_argument("write_wav: non-finite sample");

  const std::uint32_t data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, clip.sample_rate);
  put_u32(out, clip.sample_rate * 2);  // byte rate
  put_u16(out, 2);                     // block align
  put_u16(out, 16);                    // bits per sample
  out += "data";
  put_u32(out, data_bytes);
  for (double s : clip.samples) {
    double scaled = std::floor(s * 32768.0 + 0.5);
    scaled = std::clamp(scaled, -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("write_wav: cannot open " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write_wav: write failed for " + path);
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_manifest: cannot open " + path);
  const fs::path base = fs::path(path).parent_path();
  DatasetManifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("load_manifest: " + path + ":" + std::to_string(line_no) +
                               ": expected 'clean<TAB>noise'");
    auto resolve = [&](std::string p) {
      fs::path fp(p);
      return fp.is_absolute() ? fp.string() : (base / fp).string();
    };
    m.pairs.emplace_back(resolve(line.substr(0, tab)), resolve(line.substr(tab + 1)));
  }
  if (m.pairs.empty()) throw std::runtime_error("load_manifest: " + path + ": no entries");
  return m;
}

void validate_manifest(const DatasetManifest& manifest) {
  std::uint32_t rate = 0;
  for (const auto& [a, b] : manifest.pairs) {
    for (const auto& p : {a, b}) {
      if (!fs::exists(p)) throw std::runtime_error("manifest: missing file " + p);
      const auto clip = read_wav(p);
      if (rate == 0) rate = clip.sample_rate;
      if (clip.sample_rate != rate)
        throw std::runtime_error("manifest: mixed sample rates (" + p + " has " +
                                 std::to_string(clip.sample_rate) + ", expected " +
                                 std::to_string(rate) + ")");
    }
  }
}

Dataset load_dataset(const DatasetManifest& manifest) {
  validate_manifest(manifest);
  Dataset ds;
  ds.mode = manifest.mode;
  for (const auto& [a, b] : manifest.pairs) {
    auto ca = read_wav(a);
    auto cb = read_wav(b);
    ds.sample_rate = ca.sample_rate;
    ds.clean.push_back(std::move(ca.samples));
    ds.paired.push_back(std::move(cb.samples));
  }
  return ds;
}

DatasetManifest generate_toy_dataset(const std::string& dir, std::uint64_t seed,
                                     std::size_t count) {
  fs::create_directories(dir);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> tone_count(2, 4);
  std::uniform_real_distribution<double> freq(250.0, 2500.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::uint32_t sr = 16000;
  const std::size_t len = sr;  // 1 second
  DatasetManifest m;

  std::string manifest_text;
  for (std::size_t idx = 0; idx < count; ++idx) {
    // clean: 2-4 harmonic tones, each under an attack/decay/sustain/release
    // envelope placed randomly inside the clip
    std::vector<double> clean(len, 0.0);
    const int tones = tone_count(rng);
    for (int t = 0; t < tones; ++t) {
      const double f0 = freq(rng);
      const double phase = unit(rng) * 2.0 * M_PI;
      const double amp = 0.3 + 0.7 * unit(rng);
      const std::size_t start = static_cast<std::size_t>(unit(rng) * 0.3 * len);
      const std::size_t dur = len / 2 + static_cast<std::size_t>(unit(rng) * (len - start - len / 2));
      const std::size_t attack = dur / 8, decay = dur / 8, release = dur / 4;
      const double sustain_level = 0.6 + 0.3 * unit(rng);
      const int harmonics = 1 + static_cast<int>(unit(rng) * 3.0);
      for (std::size_t i = 0; i < dur && start + i < len; ++i) {
        double env;
        if (i < attack)
          env = static_cast<double>(i) / static_cast<double>(attack);
        else if (i < attack + decay)
          env = 1.0 - (1.0 - sustain_level) * static_cast<double>(i - attack) /
                          static_cast<double>(decay);
        else if (i + release >= dur)
          env = sustain_level * static_cast<double>(dur - i) / static_cast<double>(release);
        else
          env = sustain_level;
        double s = 0.0;
        for (int h = 1; h <= harmonics; ++h) {
          if (f0 * h >= 7600.0) break;  // stay below Nyquist
          s += std::sin(2.0 * M_PI * f0 * h * static_cast<double>(start + i) / sr + phase * h) /
               static_cast<double>(h);
        }
        clean[start + i] += amp * env * s;
      }
    }
    // remove DC and normalize peak to 0.5
    double mean = 0.0;
    for (double s : clean) mean += s;
    mean /= static_cast<double>(len);
    double peak = 0.0;
    for (double& s : clean) {
      s -= mean;
      peak = std::max(peak, std::abs(s));
    }
    if (peak > 0)
      for (double& s : clean) s *= 0.5 / peak;

    // noise: white or pink at the clean clip's RMS
    std::vector<double> noise(len);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const bool pink = unit(rng) < 0.5;
    double b0 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < len; ++i) {
      const double w = gauss(rng);
      if (pink) {
        // Paul Kellet's economy pink filter
        b0 = 0.99765 * b0 + w * 0.0990460;
        b1 = 0.96300 * b1 + w * 0.2965164;
        b2 = 0.57000 * b2 + w * 1.0526913;
        noise[i] = b0 + b1 + b2 + w * 0.1848;
      } else {
        noise[i] = w;
      }
    }
    double clean_pow = 0.0, noise_pow = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      clean_pow += clean[i] * clean[i];
      noise_pow += noise[i] * noise[i];
    }
    const double g = std::sqrt(clean_pow / noise_pow);
    for (double& s : noise) s *= g;

    char name[64];
    std::snprintf(name, sizeof(name), "clean_%03zu.wav", idx);
    const std::string clean_name = name;
    std::snprintf(name, sizeof(name), "noise_%03zu.wav", idx);
    const std::string noise_name = name;
    write_wav((fs::path(dir) / clean_name).string(), AudioClip{clean, sr});
    write_wav((fs::path(dir) / noise_name).string(), AudioClip{noise, sr});
    manifest_text += clean_name + "\t" + noise_name + "\n";
    m.pairs.emplace_back((fs::path(dir) / clean_name).string(),
                         (fs::path(dir) / noise_name).string());
  }

  std::ofstream mf((fs::path(dir) / "manifest.tsv").string(), std::ios::trunc);
  if (!mf) throw std::runtime_error("generate_toy_dataset: cannot write manifest in " + dir);
  mf << manifest_text;
  return m;
}

}  // namespace bfly
