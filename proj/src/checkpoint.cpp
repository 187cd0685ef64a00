#include "bfly/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace bfly {

namespace {

constexpr char kMagic[4] = {'B', 'F', 'L', 'Y'};
constexpr std::uint32_t kVersion = 1;

void append_bytes(std::string& out, const void* p, std::size_t count) {
  out.append(reinterpret_cast<const char*>(p), count);
}

template <typename T>
void append_le(std::string& out, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = (v >> (8 * i)) & 0xff;
  append_bytes(out, buf, sizeof(T));
}

struct Reader {
  const std::vector<unsigned char>& data;
  std::size_t pos = 0;
  const std::string& path;

  void need(std::size_t count, const char* what) {
    if (pos + count > data.size())
      throw std::runtime_error("checkpoint: " + path + ": truncated while reading " + what +
                               " at offset " + std::to_string(pos));
  }
  template <typename T>
  T take_le(const char* what) {
    need(sizeof(T), what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= T(data[pos + i]) << (8 * i);
    pos += sizeof(T);
    return v;
  }
};

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<const ParamTensor*>& tensors) {
  std::string out;
  append_bytes(out, kMagic, 4);
  append_le<std::uint32_t>(out, kVersion);
  append_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const ParamTensor* t : tensors) {
    if (t->name.size() > 0xffff)
      throw std::invalid_argument("save_checkpoint: tensor name too long: " + t->name);
    append_le<std::uint16_t>(out, static_cast<std::uint16_t>(t->name.size()));
    out += t->name;
    out.push_back(char(0));  // dtype binary64
    out.push_back(char(t->shape.size()));
    for (std::size_t d : t->shape) append_le<std::uint64_t>(out, d);
    for (double v : t->values) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      append_le<std::uint64_t>(out, bits);
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

std::map<std::string, LoadedTensor> load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  Reader r{data, 0, path};

  r.need(4, "magic");
  if (std::memcmp(data.data(), kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: " + path + ": bad magic at offset 0");
  r.pos = 4;
  const auto version = r.take_le<std::uint32_t>("version");
  if (version != kVersion)
    throw std::runtime_error("checkpoint: " + path + ": unsupported version " +
                             std::to_string(version) + " at offset 4");
  const auto count = r.take_le<std::uint32_t>("tensor count");

  std::map<std::string, LoadedTensor> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = r.take_le<std::uint16_t>("name length");
    r.need(name_len, "name");
    std::string name(reinterpret_cast<const char*>(data.data() + r.pos), name_len);
    r.pos += name_len;
    const auto dtype = r.take_le<std::uint8_t>("dtype");
    if (dtype > 1)
      throw std::runtime_error("checkpoint: " + path + ": unknown dtype " +
                               std::to_string(dtype) + " at offset " + std::to_string(r.pos - 1));
    const auto rank = r.take_le<std::uint8_t>("rank");
    LoadedTensor t;
    std::size_t total = 1;
    for (std::uint8_t dim = 0; dim < rank; ++dim) {
      const auto d = r.take_le<std::uint64_t>("dimension");
      t.shape.push_back(static_cast<std::size_t>(d));
      total *= static_cast<std::size_t>(d);
    }
    t.values.resize(total);
    for (std::size_t v = 0; v < total; ++v) {
      if (dtype == 0) {
        const auto bits = r.take_le<std::uint64_t>("value");
        double x;
        std::memcpy(&x, &bits, 8);
        t.values[v] = x;
      } else {
        const auto bits = r.take_le<std::uint32_t>("value");
        float x;
        std::memcpy(&x, &bits, 4);
        t.values[v] = static_cast<double>(x);
      }
    }
    out.emplace(std::move(name), std::move(t));
  }
  return out;
}

void save_model_checkpoint(const std::string& path, EnhancerModel& model) {
  ParamTensor meta("meta", {3});
  meta.values = {static_cast<double>(model.n), static_cast<double>(model.hop),
                 static_cast<double>(model.d)};
  std::vector<const ParamTensor*> tensors{&meta};
  for (auto* p : model.parameters()) tensors.push_back(p);
  save_checkpoint(path, tensors);
}

EnhancerModel model_from_checkpoint(const std::string& path) {
  auto loaded = load_checkpoint(path);
  auto meta = loaded.find("meta");
  if (meta == loaded.end() || meta->second.values.size() != 3)
    throw std::runtime_error("checkpoint: " + path + ": missing meta tensor");
  const auto n = static_cast<std::size_t>(meta->second.values[0]);
  const auto hop = static_cast<std::size_t>(meta->second.values[1]);
  const auto d = static_cast<std::size_t>(meta->second.values[2]);

  EnhancerModel model = make_enhancer(n, hop, d, /*seed=*/0);
  for (auto* p : model.parameters()) {
    auto it = loaded.find(p->name);
    if (it == loaded.end())
      throw std::runtime_error("checkpoint: " + path + ": missing tensor " + p->name);
    if (it->second.values.size() != p->size())
      throw std::runtime_error("checkpoint: " + path + ": tensor " + p->name +
                               " has wrong element count");
    p->values = it->second.values;
  }
  return model;
}

}  // namespace bfly
