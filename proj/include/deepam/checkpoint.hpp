#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "deepam/model.hpp"

namespace deepam {

namespace detail {

constexpr char kCheckpointMagic[8] = {'D', 'E', 'E', 'P', 'A', 'M', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

// FNV-1a 64, good enough to catch corruption and truncation.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class ByteWriter {
 public:
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.append(s);
  }
  const std::string& bytes() const { return bytes_; }

 private:
  void raw(const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    // always little-endian on the wire
    for (std::size_t i = 0; i < n; ++i) bytes_.push_back(static_cast<char>(b[i]));
  }
  std::string bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string bytes) : bytes_(std::move(bytes)) {}

  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, 8);
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::string str() {
    std::uint32_t n = u32();
    if (pos_ + n > bytes_.size()) throw data_error("checkpoint truncated");
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  const std::string& bytes() const { return bytes_; }

 private:
  void raw(void* p, std::size_t n) {
    if (pos_ + n > bytes_.size()) throw data_error("checkpoint truncated");
    std::memcpy(p, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline void save_checkpoint(const JointModel& model, const std::string& path) {
  using namespace detail;
  ByteWriter body;
  const ModelConfig& c = model.config();
  body.u64(c.api_vocab_size);
  body.u64(c.word_vocab_size);
  body.u64(c.embedding_dim);
  body.u64(c.hidden_units);
  body.u64(c.num_layers);
  body.u64(c.max_api_len);
  body.u64(c.max_desc_len);
  body.u64(c.batch_size);
  body.u64(c.seed);
  body.u32(c.separate_encoders ? 1 : 0);
  body.u32(c.cell == CellType::Gru ? 0 : 1);
  body.f64(c.init_half_range);
  body.f64(c.grad_clip_norm);
  body.f64(c.adadelta_rho);
  body.f64(c.adadelta_epsilon);

  const ParamStore& store = model.params();
  body.u64(store.names().size());
  for (const auto& name : store.names()) {
    const Tensor& t = store.value(name);
    body.str(name);
    body.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (std::size_t d : t.shape) body.u64(d);
    for (double v : t.data) body.f64(v);
  }

  std::string out(kCheckpointMagic, 8);
  ByteWriter header;
  header.u32(kCheckpointVersion);
  out += header.bytes();
  out += body.bytes();
  ByteWriter checksum;
  checksum.u64(fnv1a(out));
  out += checksum.bytes();

  std::ofstream f(path, std::ios::binary);
  if (!f) throw data_error("cannot write checkpoint: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw data_error("checkpoint write failed: " + path);
}

inline JointModel load_checkpoint(const std::string& path) {
  using namespace detail;
  std::ifstream f(path, std::ios::binary);
  if (!f) throw data_error("cannot open checkpoint: " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (bytes.size() < 8 + 4 + 8) throw data_error("checkpoint truncated");

  if (std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0)
    throw data_error("not a checkpoint file (bad magic)");

  const std::string payload = bytes.substr(0, bytes.size() - 8);
  ByteReader tail(bytes.substr(bytes.size() - 8));
  if (fnv1a(payload) != tail.u64()) throw data_error("checkpoint checksum mismatch");

  ByteReader r(payload.substr(8));
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw data_error("checkpoint version mismatch: file has " + std::to_string(version) +
                     ", expected " + std::to_string(kCheckpointVersion));

  ModelConfig c;
  c.api_vocab_size = r.u64();
  c.word_vocab_size = r.u64();
  c.embedding_dim = r.u64();
  c.hidden_units = r.u64();
  c.num_layers = r.u64();
  c.max_api_len = r.u64();
  c.max_desc_len = r.u64();
  c.batch_size = r.u64();
  c.seed = r.u64();
  c.separate_encoders = r.u32() != 0;
  c.cell = r.u32() == 0 ? CellType::Gru : CellType::Tanh;
  c.init_half_range = r.f64();
  c.grad_clip_norm = r.f64();
  c.adadelta_rho = r.f64();
  c.adadelta_epsilon = r.f64();

  JointModel model(c);
  const std::uint64_t n_params = r.u64();
  if (n_params != model.params().names().size())
    throw data_error("checkpoint parameter count does not match config");
  for (std::uint64_t i = 0; i < n_params; ++i) {
    const std::string name = r.str();
    const std::uint32_t ndim = r.u32();
    std::vector<std::size_t> shape(ndim);
    for (auto& d : shape) d = r.u64();
    Tensor& t = model.params().value(name);
    if (t.shape != shape) throw data_error("checkpoint shape mismatch for " + name);
    for (double& v : t.data) v = r.f64();
  }
  return model;
}

}  // namespace deepam
