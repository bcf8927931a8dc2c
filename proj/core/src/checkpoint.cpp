#include "sparsehdp/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "sparsehdp/error.hpp"
#include "sparsehdp/sampler.hpp"

namespace shdp {

namespace {

constexpr char kMagic[8] = {'S', 'H', 'D', 'P', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  void raw(const void* data, std::size_t n) {
    buf_.append(static_cast<const char*>(data), n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      buf_.push_back(static_cast<char>((v & 0x7F) | 0x80));
      v >>= 7;
    }
    buf_.push_back(static_cast<char>(v));
  }
  void svarint(std::int64_t v) {
    varint((static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63));
  }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const std::string& buf, std::size_t begin, std::size_t end)
      : buf_(buf), pos_(begin), end_(end) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      need(1);
      const std::uint8_t b = byte();
      v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if ((b & 0x80) == 0) return v;
    }
    throw CheckpointError("checkpoint corrupted: overlong varint");
  }
  std::int64_t svarint() {
    const std::uint64_t u = varint();
    return static_cast<std::int64_t>((u >> 1) ^ (~(u & 1) + 1));
  }
  bool done() const { return pos_ == end_; }

 private:
  void need(std::size_t n) const {
    if (end_ - pos_ < n) throw CheckpointError("checkpoint truncated");
  }
  std::uint8_t byte() { return static_cast<std::uint8_t>(buf_[pos_++]); }

  const std::string& buf_;
  std::size_t pos_;
  std::size_t end_;
};

std::uint32_t checksum(const std::string& buf, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < n) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n - off, 1U << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data() + off), chunk);
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void save_checkpoint(const ModelState& state, const HdpConfig& config,
                     const std::filesystem::path& path) {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kCheckpointVersion);
  w.f64(config.alpha);
  w.f64(config.beta);
  w.f64(config.gamma);
  w.u32(config.k_star);
  w.u64(config.iterations);
  w.u32(config.threads);
  w.u64(config.seed);
  w.u64(state.iteration);

  // document boundaries come from m: each document's length is sum_k m_{d,k}
  w.u64(state.doc_topic.size());
  w.u64(state.z.size());
  std::size_t pos = 0;
  for (const auto& m_d : state.doc_topic) {
    std::uint64_t len = 0;
    for (const auto& tc : m_d) len += tc.count;
    w.varint(len);
    std::int64_t prev = 0;
    for (std::uint64_t i = 0; i < len; ++i) {
      const auto k = static_cast<std::int64_t>(state.z.at(pos++));
      w.svarint(k - prev);
      prev = k;
    }
  }
  for (const auto l : state.l) w.varint(l);
  for (const double p : state.psi) w.f64(p);
  auto& buf = w.buffer();
  const std::uint32_t crc = checksum(buf, buf.size());
  w.u32(crc);

  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open checkpoint file " + tmp.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out.flush()) throw CheckpointError("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path, const Corpus& corpus) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  constexpr std::size_t header = sizeof(kMagic) + 4;
  if (buf.size() < header + 4 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a checkpoint file (or truncated): " + path.string());
  }
  Reader head(buf, sizeof(kMagic), header);
  const std::uint32_t version = head.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) +
                          " is not supported (expected " + std::to_string(kCheckpointVersion) +
                          ")");
  }
  const std::size_t body_end = buf.size() - 4;
  Reader tail(buf, body_end, buf.size());
  if (tail.u32() != checksum(buf, body_end)) {
    throw CheckpointError("checkpoint checksum mismatch (corrupted or truncated): " +
                          path.string());
  }

  Reader r(buf, header, body_end);
  LoadedCheckpoint out;
  HdpConfig& config = out.config;
  config.alpha = r.f64();
  config.beta = r.f64();
  config.gamma = r.f64();
  config.k_star = r.u32();
  config.iterations = r.u64();
  config.threads = r.u32();
  config.seed = r.u64();
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint holds an invalid config: ") + e.what());
  }

  ModelState& state = out.state;
  state.k_star = config.k_star;
  state.iteration = r.u64();
  const std::uint64_t num_docs = r.u64();
  const std::uint64_t num_tokens = r.u64();
  if (num_docs != corpus.num_docs() || num_tokens != corpus.num_tokens()) {
    throw CheckpointError("checkpoint was written for a different corpus (D=" +
                          std::to_string(num_docs) + ", N=" + std::to_string(num_tokens) + ")");
  }
  state.z.reserve(num_tokens);
  for (std::uint64_t d = 0; d < num_docs; ++d) {
    const std::uint64_t len = r.varint();
    if (len != corpus.doc_length(d)) {
      throw CheckpointError("checkpoint document " + std::to_string(d) +
                            " length differs from the corpus");
    }
    std::int64_t prev = 0;
    for (std::uint64_t i = 0; i < len; ++i) {
      prev += r.svarint();
      if (prev < 0 || prev >= static_cast<std::int64_t>(config.k_star)) {
        throw CheckpointError("checkpoint corrupted: topic id out of range");
      }
      state.z.push_back(static_cast<TopicId>(prev));
    }
  }
  state.l.resize(config.k_star);
  for (auto& l : state.l) l = r.varint();
  state.psi.resize(config.k_star);
  for (auto& p : state.psi) p = r.f64();
  if (!r.done()) throw CheckpointError("checkpoint corrupted: trailing bytes");

  refresh_counts(state, corpus);
  resample_phi_ppu(state, corpus, config, state.iteration);
  return out;
}

}  // namespace shdp
