#include "chordgraph/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <type_traits>

namespace chordgraph {

namespace {

constexpr char kMagic[8] = {'C', 'G', 'N', 'N', 'C', 'K', 'P', 'T'};

template <typename T>
void put_le(std::ostream &out, T value) {
  unsigned char bytes[sizeof(T)];
  std::uint64_t raw = 0;
  if constexpr (std::is_same_v<T, double>) {
    raw = std::bit_cast<std::uint64_t>(value);
  } else {
    raw = static_cast<std::uint64_t>(value);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>((raw >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char *>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream &in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char *>(bytes), sizeof(T))) throw CheckpointError("checkpoint truncated");
  std::uint64_t raw = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) raw |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(raw);
  } else {
    return static_cast<T>(raw);
  }
}

std::string get_bytes(std::istream &in, std::size_t n) {
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) throw CheckpointError("checkpoint truncated");
  return s;
}

}  // namespace

const CheckpointEntry *Checkpoint::find(const std::string &name) const {
  for (const auto &e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

void write_checkpoint(std::ostream &out, const Checkpoint &ckpt) {
  out.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.metadata.size()));
  out.write(ckpt.metadata.data(), static_cast<std::streamsize>(ckpt.metadata.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.entries.size()));
  for (const auto &e : ckpt.entries) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
    out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.shape.size()));
    for (std::uint64_t d : e.shape) put_le<std::uint64_t>(out, d);
    for (double v : e.data) put_le<double>(out, v);
  }
  if (!out) throw CheckpointError("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream &in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw CheckpointError("not a checkpoint file (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.metadata = get_bytes(in, get_le<std::uint32_t>(in));
  const auto count = get_le<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointEntry e;
    e.name = get_bytes(in, get_le<std::uint32_t>(in));
    const auto ndim = get_le<std::uint32_t>(in);
    std::uint64_t total = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      e.shape.push_back(get_le<std::uint64_t>(in));
      total *= e.shape.back();
    }
    if (total > (std::uint64_t{1} << 32)) throw CheckpointError("implausible tensor size in checkpoint");
    e.data.resize(total);
    for (double &v : e.data) v = get_le<double>(in);
    ckpt.entries.push_back(std::move(e));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open '" + path.string() + "' for writing");
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open '" + path.string() + "'");
  return read_checkpoint(in);
}

Checkpoint make_checkpoint(const ad::NamedTensors &params, std::string metadata) {
  Checkpoint ckpt;
  ckpt.metadata = std::move(metadata);
  for (const auto &[name, t] : params) {
    ckpt.entries.push_back({name, {t.rows(), t.cols()}, std::vector<double>(t.values().begin(), t.values().end())});
  }
  return ckpt;
}

void restore_parameters(const Checkpoint &ckpt, ad::NamedTensors &params) {
  if (ckpt.entries.size() != params.size()) {
    throw CheckpointError("checkpoint holds " + std::to_string(ckpt.entries.size()) + " tensors, model expects " +
                          std::to_string(params.size()));
  }
  for (auto &[name, t] : params) {
    const CheckpointEntry *e = ckpt.find(name);
    if (!e) throw CheckpointError("checkpoint lacks parameter '" + name + "'");
    if (e->shape != std::vector<std::uint64_t>{t.rows(), t.cols()}) {
      throw CheckpointError("shape mismatch for parameter '" + name + "'");
    }
    std::copy(e->data.begin(), e->data.end(), t.values().begin());
  }
}

}  // namespace chordgraph
