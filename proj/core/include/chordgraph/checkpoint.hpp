#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "chordgraph/layers.hpp"

namespace chordgraph {

/// Named-parameter flat binary. All integers and floats little-endian:
///
///   magic    8 bytes  "CGNNCKPT"
///   version  u32      (currently 1)
///   meta_len u32, then meta_len bytes of UTF-8 key=value lines
///   count    u32
///   count x { name_len u32, name bytes, ndim u32, dims u64[ndim],
///             data f64[prod(dims)] }
struct CheckpointEntry {
  std::string name;
  std::vector<std::uint64_t> shape;
  std::vector<double> data;
};

struct Checkpoint {
  std::string metadata;
  std::vector<CheckpointEntry> entries;

  const CheckpointEntry *find(const std::string &name) const;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_checkpoint(std::ostream &out, const Checkpoint &ckpt);
Checkpoint read_checkpoint(std::istream &in);
void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt);
Checkpoint load_checkpoint(const std::filesystem::path &path);

Checkpoint make_checkpoint(const ad::NamedTensors &params, std::string metadata);
/// Copies values into `params` by name; names and shapes must match exactly.
void restore_parameters(const Checkpoint &ckpt, ad::NamedTensors &params);

}  // namespace chordgraph
