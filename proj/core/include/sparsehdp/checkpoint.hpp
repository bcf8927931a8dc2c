#pragma once

#include <filesystem>

#include "sparsehdp/corpus.hpp"
#include "sparsehdp/state.hpp"

namespace shdp {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary checkpoint layout (little-endian):
///   "SHDPCKPT" | u32 version | payload | u32 crc32(magic..payload)
/// payload: config, iteration, D, N, per-document length and zigzag
/// delta-encoded topic ids (LEB128), l (LEB128), psi (raw IEEE-754 bits).
/// Sufficient statistics are not stored; they are rebuilt from z on load.
void save_checkpoint(const ModelState& state, const HdpConfig& config,
                     const std::filesystem::path& path);

struct LoadedCheckpoint {
  ModelState state;
  HdpConfig config;
};

/// Restores z, l, psi, the iteration counter and the config, rebuilds m, n and
/// the dtable, and draws Phi from the restored counts. Throws CheckpointError
/// on a version mismatch, a checksum failure, truncation, or a corpus whose
/// document lengths differ from the checkpoint's.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path, const Corpus& corpus);

}  // namespace shdp
