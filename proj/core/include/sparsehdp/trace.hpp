#pragma once

#include <cstdint>
#include <vector>

namespace shdp {

struct PhaseTimes {
  double phi_ms = 0.0;  // PPU rows, column view, word alias tables
  double z_ms = 0.0;    // document sweep and count merge
  double l_ms = 0.0;    // dtable rebuild and l draws
  double psi_ms = 0.0;
};

/// Per-iteration diagnostics emitted by gibbs_iteration.
struct TraceRecord {
  std::uint64_t iteration = 0;
  double joint_log_likelihood = 0.0;
  std::uint64_t active_topics = 0;
  std::uint64_t flag_topic_tokens = 0;
  std::vector<std::uint64_t> tokens_per_topic;
  /// max over tokens of (intersection steps) / min(nnz(m_d^{-i}), nnz(Phi column))
  double max_work_ratio = 0.0;
  std::uint64_t work_steps = 0;
  std::uint64_t tokens_sampled = 0;
  PhaseTimes times;
};

}  // namespace shdp
