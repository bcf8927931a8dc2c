#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sparsehdp/corpus.hpp"
#include "sparsehdp/state.hpp"
#include "sparsehdp/trace.hpp"

namespace shdp {

/// log p(w | z, beta) + log p(z | Psi, alpha), with Phi, theta and the b flags
/// integrated out:
///   sum_k [lgG(V b) - lgG(V b + n_k.) + sum_v (lgG(b + n_kv) - lgG(b))]
/// + sum_d sum_i log((alpha psi_{z_i} + m^{<i}_{d,z_i}) / (alpha + i - 1)).
/// Documents are reduced in fixed chunks, so the value does not depend on
/// `threads`.
double joint_log_likelihood(const ModelState& state, const Corpus& corpus, const HdpConfig& config,
                            unsigned threads = 1);

std::uint64_t active_topic_count(const ModelState& state);

struct QuantileSummaryOptions {
  std::vector<double> quantiles{1.0, 0.75, 0.5, 0.25, 0.05};
  std::size_t per_quantile = 5;
  std::size_t top_words = 8;
  std::uint64_t min_tokens = 100;
};

struct TopicSummary {
  double quantile = 0.0;
  TopicId topic = 0;
  std::uint64_t tokens = 0;
  std::vector<std::pair<std::string, std::uint32_t>> top_words;
};

/// Ranks topics with at least `min_tokens` tokens by descending token count
/// (ties by topic id) and, for each quantile q, picks the `per_quantile` topics
/// whose rank is nearest to (1 - q) * (R - 1); ties go to the higher-count topic.
/// Returns one list of topic ids per quantile, ordered by rank.
std::vector<std::vector<TopicId>> select_quantile_topics(std::span<const std::uint64_t> totals,
                                                         const QuantileSummaryOptions& options);

std::vector<TopicSummary> quantile_topic_summary(const ModelState& state, const Vocabulary& vocab,
                                                 const QuantileSummaryOptions& options = {});

/// Tab-separated: quantile, topic, tokens, then space-separated top words.
void write_topic_summary(const std::vector<TopicSummary>& summary, std::ostream& out);

inline constexpr const char* kTraceHeader =
    "iteration,joint_ll,active_topics,flag_tokens,max_work_ratio,phase_ms_phi,phase_ms_z,"
    "phase_ms_l,phase_ms_psi";

/// One CSV row (no trailing newline), fixed decimal places.
std::string format_trace_row(const TraceRecord& record);

/// Header plus one row per record. Throws std::runtime_error on I/O failure.
void write_trace(std::span<const TraceRecord> records, const std::filesystem::path& path);

/// Streams trace rows to disk, flushing after every row.
class TraceWriter {
 public:
  /// With `append`, an existing file is extended; a new or empty file gets the header.
  TraceWriter(const std::filesystem::path& path, bool append);
  void write(const TraceRecord& record);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace shdp
