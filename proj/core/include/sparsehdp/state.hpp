#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sparsehdp/corpus.hpp"

namespace shdp {

/// Topic indices are 0-based; the flag topic that absorbs the truncated GEM
/// tail is `k_star - 1`.
using TopicId = std::uint32_t;

struct HdpConfig {
  double alpha = 0.1;   // document-level DP concentration
  double beta = 0.01;   // symmetric topic-word prior
  double gamma = 1.0;   // GEM concentration of the global topic distribution
  std::uint32_t k_star = 1000;
  std::uint64_t iterations = 1000;
  unsigned threads = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  friend bool operator==(const HdpConfig&, const HdpConfig&) = default;
};

struct TopicCount {
  TopicId topic;
  std::uint32_t count;
  friend bool operator==(const TopicCount&, const TopicCount&) = default;
};

struct WordCount {
  WordId word;
  std::uint32_t count;
  friend bool operator==(const WordCount&, const WordCount&) = default;
};

struct PhiEntry {
  WordId word;
  double prob;
};

/// One PPU draw of a topic-word row: entries are exactly the word types whose
/// Poisson count came out nonzero, sorted by word, normalized by raw_total.
struct SparsePhiRow {
  std::vector<PhiEntry> entries;
  std::uint64_t raw_total = 0;
};

struct ColumnEntry {
  TopicId topic;
  double prob;
};

/// By-word-type view of Phi: for each word, the topics with nonzero
/// probability sorted by topic id.
class PhiColumns {
 public:
  void rebuild(std::span<const SparsePhiRow> rows, std::size_t vocab_size);

  std::span<const ColumnEntry> column(WordId v) const {
    return {entries_.data() + offsets_[v], entries_.data() + offsets_[v + 1]};
  }
  std::size_t vocab_size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t nnz() const { return entries_.size(); }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<ColumnEntry> entries_;
};

struct OccupancyCount {
  std::uint32_t occupancy;  // p: tokens of the topic in a document
  std::uint64_t docs;       // number of documents with exactly p such tokens
  friend bool operator==(const OccupancyCount&, const OccupancyCount&) = default;
};

/// Row k holds the nonzero entries of the doc-count-by-occupancy table,
/// sorted by occupancy.
using DocCountTable = std::vector<std::vector<OccupancyCount>>;

struct ModelState {
  std::uint32_t k_star = 0;
  std::uint64_t iteration = 0;

  std::vector<TopicId> z;  // aligned with Corpus::tokens()

  std::vector<std::vector<TopicCount>> doc_topic;  // m, per document, sorted by topic
  std::vector<std::vector<WordCount>> topic_word;  // n, per topic, sorted by word
  std::vector<std::uint64_t> topic_totals;         // n_{k,.}

  std::vector<SparsePhiRow> phi;
  PhiColumns phi_columns;

  std::vector<double> psi;
  std::vector<std::uint64_t> l;
  DocCountTable dtable;

  TopicId flag_topic() const { return k_star - 1; }
};

struct CountTables {
  std::vector<std::vector<TopicCount>> doc_topic;
  std::vector<std::vector<WordCount>> topic_word;
  std::vector<std::uint64_t> topic_totals;
};

/// Exact counts implied by z. Throws StateError if z is misaligned with the
/// corpus or holds a topic outside [0, k_star).
CountTables rebuild_counts(std::span<const TopicId> z, const Corpus& corpus, std::uint32_t k_star);

DocCountTable rebuild_dtable(const std::vector<std::vector<TopicCount>>& doc_topic,
                             std::uint32_t k_star);

/// D_{k,j} for j = 1..(max occupancy of topic k): the number of documents
/// holding at least j tokens of topic k. Element 0 corresponds to j = 1.
std::vector<std::uint64_t> threshold_counts(const DocCountTable& dtable, TopicId k);

/// Every token in topic 0, counts rebuilt, l_0 set to the number of nonempty
/// documents, Psi drawn from that l and Phi drawn at iteration 0.
/// Throws StateError for an empty corpus and ConfigError for a bad config.
ModelState init_state(const Corpus& corpus, const HdpConfig& config);

/// Rebuilds m, n, totals and the dtable from z. Phi, Psi and l are untouched.
void refresh_counts(ModelState& state, const Corpus& corpus);

struct Violation {
  std::string invariant;
  std::string location;
};

/// Empty iff every ModelState invariant holds.
std::vector<Violation> validate_state(const ModelState& state, const Corpus& corpus);

}  // namespace shdp
