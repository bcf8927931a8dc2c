#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sparsehdp/alias.hpp"
#include "sparsehdp/corpus.hpp"
#include "sparsehdp/random.hpp"
#include "sparsehdp/state.hpp"
#include "sparsehdp/trace.hpp"

namespace shdp {

/// Raw Poisson Polya urn counts for one topic-word row: word v receives
/// Poisson(beta + n_{k,v}). The beta part is drawn as a single
/// Poisson(beta * V) total scattered uniformly over the vocabulary; the count
/// part as one Poisson(n_{k,v}) per nonzero entry. Returns the nonzero
/// entries sorted by word. Throws ConfigError if beta <= 0 or V < 1.
std::vector<WordCount> sample_phi_counts(Stream& rng, std::span<const WordCount> n_k, double beta,
                                         std::size_t vocab_size);

SparsePhiRow normalize_phi_counts(std::span<const WordCount> counts);

SparsePhiRow sample_phi_row(Stream& rng, std::span<const WordCount> n_k, double beta,
                            std::size_t vocab_size);

/// Per word type, an alias table over {k : phi_{k,v} > 0} with weights
/// alpha * psi_k * phi_{k,v}. The table's total weight is the bucket (a) mass.
class WordAliases {
 public:
  void rebuild(const PhiColumns& columns, std::span<const double> psi, double alpha,
               unsigned threads = 1);

  const AliasTable& table(WordId v) const { return tables_[v]; }
  double total_a(WordId v) const { return tables_[v].total_weight(); }
  std::size_t size() const { return tables_.size(); }

 private:
  std::vector<AliasTable> tables_;
};

WordAliases build_word_aliases(const PhiColumns& columns, std::span<const double> psi,
                               double alpha);

/// Document-topic counts for the document being swept: dense counts for O(1)
/// lookup plus an unordered list of the nonzero topics.
class DocTopicCounts {
 public:
  explicit DocTopicCounts(std::uint32_t k_star);

  void load(std::span<const TopicCount> m_d);
  /// Writes the nonzero counts sorted by topic and clears the scratch.
  void store(std::vector<TopicCount>& m_d);

  void add(TopicId k);
  void remove(TopicId k);

  std::uint32_t count(TopicId k) const { return counts_[k]; }
  std::span<const TopicId> support() const { return support_; }

 private:
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> position_;
  std::vector<TopicId> support_;
};

struct TokenWork {
  std::uint32_t steps = 0;  // iterations of the bucket (b) intersection loop
  std::uint32_t bound = 0;  // min(nnz(m_d^{-i}), nnz(Phi column))
};

struct BucketEntry {
  TopicId topic;
  double cumulative;
};

/// Draws z_i with probability proportional to
///   alpha psi_k phi_{k,v} + phi_{k,v} m^{-i}_{d,k}.
/// `doc` must already exclude the current token. Bucket (b) iterates whichever
/// of the document support and the Phi column is smaller. Throws StateError
/// when both buckets carry zero mass.
TopicId sample_token(Stream& rng, std::span<const ColumnEntry> column, const AliasTable& alias,
                     const DocTopicCounts& doc, TokenWork& work,
                     std::vector<BucketEntry>& scratch);

struct TopicWordDelta {
  TopicId topic;
  WordId word;
  std::int32_t delta;
};

struct DocumentWork {
  std::vector<TopicWordDelta> deltas;
  std::uint64_t steps = 0;
  std::uint64_t tokens = 0;
  double max_ratio = 0.0;
};

/// Resamples every token of one document in order. n is not read; its changes
/// are appended to `work.deltas`.
void sample_document(Stream& rng, std::span<const WordId> tokens, std::span<TopicId> z_d,
                     std::vector<TopicCount>& m_d, const PhiColumns& columns,
                     const WordAliases& aliases, DocTopicCounts& scratch, DocumentWork& work,
                     std::vector<BucketEntry>& bucket_scratch);

/// l_k = sum_j Binomial(D_{k,j}, theta / (theta + j - 1)) with theta = psi_k
/// alpha; the j = 1 term is deterministic. Throws ConfigError if psi_k < 0.
std::uint64_t sample_l_topic(Stream& rng, double psi_k, double alpha,
                             std::span<const std::uint64_t> thresholds);

/// Stick-breaking posterior: stick k ~ Beta(1 + l_k, gamma + sum_{i>k} l_i)
/// for k < K*-1, with the last stick fixed to 1.
std::vector<double> sample_psi(Stream& rng, std::span<const std::uint64_t> l, double gamma,
                               std::uint32_t k_star);

/// Sweep-level building blocks shared with the reference chain.
void resample_phi_ppu(ModelState& state, const Corpus& corpus, const HdpConfig& config,
                      std::uint64_t iteration);
void sweep_documents(ModelState& state, const Corpus& corpus, const HdpConfig& config,
                     std::uint64_t iteration, const WordAliases& aliases, TraceRecord& record);
void resample_l(ModelState& state, const HdpConfig& config, std::uint64_t iteration);
void resample_psi(ModelState& state, const HdpConfig& config, std::uint64_t iteration);

/// Reusable buffers across iterations.
struct SamplerWorkspace {
  WordAliases aliases;
  bool record_timing = true;
};

/// One sweep of the sparse parallel sampler: Phi rows, word aliases, documents,
/// l, Psi. Advances state.iteration and returns the trace for that iteration.
TraceRecord gibbs_iteration(ModelState& state, const Corpus& corpus, const HdpConfig& config,
                            SamplerWorkspace& workspace);
TraceRecord gibbs_iteration(ModelState& state, const Corpus& corpus, const HdpConfig& config);

/// Fills the state-derived fields of a trace record (likelihood, topic counts).
void summarize_state(const ModelState& state, const Corpus& corpus, const HdpConfig& config,
                     TraceRecord& record);

}  // namespace shdp
