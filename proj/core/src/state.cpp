#include "sparsehdp/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparsehdp/error.hpp"
#include "sparsehdp/random.hpp"
#include "sparsehdp/sampler.hpp"

namespace shdp {

void HdpConfig::validate() const {
  const auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (!positive(alpha)) throw ConfigError("alpha must be positive, got " + std::to_string(alpha));
  if (!positive(beta)) throw ConfigError("beta must be positive, got " + std::to_string(beta));
  if (!positive(gamma)) throw ConfigError("gamma must be positive, got " + std::to_string(gamma));
  if (k_star < 1) throw ConfigError("k_star must be at least 1");
  if (iterations < 1) throw ConfigError("iterations must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

void PhiColumns::rebuild(std::span<const SparsePhiRow> rows, std::size_t vocab_size) {
  offsets_.assign(vocab_size + 1, 0);
  for (const auto& row : rows) {
    for (const auto& e : row.entries) ++offsets_[e.word + 1];
  }
  for (std::size_t v = 0; v < vocab_size; ++v) offsets_[v + 1] += offsets_[v];
  entries_.resize(offsets_[vocab_size]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  // rows visited in topic order, so every column comes out sorted by topic
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (const auto& e : rows[k].entries) {
      entries_[fill[e.word]++] = {static_cast<TopicId>(k), e.prob};
    }
  }
}

CountTables rebuild_counts(std::span<const TopicId> z, const Corpus& corpus, std::uint32_t k_star) {
  if (z.size() != corpus.num_tokens()) {
    throw StateError("z has " + std::to_string(z.size()) + " entries but the corpus has " +
                     std::to_string(corpus.num_tokens()) + " tokens");
  }
  CountTables out;
  out.doc_topic.resize(corpus.num_docs());
  out.topic_word.resize(k_star);
  out.topic_totals.assign(k_star, 0);

  std::vector<std::uint32_t> dense(k_star, 0);
  std::vector<TopicId> touched;
  std::vector<std::vector<WordId>> words_by_topic(k_star);
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    const std::size_t begin = corpus.doc_begin(d);
    const auto doc = corpus.doc(d);
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const TopicId k = z[begin + i];
      if (k >= k_star) {
        throw StateError("topic " + std::to_string(k) + " at token " + std::to_string(begin + i) +
                         " outside [0, " + std::to_string(k_star) + ")");
      }
      if (dense[k]++ == 0) touched.push_back(k);
      words_by_topic[k].push_back(doc[i]);
      ++out.topic_totals[k];
    }
    std::sort(touched.begin(), touched.end());
    auto& m_d = out.doc_topic[d];
    m_d.reserve(touched.size());
    for (const TopicId k : touched) {
      m_d.push_back({k, dense[k]});
      dense[k] = 0;
    }
    touched.clear();
  }
  for (std::uint32_t k = 0; k < k_star; ++k) {
    auto& words = words_by_topic[k];
    std::sort(words.begin(), words.end());
    auto& row = out.topic_word[k];
    for (std::size_t i = 0; i < words.size();) {
      std::size_t j = i;
      while (j < words.size() && words[j] == words[i]) ++j;
      row.push_back({words[i], static_cast<std::uint32_t>(j - i)});
      i = j;
    }
  }
  return out;
}

DocCountTable rebuild_dtable(const std::vector<std::vector<TopicCount>>& doc_topic,
                             std::uint32_t k_star) {
  std::vector<std::vector<std::uint32_t>> occupancies(k_star);
  for (const auto& m_d : doc_topic) {
    for (const auto& tc : m_d) occupancies.at(tc.topic).push_back(tc.count);
  }
  DocCountTable table(k_star);
  for (std::uint32_t k = 0; k < k_star; ++k) {
    auto& occ = occupancies[k];
    std::sort(occ.begin(), occ.end());
    for (std::size_t i = 0; i < occ.size();) {
      std::size_t j = i;
      while (j < occ.size() && occ[j] == occ[i]) ++j;
      if (occ[i] > 0) table[k].push_back({occ[i], j - i});
      i = j;
    }
  }
  return table;
}

std::vector<std::uint64_t> threshold_counts(const DocCountTable& dtable, TopicId k) {
  const auto& row = dtable.at(k);
  if (row.empty()) return {};
  std::vector<std::uint64_t> out(row.back().occupancy, 0);
  for (const auto& e : row) out[e.occupancy - 1] += e.docs;
  for (std::size_t j = out.size() - 1; j > 0; --j) out[j - 1] += out[j];
  return out;
}

void refresh_counts(ModelState& state, const Corpus& corpus) {
  auto counts = rebuild_counts(state.z, corpus, state.k_star);
  state.doc_topic = std::move(counts.doc_topic);
  state.topic_word = std::move(counts.topic_word);
  state.topic_totals = std::move(counts.topic_totals);
  state.dtable = rebuild_dtable(state.doc_topic, state.k_star);
}

ModelState init_state(const Corpus& corpus, const HdpConfig& config) {
  config.validate();
  if (corpus.num_tokens() == 0) throw StateError("cannot initialize a sampler on an empty corpus");

  ModelState state;
  state.k_star = config.k_star;
  state.iteration = 0;
  state.z.assign(corpus.num_tokens(), 0);
  refresh_counts(state, corpus);

  state.l.assign(config.k_star, 0);
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    if (corpus.doc_length(d) > 0) ++state.l[0];
  }
  Stream psi_rng = derive_stream({config.seed, 0, UnitKind::init, 0});
  state.psi = sample_psi(psi_rng, state.l, config.gamma, config.k_star);
  resample_phi_ppu(state, corpus, config, 0);
  return state;
}

namespace {

std::string doc_loc(std::size_t d) { return "document " + std::to_string(d); }
std::string topic_loc(std::size_t k) { return "topic " + std::to_string(k); }

}  // namespace

std::vector<Violation> validate_state(const ModelState& state, const Corpus& corpus) {
  std::vector<Violation> out;
  const std::uint32_t K = state.k_star;
  if (K < 1) {
    out.push_back({"k_star >= 1", "state"});
    return out;
  }
  if (state.z.size() != corpus.num_tokens()) {
    out.push_back({"z aligned with corpus", "z"});
    return out;
  }
  if (state.doc_topic.size() != corpus.num_docs() || state.topic_word.size() != K ||
      state.topic_totals.size() != K || state.psi.size() != K || state.l.size() != K ||
      state.phi.size() != K || state.dtable.size() != K) {
    out.push_back({"container sizes match D and K*", "state"});
    return out;
  }
  for (std::size_t i = 0; i < state.z.size(); ++i) {
    if (state.z[i] >= K) {
      out.push_back({"z within [0, K*)", "token " + std::to_string(i)});
      return out;
    }
  }

  const CountTables expected = rebuild_counts(state.z, corpus, K);
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    if (state.doc_topic[d] != expected.doc_topic[d]) {
      out.push_back({"m consistent with z", doc_loc(d)});
    }
  }
  std::uint64_t grand = 0;
  for (std::uint32_t k = 0; k < K; ++k) {
    std::uint64_t sum = 0;
    for (const auto& wc : state.topic_word[k]) sum += wc.count;
    if (sum != state.topic_totals[k]) out.push_back({"sum_v n_{k,v} = n_{k,.}", topic_loc(k)});
    if (state.topic_word[k] != expected.topic_word[k] ||
        state.topic_totals[k] != expected.topic_totals[k]) {
      out.push_back({"n consistent with z", topic_loc(k)});
    }
    grand += state.topic_totals[k];
  }
  if (grand != corpus.num_tokens()) out.push_back({"sum_k n_{k,.} = N", "topic totals"});

  const DocCountTable dt = rebuild_dtable(expected.doc_topic, K);
  for (std::uint32_t k = 0; k < K; ++k) {
    if (state.dtable[k] != dt[k]) out.push_back({"dtable consistent with m", topic_loc(k)});
    std::uint64_t weighted = 0;
    for (const auto& e : state.dtable[k]) weighted += e.occupancy * e.docs;
    if (weighted != expected.topic_totals[k]) {
      out.push_back({"dtable occupancy-weighted sum = sum_d m_{d,k}", topic_loc(k)});
    }
  }

  double psi_sum = 0.0;
  for (std::uint32_t k = 0; k < K; ++k) {
    if (!(state.psi[k] >= 0.0)) out.push_back({"psi_k >= 0", topic_loc(k)});
    psi_sum += state.psi[k];
  }
  if (!(std::fabs(psi_sum - 1.0) <= 1e-12)) out.push_back({"sum_k psi_k = 1", "psi"});

  for (std::uint32_t k = 0; k < K; ++k) {
    const std::uint64_t total = expected.topic_totals[k];
    const auto thresholds = threshold_counts(dt, k);
    const std::uint64_t occupied_docs = thresholds.empty() ? 0 : thresholds[0];
    if (total == 0) {
      if (state.l[k] != 0) out.push_back({"l_k = 0 for empty topics", topic_loc(k)});
    } else if (state.l[k] < occupied_docs || state.l[k] > total) {
      out.push_back({"D_{k,1} <= l_k <= sum_d m_{d,k}", topic_loc(k)});
    }
  }

  std::size_t phi_nnz = 0;
  for (std::uint32_t k = 0; k < K; ++k) {
    const auto& row = state.phi[k];
    phi_nnz += row.entries.size();
    double sum = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < row.entries.size(); ++i) {
      const auto& e = row.entries[i];
      if (e.word >= corpus.vocab_size() || !(e.prob > 0.0) ||
          (i > 0 && row.entries[i - 1].word >= e.word)) {
        ok = false;
      }
      sum += e.prob;
    }
    if (!ok) out.push_back({"phi row sorted, in range, positive", topic_loc(k)});
    if (!row.entries.empty() && !(std::fabs(sum - 1.0) <= 1e-12)) {
      out.push_back({"phi row sums to 1", topic_loc(k)});
    }
  }
  if (state.phi_columns.vocab_size() != corpus.vocab_size() ||
      state.phi_columns.nnz() != phi_nnz) {
    out.push_back({"phi column view matches rows", "phi columns"});
  }
  return out;
}

}  // namespace shdp
