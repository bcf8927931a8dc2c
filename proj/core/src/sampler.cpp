#include "sparsehdp/sampler.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>

#include "sparsehdp/diagnostics.hpp"
#include "sparsehdp/error.hpp"

namespace shdp {

namespace {

constexpr std::size_t kDocsPerChunk = 64;

// Runs body(i) for i in [0, count) on `threads` OpenMP threads and rethrows the
// first exception (lowest index) on the calling thread.
template <typename Init, typename Body>
void parallel_for(std::size_t count, unsigned threads, Init&& init, Body&& body) {
  std::vector<std::exception_ptr> errors(count);
  bool failed = false;
#pragma omp parallel num_threads(static_cast<int>(threads)) reduction(|| : failed)
  {
    auto local = init();
#pragma omp for schedule(dynamic, 1)
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(local, i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  }
  if (failed) {
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
}

struct NoScratch {};

}  // namespace

std::vector<WordCount> sample_phi_counts(Stream& rng, std::span<const WordCount> n_k, double beta,
                                         std::size_t vocab_size) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ConfigError("beta must be positive, got " + std::to_string(beta));
  }
  if (vocab_size < 1) throw ConfigError("vocabulary size must be at least 1");

  // prior part: points of a Poisson process with total rate beta * V placed
  // uniformly over word types
  const std::uint64_t prior_points =
      draw_poisson(rng, beta * static_cast<double>(vocab_size));
  std::vector<WordId> scattered(prior_points);
  for (auto& w : scattered) w = static_cast<WordId>(draw_index(rng, vocab_size));
  std::sort(scattered.begin(), scattered.end());

  std::vector<WordCount> out;
  out.reserve(n_k.size() + scattered.size());
  std::size_t s = 0;
  auto flush_scattered_below = [&](WordId limit) {
    while (s < scattered.size() && scattered[s] < limit) {
      const WordId w = scattered[s];
      std::uint32_t c = 0;
      while (s < scattered.size() && scattered[s] == w) {
        ++c;
        ++s;
      }
      out.push_back({w, c});
    }
  };
  for (const auto& e : n_k) {
    flush_scattered_below(e.word);
    auto c = static_cast<std::uint32_t>(draw_poisson(rng, static_cast<double>(e.count)));
    while (s < scattered.size() && scattered[s] == e.word) {
      ++c;
      ++s;
    }
    if (c > 0) out.push_back({e.word, c});
  }
  flush_scattered_below(static_cast<WordId>(vocab_size));
  return out;
}

SparsePhiRow normalize_phi_counts(std::span<const WordCount> counts) {
  SparsePhiRow row;
  for (const auto& c : counts) row.raw_total += c.count;
  if (row.raw_total == 0) return row;
  row.entries.reserve(counts.size());
  const double total = static_cast<double>(row.raw_total);
  for (const auto& c : counts) {
    if (c.count > 0) row.entries.push_back({c.word, static_cast<double>(c.count) / total});
  }
  return row;
}

SparsePhiRow sample_phi_row(Stream& rng, std::span<const WordCount> n_k, double beta,
                            std::size_t vocab_size) {
  const auto counts = sample_phi_counts(rng, n_k, beta, vocab_size);
  return normalize_phi_counts(counts);
}

void WordAliases::rebuild(const PhiColumns& columns, std::span<const double> psi, double alpha,
                          unsigned threads) {
  const std::size_t V = columns.vocab_size();
  tables_.resize(V);
  struct Scratch {
    std::vector<double> weights;
    std::vector<std::uint32_t> support;
  };
  parallel_for(
      V, threads, [] { return Scratch{}; },
      [&](Scratch& s, std::size_t v) {
        const auto column = columns.column(static_cast<WordId>(v));
        s.weights.clear();
        s.support.clear();
        for (const auto& e : column) {
          s.weights.push_back(alpha * psi[e.topic] * e.prob);
          s.support.push_back(e.topic);
        }
        tables_[v].rebuild(s.weights, s.support);
      });
}

WordAliases build_word_aliases(const PhiColumns& columns, std::span<const double> psi,
                               double alpha) {
  WordAliases aliases;
  aliases.rebuild(columns, psi, alpha);
  return aliases;
}

DocTopicCounts::DocTopicCounts(std::uint32_t k_star) : counts_(k_star, 0), position_(k_star, 0) {}

void DocTopicCounts::load(std::span<const TopicCount> m_d) {
  for (const auto& tc : m_d) {
    if (tc.count == 0) continue;
    counts_[tc.topic] = tc.count;
    position_[tc.topic] = static_cast<std::uint32_t>(support_.size());
    support_.push_back(tc.topic);
  }
}

void DocTopicCounts::store(std::vector<TopicCount>& m_d) {
  std::sort(support_.begin(), support_.end());
  m_d.clear();
  m_d.reserve(support_.size());
  for (const TopicId k : support_) {
    m_d.push_back({k, counts_[k]});
    counts_[k] = 0;
  }
  support_.clear();
}

void DocTopicCounts::add(TopicId k) {
  if (counts_[k]++ == 0) {
    position_[k] = static_cast<std::uint32_t>(support_.size());
    support_.push_back(k);
  }
}

void DocTopicCounts::remove(TopicId k) {
  if (--counts_[k] == 0) {
    const std::uint32_t pos = position_[k];
    const TopicId last = support_.back();
    support_[pos] = last;
    position_[last] = pos;
    support_.pop_back();
  }
}

TopicId sample_token(Stream& rng, std::span<const ColumnEntry> column, const AliasTable& alias,
                     const DocTopicCounts& doc, TokenWork& work,
                     std::vector<BucketEntry>& scratch) {
  const auto support = doc.support();
  const double total_a = alias.total_weight();
  scratch.clear();
  double total_b = 0.0;
  std::uint32_t steps = 0;
  if (support.size() <= column.size()) {
    for (const TopicId k : support) {
      ++steps;
      auto it = std::lower_bound(column.begin(), column.end(), k,
                                 [](const ColumnEntry& e, TopicId t) { return e.topic < t; });
      if (it != column.end() && it->topic == k) {
        total_b += it->prob * static_cast<double>(doc.count(k));
        scratch.push_back({k, total_b});
      }
    }
  } else {
    for (const auto& e : column) {
      ++steps;
      const std::uint32_t c = doc.count(e.topic);
      if (c > 0) {
        total_b += e.prob * static_cast<double>(c);
        scratch.push_back({e.topic, total_b});
      }
    }
  }
  work.steps = steps;
  work.bound = static_cast<std::uint32_t>(std::min(support.size(), column.size()));

  const double total = total_a + total_b;
  if (!(total > 0.0)) {
    throw StateError(
        "zero sampling mass for a token: no topic has positive Phi for its word type");
  }
  double u = draw_uniform(rng) * total;
  if (u < total_a) return alias.draw(rng);
  u -= total_a;
  for (const auto& b : scratch) {
    if (u < b.cumulative) return b.topic;
  }
  return scratch.back().topic;  // u rounded onto the upper edge
}

void sample_document(Stream& rng, std::span<const WordId> tokens, std::span<TopicId> z_d,
                     std::vector<TopicCount>& m_d, const PhiColumns& columns,
                     const WordAliases& aliases, DocTopicCounts& scratch, DocumentWork& work,
                     std::vector<BucketEntry>& bucket_scratch) {
  scratch.load(m_d);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const WordId v = tokens[i];
    const TopicId old_topic = z_d[i];
    scratch.remove(old_topic);
    TokenWork tw;
    if (columns.column(v).empty()) {
      throw StateError("word type " + std::to_string(v) +
                       " has zero probability under every topic this iteration; raise beta, "
                       "k_star or the rare-word limit");
    }
    const TopicId new_topic =
        sample_token(rng, columns.column(v), aliases.table(v), scratch, tw, bucket_scratch);
    scratch.add(new_topic);
    z_d[i] = new_topic;
    if (new_topic != old_topic) {
      work.deltas.push_back({old_topic, v, -1});
      work.deltas.push_back({new_topic, v, +1});
    }
    work.steps += tw.steps;
    ++work.tokens;
    const double ratio = tw.bound > 0 ? static_cast<double>(tw.steps) / tw.bound
                                      : (tw.steps > 0 ? INFINITY : 0.0);
    work.max_ratio = std::max(work.max_ratio, ratio);
  }
  scratch.store(m_d);
}

std::uint64_t sample_l_topic(Stream& rng, double psi_k, double alpha,
                             std::span<const std::uint64_t> thresholds) {
  if (!(psi_k >= 0.0)) throw ConfigError("psi_k must be nonnegative, got " + std::to_string(psi_k));
  if (thresholds.empty()) return 0;
  const double theta = psi_k * alpha;
  // first draw in every occupied document comes from Psi with probability 1
  std::uint64_t l = thresholds[0];
  for (std::size_t j = 1; j < thresholds.size(); ++j) {
    const double p = theta / (theta + static_cast<double>(j));
    l += draw_binomial(rng, thresholds[j], p);
  }
  return l;
}

std::vector<double> sample_psi(Stream& rng, std::span<const std::uint64_t> l, double gamma,
                               std::uint32_t k_star) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("gamma must be positive, got " + std::to_string(gamma));
  }
  if (k_star < 1 || l.size() != k_star) {
    throw ConfigError("l must have exactly k_star entries");
  }
  std::vector<double> tail(k_star + 1, 0.0);  // tail[k] = sum_{i >= k} l_i
  for (std::size_t k = k_star; k > 0; --k) tail[k - 1] = tail[k] + static_cast<double>(l[k - 1]);

  std::vector<double> psi(k_star, 0.0);
  double rest = 1.0;
  for (std::uint32_t k = 0; k + 1 < k_star; ++k) {
    const double stick = draw_beta(rng, 1.0 + static_cast<double>(l[k]), gamma + tail[k + 1]);
    psi[k] = stick * rest;
    rest *= 1.0 - stick;
  }
  psi[k_star - 1] = rest;
  return psi;
}

void resample_phi_ppu(ModelState& state, const Corpus& corpus, const HdpConfig& config,
                      std::uint64_t iteration) {
  state.phi.resize(state.k_star);
  const std::size_t V = corpus.vocab_size();
  parallel_for(
      state.k_star, config.threads, [] { return NoScratch{}; },
      [&](NoScratch&, std::size_t k) {
        Stream rng = derive_stream({config.seed, iteration, UnitKind::phi_row, k});
        state.phi[k] = sample_phi_row(rng, state.topic_word[k], config.beta, V);
      });
  state.phi_columns.rebuild(state.phi, V);
}

namespace {

void apply_deltas(ModelState& state, std::vector<TopicWordDelta>& deltas) {
  std::sort(deltas.begin(), deltas.end(), [](const TopicWordDelta& a, const TopicWordDelta& b) {
    return a.topic != b.topic ? a.topic < b.topic : a.word < b.word;
  });
  std::vector<WordCount> merged;
  std::size_t i = 0;
  while (i < deltas.size()) {
    const TopicId k = deltas[i].topic;
    auto& row = state.topic_word[k];
    merged.clear();
    merged.reserve(row.size() + 8);
    std::size_t r = 0;
    std::int64_t total_change = 0;
    while (i < deltas.size() && deltas[i].topic == k) {
      const WordId w = deltas[i].word;
      std::int64_t change = 0;
      while (i < deltas.size() && deltas[i].topic == k && deltas[i].word == w) {
        change += deltas[i].delta;
        ++i;
      }
      while (r < row.size() && row[r].word < w) merged.push_back(row[r++]);
      std::int64_t current = 0;
      if (r < row.size() && row[r].word == w) current = row[r++].count;
      const std::int64_t updated = current + change;
      if (updated < 0) throw StateError("negative topic-word count after merge");
      if (updated > 0) merged.push_back({w, static_cast<std::uint32_t>(updated)});
      total_change += change;
    }
    while (r < row.size()) merged.push_back(row[r++]);
    row.swap(merged);
    state.topic_totals[k] = static_cast<std::uint64_t>(
        static_cast<std::int64_t>(state.topic_totals[k]) + total_change);
  }
}

}  // namespace

void sweep_documents(ModelState& state, const Corpus& corpus, const HdpConfig& config,
                     std::uint64_t iteration, const WordAliases& aliases, TraceRecord& record) {
  const std::size_t D = corpus.num_docs();
  const std::size_t chunks = (D + kDocsPerChunk - 1) / kDocsPerChunk;
  std::vector<DocumentWork> chunk_work(chunks);
  struct Scratch {
    DocTopicCounts doc;
    std::vector<BucketEntry> buckets;
  };
  const std::uint32_t K = state.k_star;
  parallel_for(
      chunks, config.threads, [K] { return Scratch{DocTopicCounts(K), {}}; },
      [&](Scratch& s, std::size_t c) {
        const std::size_t end = std::min(D, (c + 1) * kDocsPerChunk);
        for (std::size_t d = c * kDocsPerChunk; d < end; ++d) {
          Stream rng = derive_stream({config.seed, iteration, UnitKind::document, d});
          std::span<TopicId> z_d(state.z.data() + corpus.doc_begin(d), corpus.doc_length(d));
          sample_document(rng, corpus.doc(d), z_d, state.doc_topic[d], state.phi_columns,
                          aliases, s.doc, chunk_work[c], s.buckets);
        }
      });

  std::size_t total_deltas = 0;
  for (const auto& w : chunk_work) total_deltas += w.deltas.size();
  std::vector<TopicWordDelta> deltas;
  deltas.reserve(total_deltas);
  record.max_work_ratio = 0.0;
  record.work_steps = 0;
  record.tokens_sampled = 0;
  for (auto& w : chunk_work) {  // ascending document order
    deltas.insert(deltas.end(), w.deltas.begin(), w.deltas.end());
    record.work_steps += w.steps;
    record.tokens_sampled += w.tokens;
    record.max_work_ratio = std::max(record.max_work_ratio, w.max_ratio);
  }
  apply_deltas(state, deltas);
}

void resample_l(ModelState& state, const HdpConfig& config, std::uint64_t iteration) {
  state.dtable = rebuild_dtable(state.doc_topic, state.k_star);
  state.l.assign(state.k_star, 0);
  parallel_for(
      state.k_star, config.threads, [] { return NoScratch{}; },
      [&](NoScratch&, std::size_t k) {
        const auto thresholds = threshold_counts(state.dtable, static_cast<TopicId>(k));
        if (thresholds.empty()) return;
        Stream rng = derive_stream({config.seed, iteration, UnitKind::l_topic, k});
        state.l[k] = sample_l_topic(rng, state.psi[k], config.alpha, thresholds);
      });
}

void resample_psi(ModelState& state, const HdpConfig& config, std::uint64_t iteration) {
  Stream rng = derive_stream({config.seed, iteration, UnitKind::psi, 0});
  state.psi = sample_psi(rng, state.l, config.gamma, state.k_star);
}

void summarize_state(const ModelState& state, const Corpus& corpus, const HdpConfig& config,
                     TraceRecord& record) {
  record.iteration = state.iteration;
  record.joint_log_likelihood = joint_log_likelihood(state, corpus, config);
  record.active_topics = active_topic_count(state);
  record.flag_topic_tokens = state.topic_totals[state.flag_topic()];
  record.tokens_per_topic = state.topic_totals;
}

TraceRecord gibbs_iteration(ModelState& state, const Corpus& corpus, const HdpConfig& config,
                            SamplerWorkspace& workspace) {
  using Clock = std::chrono::steady_clock;
  const auto ms_since = [](Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };
  TraceRecord record;
  const std::uint64_t iteration = state.iteration + 1;

  auto t0 = Clock::now();
  resample_phi_ppu(state, corpus, config, iteration);
  workspace.aliases.rebuild(state.phi_columns, state.psi, config.alpha, config.threads);
  const double phi_ms = ms_since(t0);

  t0 = Clock::now();
  sweep_documents(state, corpus, config, iteration, workspace.aliases, record);
  const double z_ms = ms_since(t0);

  t0 = Clock::now();
  resample_l(state, config, iteration);
  const double l_ms = ms_since(t0);

  t0 = Clock::now();
  resample_psi(state, config, iteration);
  const double psi_ms = ms_since(t0);

  state.iteration = iteration;
  summarize_state(state, corpus, config, record);
  if (workspace.record_timing) record.times = {phi_ms, z_ms, l_ms, psi_ms};
  return record;
}

TraceRecord gibbs_iteration(ModelState& state, const Corpus& corpus, const HdpConfig& config) {
  SamplerWorkspace workspace;
  return gibbs_iteration(state, corpus, config, workspace);
}

}  // namespace shdp
