#include "sparsehdp/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "sparsehdp/error.hpp"

namespace shdp {

namespace {

constexpr std::size_t kDocsPerChunk = 256;

double topic_word_term(const ModelState& state, std::size_t V, double beta) {
  const double vb = static_cast<double>(V) * beta;
  const double lg_vb = std::lgamma(vb);
  const double lg_b = std::lgamma(beta);
  double sum = 0.0;
  for (std::uint32_t k = 0; k < state.k_star; ++k) {
    const std::uint64_t total = state.topic_totals[k];
    if (total == 0) continue;
    double row = lg_vb - std::lgamma(vb + static_cast<double>(total));
    for (const auto& wc : state.topic_word[k]) {
      row += std::lgamma(beta + static_cast<double>(wc.count)) - lg_b;
    }
    sum += row;
  }
  return sum;
}

}  // namespace

double joint_log_likelihood(const ModelState& state, const Corpus& corpus, const HdpConfig& config,
                            unsigned threads) {
  if (state.z.size() != corpus.num_tokens() || state.topic_totals.size() != state.k_star ||
      state.psi.size() != state.k_star) {
    throw StateError("joint_log_likelihood: state is inconsistent with the corpus");
  }
  const double words = topic_word_term(state, corpus.vocab_size(), config.beta);

  const std::size_t D = corpus.num_docs();
  const std::size_t chunks = (D + kDocsPerChunk - 1) / kDocsPerChunk;
  std::vector<double> partial(chunks, 0.0);
  const double alpha = config.alpha;
  const std::uint32_t K = state.k_star;
#pragma omp parallel num_threads(static_cast<int>(std::max(1U, threads)))
  {
    std::vector<std::uint32_t> prefix(K, 0);
#pragma omp for schedule(dynamic, 1)
    for (std::size_t c = 0; c < chunks; ++c) {
      double acc = 0.0;
      const std::size_t end = std::min(D, (c + 1) * kDocsPerChunk);
      for (std::size_t d = c * kDocsPerChunk; d < end; ++d) {
        const std::size_t begin = corpus.doc_begin(d);
        const std::size_t len = corpus.doc_length(d);
        for (std::size_t i = 0; i < len; ++i) {
          const TopicId k = state.z[begin + i];
          acc += std::log(alpha * state.psi[k] + static_cast<double>(prefix[k])) -
                 std::log(alpha + static_cast<double>(i));
          ++prefix[k];
        }
        for (std::size_t i = 0; i < len; ++i) prefix[state.z[begin + i]] = 0;
      }
      partial[c] = acc;
    }
  }
  double docs = 0.0;
  for (const double p : partial) docs += p;
  return words + docs;
}

std::uint64_t active_topic_count(const ModelState& state) {
  return static_cast<std::uint64_t>(std::count_if(state.topic_totals.begin(),
                                                  state.topic_totals.end(),
                                                  [](std::uint64_t n) { return n > 0; }));
}

std::vector<std::vector<TopicId>> select_quantile_topics(std::span<const std::uint64_t> totals,
                                                         const QuantileSummaryOptions& options) {
  std::vector<TopicId> ranked;
  for (std::size_t k = 0; k < totals.size(); ++k) {
    if (totals[k] >= options.min_tokens && totals[k] > 0) ranked.push_back(static_cast<TopicId>(k));
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](TopicId a, TopicId b) { return totals[a] > totals[b]; });

  std::vector<std::vector<TopicId>> out;
  out.reserve(options.quantiles.size());
  const std::size_t R = ranked.size();
  for (const double q : options.quantiles) {
    std::vector<TopicId> chosen;
    if (R > 0) {
      const double target = (1.0 - q) * static_cast<double>(R - 1);
      std::vector<std::size_t> ranks(R);
      std::iota(ranks.begin(), ranks.end(), 0);
      // nearest first; equal distance resolves to the lower rank (more tokens)
      std::stable_sort(ranks.begin(), ranks.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(static_cast<double>(a) - target) <
               std::fabs(static_cast<double>(b) - target) - 1e-12;
      });
      ranks.resize(std::min(R, options.per_quantile));
      std::sort(ranks.begin(), ranks.end());
      for (const auto r : ranks) chosen.push_back(ranked[r]);
    }
    out.push_back(std::move(chosen));
  }
  return out;
}

std::vector<TopicSummary> quantile_topic_summary(const ModelState& state, const Vocabulary& vocab,
                                                 const QuantileSummaryOptions& options) {
  const auto selection = select_quantile_topics(state.topic_totals, options);
  std::vector<TopicSummary> out;
  for (std::size_t qi = 0; qi < selection.size(); ++qi) {
    for (const TopicId k : selection[qi]) {
      TopicSummary s;
      s.quantile = options.quantiles[qi];
      s.topic = k;
      s.tokens = state.topic_totals[k];
      std::vector<WordCount> words(state.topic_word[k].begin(), state.topic_word[k].end());
      std::stable_sort(words.begin(), words.end(), [](const WordCount& a, const WordCount& b) {
        return a.count > b.count;  // rows are sorted by word id already
      });
      words.resize(std::min(words.size(), options.top_words));
      for (const auto& wc : words) s.top_words.emplace_back(vocab.term(wc.word), wc.count);
      out.push_back(std::move(s));
    }
  }
  return out;
}

void write_topic_summary(const std::vector<TopicSummary>& summary, std::ostream& out) {
  out << "quantile\ttopic\ttokens\ttop_words\n";
  for (const auto& s : summary) {
    out << static_cast<int>(std::lround(s.quantile * 100.0)) << "%\t" << s.topic << '\t'
        << s.tokens << '\t';
    for (std::size_t i = 0; i < s.top_words.size(); ++i) {
      if (i > 0) out << ' ';
      out << s.top_words[i].first;
    }
    out << '\n';
  }
}

namespace {

void append_fixed(std::string& out, double value, int precision) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, precision);
  if (ec != std::errc()) throw std::runtime_error("trace: value does not fit in fixed format");
  out.append(buf, ptr);
}

}  // namespace

std::string format_trace_row(const TraceRecord& r) {
  std::string row;
  row += std::to_string(r.iteration);
  row += ',';
  append_fixed(row, r.joint_log_likelihood, 6);
  row += ',';
  row += std::to_string(r.active_topics);
  row += ',';
  row += std::to_string(r.flag_topic_tokens);
  row += ',';
  append_fixed(row, r.max_work_ratio, 6);
  for (const double ms : {r.times.phi_ms, r.times.z_ms, r.times.l_ms, r.times.psi_ms}) {
    row += ',';
    append_fixed(row, ms, 3);
  }
  return row;
}

void write_trace(std::span<const TraceRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open trace file " + path.string());
  out << kTraceHeader << '\n';
  for (const auto& r : records) out << format_trace_row(r) << '\n';
  if (!out.flush()) throw std::runtime_error("failed writing trace file " + path.string());
}

TraceWriter::TraceWriter(const std::filesystem::path& path, bool append) : path_(path) {
  std::error_code ec;
  const bool has_content =
      append && std::filesystem::exists(path, ec) && std::filesystem::file_size(path, ec) > 0;
  out_.open(path, std::ios::binary | (has_content ? std::ios::app : std::ios::trunc));
  if (!out_) throw std::runtime_error("cannot open trace file " + path.string());
  if (!has_content) out_ << kTraceHeader << '\n' << std::flush;
}

void TraceWriter::write(const TraceRecord& record) {
  out_ << format_trace_row(record) << '\n' << std::flush;
  if (!out_) throw std::runtime_error("failed writing trace file " + path_.string());
}

}  // namespace shdp
