#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "sparsehdp/corpus.hpp"
#include "sparsehdp/state.hpp"

namespace shdp {

enum class CorpusFormat { uci, text };

struct TrainOptions {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> vocab;  // required for uci
  CorpusFormat format = CorpusFormat::uci;
  std::optional<std::filesystem::path> stoplist;
  std::size_t min_doc_tokens = 10;
  std::size_t rare_word_limit = 10;

  HdpConfig config;
  std::filesystem::path output_dir = ".";
  /// 0 means max(1, iterations / 20).
  std::uint64_t checkpoint_every = 0;
  std::size_t summary_top_words = 8;
  std::optional<std::filesystem::path> resume;
  /// When false, the phase timing columns of trace.csv are written as zero so
  /// that runs are byte-comparable.
  bool record_timing = true;
};

/// Reads and preprocesses the corpus named by the options.
/// Throws FormatError / std::runtime_error with the offending path.
Corpus load_training_corpus(const TrainOptions& options);

struct TrainSummary {
  std::uint64_t final_iteration = 0;
  std::uint64_t active_topics = 0;
  CorpusStats stats;
};

/// Loads, preprocesses, initializes (or resumes), runs the sampler up to
/// config.iterations, and writes trace.csv, topics.txt and checkpoints into
/// output_dir. Progress goes to `log`.
TrainSummary train(const TrainOptions& options, std::ostream& log);

}  // namespace shdp
