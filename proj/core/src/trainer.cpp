#include "sparsehdp/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "sparsehdp/checkpoint.hpp"
#include "sparsehdp/diagnostics.hpp"
#include "sparsehdp/error.hpp"
#include "sparsehdp/sampler.hpp"

namespace shdp {

namespace {

std::ifstream open_input(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(std::string("cannot open ") + what + " file: " + path.string());
  return in;
}

std::string checkpoint_name(std::uint64_t iteration) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "checkpoint-%08llu.bin",
                static_cast<unsigned long long>(iteration));
  return buf;
}

}  // namespace

Corpus load_training_corpus(const TrainOptions& options) {
  PreprocessSpec spec;
  spec.min_doc_tokens = options.min_doc_tokens;
  spec.rare_word_limit = options.rare_word_limit;
  if (options.stoplist) {
    auto in = open_input(*options.stoplist, "stoplist");
    spec.stoplist = load_stoplist(in);
  }

  auto corpus_in = open_input(options.corpus, "corpus");
  try {
    if (options.format == CorpusFormat::uci) {
      if (!options.vocab) throw std::runtime_error("UCI format requires --vocab");
      auto vocab_in = open_input(*options.vocab, "vocab");
      return preprocess(parse_uci_bow(corpus_in, vocab_in), spec);
    }
    return preprocess(parse_token_lines(corpus_in), spec);
  } catch (const FormatError& e) {
    throw FormatError(options.corpus.string() + ": " + e.what());
  }
}

TrainSummary train(const TrainOptions& options, std::ostream& log) {
  options.config.validate();
  const Corpus corpus = load_training_corpus(options);
  const CorpusStats stats = corpus_stats(corpus);
  log << "corpus: V=" << stats.vocab_size << " D=" << stats.num_docs << " N=" << stats.num_tokens
      << " max_doc_len=" << stats.max_doc_len << '\n';

  std::filesystem::create_directories(options.output_dir);

  HdpConfig config = options.config;
  ModelState state;
  if (options.resume) {
    auto loaded = load_checkpoint(*options.resume, corpus);
    const HdpConfig& saved = loaded.config;
    if (saved.alpha != config.alpha || saved.beta != config.beta || saved.gamma != config.gamma ||
        saved.k_star != config.k_star || saved.seed != config.seed) {
      log << "resume: using alpha, beta, gamma, kstar and seed from the checkpoint\n";
    }
    config.alpha = saved.alpha;
    config.beta = saved.beta;
    config.gamma = saved.gamma;
    config.k_star = saved.k_star;
    config.seed = saved.seed;
    state = std::move(loaded.state);
    log << "resumed at iteration " << state.iteration << '\n';
  } else {
    state = init_state(corpus, config);
  }

  const std::uint64_t every = options.checkpoint_every > 0
                                  ? options.checkpoint_every
                                  : std::max<std::uint64_t>(1, config.iterations / 20);
  TraceWriter trace(options.output_dir / "trace.csv", options.resume.has_value());
  SamplerWorkspace workspace;
  workspace.record_timing = options.record_timing;

  std::uint64_t last_saved = state.iteration;
  while (state.iteration < config.iterations) {
    const TraceRecord record = gibbs_iteration(state, corpus, config, workspace);
    trace.write(record);
    if (record.iteration % every == 0) {
      save_checkpoint(state, config, options.output_dir / checkpoint_name(record.iteration));
      last_saved = record.iteration;
      log << "iteration " << record.iteration << ": joint_ll=" << record.joint_log_likelihood
          << " active_topics=" << record.active_topics
          << " flag_tokens=" << record.flag_topic_tokens << '\n';
    }
  }
  if (last_saved != state.iteration) {
    save_checkpoint(state, config, options.output_dir / checkpoint_name(state.iteration));
  }

  QuantileSummaryOptions summary_options;
  summary_options.top_words = options.summary_top_words;
  const auto summary = quantile_topic_summary(state, corpus.vocab(), summary_options);
  std::ofstream topics(options.output_dir / "topics.txt", std::ios::binary | std::ios::trunc);
  if (!topics) throw std::runtime_error("cannot write " + (options.output_dir / "topics.txt").string());
  write_topic_summary(summary, topics);

  return {state.iteration, active_topic_count(state), stats};
}

}  // namespace shdp
