// Trains the sparse parallel HDP topic model on a UCI bag-of-words or
// plain-text corpus, writing trace.csv, topics.txt and checkpoints.

#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "sparsehdp/error.hpp"
#include "sparsehdp/trainer.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sparse parallel Gibbs sampler for the HDP topic model"};
  shdp::TrainOptions opt;
  std::string corpus;
  std::string vocab;
  std::string stoplist;
  std::string resume;
  std::string output_dir = ".";
  bool no_timing = false;

  app.add_option("--corpus", corpus, "docword.txt (uci) or one-document-per-line text file")
      ->required();
  app.add_option("--vocab", vocab, "vocab.txt, required for --format uci");
  const std::map<std::string, shdp::CorpusFormat> formats{{"uci", shdp::CorpusFormat::uci},
                                                          {"text", shdp::CorpusFormat::text}};
  app.add_option("--format", opt.format, "corpus format")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
      ->default_str("uci");
  app.add_option("--stoplist", stoplist, "stop-word file, one term per line");
  app.add_option("--alpha", opt.config.alpha, "document concentration")->capture_default_str();
  app.add_option("--beta", opt.config.beta, "topic-word prior")->capture_default_str();
  app.add_option("--gamma", opt.config.gamma, "global GEM concentration")->capture_default_str();
  app.add_option("--kstar", opt.config.k_star, "truncation level (flag topic index)")
      ->capture_default_str();
  app.add_option("--iterations", opt.config.iterations, "total Gibbs iterations")
      ->capture_default_str();
  app.add_option("--threads", opt.config.threads, "worker threads")->capture_default_str();
  app.add_option("--seed", opt.config.seed, "random seed")->capture_default_str();
  app.add_option("--output-dir", output_dir, "directory for trace, topics and checkpoints")
      ->capture_default_str();
  app.add_option("--checkpoint-every", opt.checkpoint_every,
                 "checkpoint interval (0: iterations / 20)")
      ->capture_default_str();
  app.add_option("--summary-top-words", opt.summary_top_words, "top words per summarized topic")
      ->capture_default_str();
  app.add_option("--min-doc-tokens", opt.min_doc_tokens, "drop shorter documents")
      ->capture_default_str();
  app.add_option("--rare-word-limit", opt.rare_word_limit,
                 "drop words with lower total frequency")
      ->capture_default_str();
  app.add_option("--resume", resume, "continue from a checkpoint file");
  app.add_flag("--no-timing", no_timing, "write zero phase timings (byte-reproducible trace)");

  CLI11_PARSE(app, argc, argv);

  opt.corpus = corpus;
  if (!vocab.empty()) opt.vocab = vocab;
  if (!stoplist.empty()) opt.stoplist = stoplist;
  if (!resume.empty()) opt.resume = resume;
  opt.output_dir = output_dir;
  opt.record_timing = !no_timing;

  try {
    opt.config.validate();
    const auto summary = shdp::train(opt, std::cerr);
    std::cerr << "done: " << summary.final_iteration << " iterations, "
              << summary.active_topics << " active topics\n";
  } catch (const shdp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
