// Prints V, D, N and the maximum document length of a corpus after
// preprocessing, one "name value" pair per line.

#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "sparsehdp/corpus.hpp"
#include "sparsehdp/trainer.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Corpus statistics after preprocessing"};
  shdp::TrainOptions opt;
  std::string corpus;
  std::string vocab;
  std::string stoplist;
  app.add_option("--corpus", corpus, "docword.txt (uci) or text file")->required();
  app.add_option("--vocab", vocab, "vocab.txt, required for --format uci");
  const std::map<std::string, shdp::CorpusFormat> formats{{"uci", shdp::CorpusFormat::uci},
                                                          {"text", shdp::CorpusFormat::text}};
  app.add_option("--format", opt.format, "corpus format")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
      ->default_str("uci");
  app.add_option("--stoplist", stoplist, "stop-word file");
  app.add_option("--min-doc-tokens", opt.min_doc_tokens)->capture_default_str();
  app.add_option("--rare-word-limit", opt.rare_word_limit)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  opt.corpus = corpus;
  if (!vocab.empty()) opt.vocab = vocab;
  if (!stoplist.empty()) opt.stoplist = stoplist;
  try {
    const auto stats = shdp::corpus_stats(shdp::load_training_corpus(opt));
    std::cout << "V " << stats.vocab_size << "\nD " << stats.num_docs << "\nN "
              << stats.num_tokens << "\nmax_doc_len " << stats.max_doc_len << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
