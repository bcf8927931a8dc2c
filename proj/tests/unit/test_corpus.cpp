#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "sparsehdp/corpus.hpp"
#include "sparsehdp/error.hpp"
#include "sparsehdp/random.hpp"

using namespace shdp;

namespace {

Corpus parse_uci(const std::string& docword, const std::string& vocab) {
  std::istringstream dw(docword);
  std::istringstream vb(vocab);
  return parse_uci_bow(dw, vb);
}

RawDocs parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_token_lines(in);
}

// Random corpus over a small vocabulary; some documents may be empty.
Corpus random_corpus(std::uint64_t seed) {
  Stream rng = derive_stream({seed, 0, UnitKind::init, 99});
  const std::size_t V = 1 + draw_index(rng, 25);
  const std::size_t D = draw_index(rng, 20);
  std::vector<std::string> terms;
  for (std::size_t v = 0; v < V; ++v) terms.push_back("t" + std::to_string(v));
  std::vector<std::vector<WordId>> docs(D);
  for (auto& d : docs) {
    const std::size_t len = draw_index(rng, 30);
    for (std::size_t i = 0; i < len; ++i) {
      // skewed so that some terms are rare
      const double u = draw_uniform(rng);
      d.push_back(static_cast<WordId>(static_cast<double>(V) * u * u));
    }
  }
  return Corpus(Vocabulary(terms), docs);
}

std::map<std::pair<std::size_t, WordId>, std::size_t> triples(const Corpus& c) {
  std::map<std::pair<std::size_t, WordId>, std::size_t> out;
  for (std::size_t d = 0; d < c.num_docs(); ++d) {
    for (const WordId w : c.doc(d)) ++out[{d, w}];
  }
  return out;
}

}  // namespace

TEST_CASE("parse_uci_bow expands triples in canonical order") {
  const auto c = parse_uci("2\n3\n2\n1 1 2\n2 3 1\n", "a\nb\nc\n");
  CHECK(c.to_docs() == std::vector<std::vector<WordId>>{{0, 0}, {2}});
  CHECK(corpus_stats(c) == CorpusStats{3, 2, 3, 2});
  CHECK(c.vocab().term(2) == "c");
}

TEST_CASE("parse_uci_bow minimal file") {
  const auto c = parse_uci("1\n1\n1\n1 1 1\n", "only\n");
  CHECK(c.to_docs() == std::vector<std::vector<WordId>>{{0}});
  CHECK(c.num_tokens() == 1);
}

TEST_CASE("parse_uci_bow sorts unordered entries by word id") {
  const auto c = parse_uci("1\n3\n3\n1 3 1\n1 1 2\n1 2 1\n", "a\nb\nc\n");
  CHECK(c.to_docs() == std::vector<std::vector<WordId>>{{0, 0, 1, 2}});
}

TEST_CASE("parse_uci_bow rejects malformed input") {
  CHECK_THROWS_AS(parse_uci("2\n3\n1\n1 4 1\n", "a\nb\nc\n"), FormatError);  // word id > V
  CHECK_THROWS_AS(parse_uci("2\n3\n1\n3 1 1\n", "a\nb\nc\n"), FormatError);  // doc id > D
  CHECK_THROWS_AS(parse_uci("2\n3\n1\n1 0 1\n", "a\nb\nc\n"), FormatError);  // 0-based id
  CHECK_THROWS_AS(parse_uci("2\n3\n1\n1 1 0\n", "a\nb\nc\n"), FormatError);  // count < 1
  CHECK_THROWS_AS(parse_uci("2\nx\n1\n1 1 1\n", "a\nb\nc\n"), FormatError);  // header
  CHECK_THROWS_AS(parse_uci("2\n3\n", "a\nb\nc\n"), FormatError);            // short header
  CHECK_THROWS_AS(parse_uci("2\n3\n1\n1 1 1\n", "a\nb\n"), FormatError);      // vocab lines
  CHECK_THROWS_AS(parse_uci("2\n3\n2\n1 1 1\n", "a\nb\nc\n"), FormatError);   // NNZ mismatch
  CHECK_THROWS_AS(parse_uci("1\n2\n1\n1 1 1\n", "a\na\n"), FormatError);      // duplicate term
}

TEST_CASE("UCI write then parse preserves the (doc, word, count) multiset") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Corpus c = random_corpus(seed);
    std::ostringstream dw;
    std::ostringstream vb;
    write_uci_bow(c, dw, vb);
    const Corpus back = parse_uci(dw.str(), vb.str());
    CHECK(back.vocab() == c.vocab());
    CHECK(back.num_docs() == c.num_docs());
    CHECK(triples(back) == triples(c));
  }
}

TEST_CASE("parse_token_lines normalizes tokens") {
  const auto docs = parse_text("The cat. The hat.\n");
  REQUIRE(docs.size() == 1);
  CHECK(docs[0] == std::vector<std::string>{"the", "cat", "the", "hat"});
}

TEST_CASE("parse_token_lines edge cases") {
  CHECK(parse_text("").empty());
  const auto two = parse_text("first line\nsecond\n");
  REQUIRE(two.size() == 2);
  CHECK(two[0] == std::vector<std::string>{"first", "line"});
  CHECK(two[1] == std::vector<std::string>{"second"});

  const auto punct = parse_text("-- ... ?! a--b 'quoted' x.\n\n");
  REQUIRE(punct.size() == 2);
  CHECK(punct[0] == std::vector<std::string>{"a--b", "quoted", "x"});
  CHECK(punct[1].empty());

  CHECK(parse_text("Caf\xc3\xa9 \xce\xb1\n")[0] == std::vector<std::string>{"caf\xc3\xa9", "\xce\xb1"});
  CHECK_THROWS_AS(parse_text("bad \xff byte\n"), FormatError);
  CHECK_THROWS_AS(parse_text("truncated \xc3\n"), FormatError);
}

TEST_CASE("parse_token_lines on the sample fixture") {
  std::ifstream in(SHDP_TEST_DATA_DIR "/sample_text.txt");
  REQUIRE(in);
  const auto docs = parse_token_lines(in);
  REQUIRE(docs.size() == 4);
  CHECK(docs[0] == std::vector<std::string>{"the", "cat", "sat", "on", "the", "mat", "the",
                                            "cat", "the", "hat"});
  CHECK(docs[1] == std::vector<std::string>{"a", "dog", "and", "a", "dog's", "bone"});
  CHECK(docs[2].empty());
}

TEST_CASE("preprocess with no-op thresholds is the identity") {
  const Corpus c = parse_uci("3\n4\n4\n1 1 2\n1 4 1\n3 2 5\n3 3 1\n", "a\nb\nc\nd\n");
  PreprocessSpec spec;
  spec.min_doc_tokens = 0;
  spec.rare_word_limit = 0;
  CHECK(preprocess(c, spec) == c);
}

TEST_CASE("preprocess drops rare words by total frequency") {
  RawDocs docs(2);
  for (int i = 0; i < 9; ++i) docs[0].push_back("rare");
  for (int i = 0; i < 10; ++i) docs[0].push_back("common");
  for (int i = 0; i < 10; ++i) docs[1].push_back("other");
  PreprocessSpec spec;
  spec.min_doc_tokens = 0;
  const Corpus out = preprocess(docs, spec);
  WordId id = 0;
  CHECK_FALSE(out.vocab().find("rare", id));
  CHECK(out.vocab().find("common", id));
  CHECK(out.vocab_size() == 2);
  CHECK(out.doc_length(0) == 10);
}

TEST_CASE("preprocess drops short documents") {
  RawDocs docs(2);
  for (int i = 0; i < 9; ++i) docs[0].push_back("w");
  for (int i = 0; i < 12; ++i) docs[1].push_back("w");
  PreprocessSpec spec;
  spec.rare_word_limit = 0;
  const Corpus out = preprocess(docs, spec);
  CHECK(out.num_docs() == 1);
  CHECK(out.doc_length(0) == 12);
}

TEST_CASE("preprocess removes stop words before counting") {
  RawDocs docs{{"the", "the", "cat", "cat", "cat"}, {"the", "dog"}};
  PreprocessSpec spec;
  spec.stoplist = {"the"};
  spec.min_doc_tokens = 2;
  spec.rare_word_limit = 0;
  const Corpus out = preprocess(docs, spec);
  // doc 1 keeps only "dog" and falls below the minimum length
  CHECK(out.num_docs() == 1);
  CHECK(out.vocab().terms() == std::vector<std::string>{"cat", "dog"});
  CHECK(out.to_docs() == std::vector<std::vector<WordId>>{{0, 0, 0}});
}

TEST_CASE("preprocess is idempotent") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Corpus c = random_corpus(seed);
    PreprocessSpec spec;
    spec.min_doc_tokens = seed % 7;
    spec.rare_word_limit = seed % 5;
    if (seed % 3 == 0) spec.stoplist = {"t0", "t3"};
    const Corpus once = preprocess(c, spec);
    CHECK(preprocess(once, spec) == once);
    const auto stats = corpus_stats(once);
    std::size_t n = 0;
    std::size_t longest = 0;
    for (std::size_t d = 0; d < once.num_docs(); ++d) {
      n += once.doc_length(d);
      longest = std::max(longest, once.doc_length(d));
    }
    CHECK(stats.num_tokens == n);
    CHECK(stats.max_doc_len == longest);
  }
}

TEST_CASE("corpus_stats of an empty corpus") {
  CHECK(corpus_stats(Corpus{}) == CorpusStats{0, 0, 0, 0});
}

TEST_CASE("load_stoplist trims and skips blanks") {
  std::istringstream in("the\n  a \n\nan\r\n");
  const auto s = load_stoplist(in);
  CHECK(s.size() == 3);
  CHECK(s.contains("a"));
  CHECK(s.contains("an"));
}
