#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace shdp {

using WordId = std::uint32_t;

/// Dense, 0-based bijection between word-type strings and ids.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Throws FormatError if a term appears twice.
  explicit Vocabulary(std::vector<std::string> terms);

  /// Returns the id of `term`, inserting it if absent.
  WordId intern(std::string_view term);
  /// Returns true and stores the id if `term` is known.
  bool find(std::string_view term, WordId& id) const;

  const std::string& term(WordId id) const { return terms_.at(id); }
  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.terms_ == b.terms_;
  }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, WordId> index_;
};

/// Immutable tokenized documents over a fixed vocabulary, stored CSR-style.
class Corpus {
 public:
  Corpus() : offsets_{0} {}
  /// Throws FormatError if any token id is outside the vocabulary.
  Corpus(Vocabulary vocab, const std::vector<std::vector<WordId>>& docs);

  std::size_t num_docs() const { return offsets_.size() - 1; }
  std::size_t num_tokens() const { return tokens_.size(); }
  std::size_t vocab_size() const { return vocab_.size(); }
  std::size_t max_doc_len() const { return max_doc_len_; }

  std::span<const WordId> doc(std::size_t d) const {
    return {tokens_.data() + offsets_[d], tokens_.data() + offsets_[d + 1]};
  }
  std::size_t doc_begin(std::size_t d) const { return offsets_[d]; }
  std::size_t doc_length(std::size_t d) const { return offsets_[d + 1] - offsets_[d]; }

  std::span<const WordId> tokens() const { return tokens_; }
  const Vocabulary& vocab() const { return vocab_; }

  std::vector<std::vector<WordId>> to_docs() const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.vocab_ == b.vocab_ && a.offsets_ == b.offsets_ && a.tokens_ == b.tokens_;
  }

 private:
  Vocabulary vocab_;
  std::vector<std::size_t> offsets_;
  std::vector<WordId> tokens_;
  std::size_t max_doc_len_ = 0;
};

struct CorpusStats {
  std::size_t vocab_size = 0;
  std::size_t num_docs = 0;
  std::size_t num_tokens = 0;
  std::size_t max_doc_len = 0;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

struct PreprocessSpec {
  std::unordered_set<std::string> stoplist;
  std::size_t min_doc_tokens = 10;
  std::size_t rare_word_limit = 10;
};

using RawDocs = std::vector<std::vector<std::string>>;

/// Reads a UCI bag-of-words pair (docword + vocab). Each (doc, word, count)
/// triple expands to `count` tokens; within a document tokens are ordered by
/// ascending word id with repeats contiguous.
Corpus parse_uci_bow(std::istream& docword, std::istream& vocab);

/// Writes `corpus` back out as a UCI docword/vocab pair.
void write_uci_bow(const Corpus& corpus, std::ostream& docword, std::ostream& vocab);

/// One document per line. Tokens are split on ASCII whitespace, lowercased,
/// and trimmed of non-alphanumeric edge characters; tokens that are pure
/// punctuation are dropped. Throws FormatError on invalid UTF-8.
RawDocs parse_token_lines(std::istream& text);

/// Builds a corpus over a vocabulary in first-appearance order.
Corpus build_corpus(const RawDocs& docs);

/// Stoplist removal, then rare-word pruning (total corpus frequency below the
/// limit), then short-document removal, repeated until nothing changes. The
/// vocabulary is rebuilt densely over surviving terms, keeping their order.
Corpus preprocess(const Corpus& corpus, const PreprocessSpec& spec);
Corpus preprocess(const RawDocs& docs, const PreprocessSpec& spec);

CorpusStats corpus_stats(const Corpus& corpus);

/// One term per line; blank lines and surrounding whitespace are ignored.
std::unordered_set<std::string> load_stoplist(std::istream& in);

}  // namespace shdp
