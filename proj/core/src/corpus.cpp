#include "sparsehdp/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include "sparsehdp/error.hpp"

namespace shdp {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong encodings, surrogates, out of range
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

bool is_word_char(char ch) {
  const auto c = static_cast<unsigned char>(ch);
  // Non-ASCII bytes belong to multi-byte UTF-8 letters; keep them.
  return c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

std::string normalize_token(std::string_view tok) {
  std::size_t b = 0;
  std::size_t e = tok.size();
  while (b < e && !is_word_char(tok[b])) ++b;
  while (e > b && !is_word_char(tok[e - 1])) --e;
  std::string out(tok.substr(b, e - b));
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], static_cast<WordId>(i)).second) {
      throw FormatError("duplicate vocabulary term '" + terms_[i] + "'");
    }
  }
}

WordId Vocabulary::intern(std::string_view term) {
  if (auto it = index_.find(std::string(term)); it != index_.end()) return it->second;
  const auto id = static_cast<WordId>(terms_.size());
  terms_.emplace_back(term);
  index_.emplace(terms_.back(), id);
  return id;
}

bool Vocabulary::find(std::string_view term, WordId& id) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return false;
  id = it->second;
  return true;
}

Corpus::Corpus(Vocabulary vocab, const std::vector<std::vector<WordId>>& docs)
    : vocab_(std::move(vocab)) {
  offsets_.reserve(docs.size() + 1);
  offsets_.push_back(0);
  std::size_t total = 0;
  for (const auto& d : docs) total += d.size();
  tokens_.reserve(total);
  for (const auto& d : docs) {
    for (const WordId w : d) {
      if (w >= vocab_.size()) {
        throw FormatError("token id " + std::to_string(w) + " outside vocabulary of size " +
                          std::to_string(vocab_.size()));
      }
      tokens_.push_back(w);
    }
    offsets_.push_back(tokens_.size());
    max_doc_len_ = std::max(max_doc_len_, d.size());
  }
}

std::vector<std::vector<WordId>> Corpus::to_docs() const {
  std::vector<std::vector<WordId>> docs(num_docs());
  for (std::size_t d = 0; d < num_docs(); ++d) {
    auto span = doc(d);
    docs[d].assign(span.begin(), span.end());
  }
  return docs;
}

Corpus parse_uci_bow(std::istream& docword, std::istream& vocab_in) {
  std::string line;
  std::uint64_t header[3];
  const char* names[3] = {"D", "V", "NNZ"};
  for (int h = 0; h < 3; ++h) {
    if (!std::getline(docword, line) || !parse_u64(line, header[h])) {
      throw FormatError(std::string("malformed docword header: expected integer ") + names[h]);
    }
  }
  const std::uint64_t num_docs = header[0];
  const std::uint64_t vocab_size = header[1];
  const std::uint64_t nnz = header[2];

  std::vector<std::vector<std::pair<WordId, std::uint64_t>>> entries(num_docs);
  std::uint64_t seen = 0;
  std::size_t line_no = 3;
  while (std::getline(docword, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_ws(line);
    std::uint64_t d = 0, w = 0, c = 0;
    if (fields.size() != 3 || !parse_u64(fields[0], d) || !parse_u64(fields[1], w) ||
        !parse_u64(fields[2], c)) {
      throw FormatError("docword line " + std::to_string(line_no) +
                        ": expected 'docId wordId count'");
    }
    if (d < 1 || d > num_docs) {
      throw FormatError("docword line " + std::to_string(line_no) + ": docId " +
                        std::to_string(d) + " out of range [1, " + std::to_string(num_docs) + "]");
    }
    if (w < 1 || w > vocab_size) {
      throw FormatError("docword line " + std::to_string(line_no) + ": wordId " +
                        std::to_string(w) + " out of range [1, " + std::to_string(vocab_size) +
                        "]");
    }
    if (c < 1) {
      throw FormatError("docword line " + std::to_string(line_no) + ": count must be >= 1");
    }
    entries[d - 1].emplace_back(static_cast<WordId>(w - 1), c);
    ++seen;
  }
  if (seen != nnz) {
    throw FormatError("docword declares NNZ=" + std::to_string(nnz) + " but contains " +
                      std::to_string(seen) + " entries");
  }

  std::vector<std::string> terms;
  while (std::getline(vocab_in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    terms.push_back(line);
  }
  // tolerate a single trailing empty line produced by some writers
  if (terms.size() == vocab_size + 1 && terms.back().empty()) terms.pop_back();
  if (terms.size() != vocab_size) {
    throw FormatError("vocab has " + std::to_string(terms.size()) + " lines but docword declares V=" +
                      std::to_string(vocab_size));
  }

  std::vector<std::vector<WordId>> docs(num_docs);
  for (std::size_t d = 0; d < num_docs; ++d) {
    auto& e = entries[d];
    std::sort(e.begin(), e.end());
    for (const auto& [w, c] : e) docs[d].insert(docs[d].end(), c, w);
  }
  return Corpus(Vocabulary(std::move(terms)), docs);
}

void write_uci_bow(const Corpus& corpus, std::ostream& docword, std::ostream& vocab) {
  std::ostringstream body;
  std::size_t nnz = 0;
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    std::vector<WordId> words(corpus.doc(d).begin(), corpus.doc(d).end());
    std::sort(words.begin(), words.end());
    for (std::size_t i = 0; i < words.size();) {
      std::size_t j = i;
      while (j < words.size() && words[j] == words[i]) ++j;
      body << (d + 1) << ' ' << (words[i] + 1) << ' ' << (j - i) << '\n';
      ++nnz;
      i = j;
    }
  }
  docword << corpus.num_docs() << '\n' << corpus.vocab_size() << '\n' << nnz << '\n' << body.str();
  for (const auto& t : corpus.vocab().terms()) vocab << t << '\n';
}

RawDocs parse_token_lines(std::istream& text) {
  RawDocs docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(text, line)) {
    ++line_no;
    if (!valid_utf8(line)) {
      throw FormatError("line " + std::to_string(line_no) + ": invalid UTF-8");
    }
    auto& doc = docs.emplace_back();
    for (auto tok : split_ws(line)) {
      auto norm = normalize_token(tok);
      if (!norm.empty()) doc.push_back(std::move(norm));
    }
  }
  return docs;
}

Corpus build_corpus(const RawDocs& raw) {
  Vocabulary vocab;
  std::vector<std::vector<WordId>> docs(raw.size());
  for (std::size_t d = 0; d < raw.size(); ++d) {
    docs[d].reserve(raw[d].size());
    for (const auto& t : raw[d]) docs[d].push_back(vocab.intern(t));
  }
  return Corpus(std::move(vocab), docs);
}

namespace {

// One pass of stoplist -> rare words -> short documents. Returns true if
// anything was removed.
bool preprocess_pass(const Corpus& in, const PreprocessSpec& spec, Corpus& out) {
  const std::size_t V = in.vocab_size();
  std::vector<bool> keep(V, true);
  for (WordId w = 0; w < V; ++w) {
    if (spec.stoplist.contains(in.vocab().term(w))) keep[w] = false;
  }
  std::vector<std::size_t> freq(V, 0);
  for (const WordId w : in.tokens()) {
    if (keep[w]) ++freq[w];
  }
  for (WordId w = 0; w < V; ++w) {
    if (keep[w] && freq[w] < spec.rare_word_limit) keep[w] = false;
  }

  std::vector<std::vector<WordId>> docs;
  docs.reserve(in.num_docs());
  bool changed = false;
  for (std::size_t d = 0; d < in.num_docs(); ++d) {
    std::vector<WordId> kept;
    for (const WordId w : in.doc(d)) {
      if (keep[w]) kept.push_back(w);
    }
    if (kept.size() != in.doc_length(d)) changed = true;
    if (kept.size() < spec.min_doc_tokens) {
      changed = true;
      continue;
    }
    docs.push_back(std::move(kept));
  }

  // dense renumbering over surviving terms, preserving order
  std::vector<WordId> remap(V, 0);
  std::vector<std::string> terms;
  for (WordId w = 0; w < V; ++w) {
    if (keep[w]) {
      remap[w] = static_cast<WordId>(terms.size());
      terms.push_back(in.vocab().term(w));
    } else {
      changed = true;
    }
  }
  for (auto& doc : docs) {
    for (auto& w : doc) w = remap[w];
  }
  out = Corpus(Vocabulary(std::move(terms)), docs);
  return changed;
}

}  // namespace

Corpus preprocess(const Corpus& corpus, const PreprocessSpec& spec) {
  Corpus current = corpus;
  Corpus next;
  while (preprocess_pass(current, spec, next)) current = std::move(next);
  return current;
}

Corpus preprocess(const RawDocs& docs, const PreprocessSpec& spec) {
  return preprocess(build_corpus(docs), spec);
}

CorpusStats corpus_stats(const Corpus& corpus) {
  return {corpus.vocab_size(), corpus.num_docs(), corpus.num_tokens(), corpus.max_doc_len()};
}

std::unordered_set<std::string> load_stoplist(std::istream& in) {
  std::unordered_set<std::string> words;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!valid_utf8(line)) {
      throw FormatError("stoplist line " + std::to_string(line_no) + ": invalid UTF-8");
    }
    auto t = trim(line);
    if (!t.empty()) words.emplace(t);
  }
  return words;
}

}  // namespace shdp
