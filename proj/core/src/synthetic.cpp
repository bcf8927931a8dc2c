#include "sparsehdp/synthetic.hpp"

#include <cstdio>
#include <vector>

#include "sparsehdp/alias.hpp"
#include "sparsehdp/error.hpp"
#include "sparsehdp/random.hpp"

namespace shdp {

namespace {

std::vector<double> dirichlet(Stream& rng, const std::vector<double>& shape) {
  std::vector<double> out(shape.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    out[i] = draw_gamma(rng, shape[i]);
    sum += out[i];
  }
  for (auto& x : out) x /= sum;
  return out;
}

}  // namespace

Corpus generate_mixture_corpus(const SyntheticSpec& spec) {
  if (spec.topics < 1 || spec.vocab_size < spec.topics) {
    throw ConfigError("synthetic corpus needs 1 <= topics <= vocab_size");
  }
  Stream rng = derive_stream({spec.seed, 0, UnitKind::init, 0xC0FFEE});
  const std::size_t block = spec.vocab_size / spec.topics;
  std::vector<AliasTable> topic_tables;
  for (std::size_t t = 0; t < spec.topics; ++t) {
    std::vector<double> shape(spec.vocab_size, spec.off_block_weight);
    const std::size_t end = t + 1 == spec.topics ? spec.vocab_size : (t + 1) * block;
    for (std::size_t v = t * block; v < end; ++v) shape[v] = spec.in_block_weight;
    topic_tables.emplace_back(dirichlet(rng, shape));
  }

  std::vector<std::string> terms;
  for (std::size_t v = 0; v < spec.vocab_size; ++v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "w%03zu", v);
    terms.emplace_back(buf);
  }
  std::vector<std::vector<WordId>> docs(spec.num_docs);
  const std::vector<double> doc_shape(spec.topics, spec.doc_concentration);
  for (auto& doc : docs) {
    const AliasTable mix(dirichlet(rng, doc_shape));
    doc.reserve(spec.doc_length);
    for (std::size_t i = 0; i < spec.doc_length; ++i) {
      const auto t = mix.draw(rng);
      doc.push_back(topic_tables[t].draw(rng));
    }
  }
  return Corpus(Vocabulary(std::move(terms)), docs);
}

}  // namespace shdp
